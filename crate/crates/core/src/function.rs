//! The black-box evaluation contract.
//!
//! Everything downstream (quadrature, the pole test, the radius search) only
//! ever sees a function through [`AnalyticFunction::eval`]. An evaluation that
//! produces an infinite or NaN component is reported as [`NonFinite`] rather
//! than propagated, since the search deliberately probes close to poles.

use std::fmt;

use num_complex::Complex64;

/// Marker for an evaluation that did not produce a finite complex number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("function value is not finite")]
pub struct NonFinite;

/// Result of a single point evaluation.
pub type Evaluation = Result<Complex64, NonFinite>;

/// A deterministic, side-effect free map from the complex plane to itself.
///
/// Implementations must return the same output for the same input; the pole
/// test and the search rely on this to be reproducible.
pub trait AnalyticFunction: Sync {
    fn eval(&self, z: Complex64) -> Evaluation;

    /// Human-readable label used in reports.
    fn name(&self) -> &str {
        "f"
    }
}

impl<F: AnalyticFunction + ?Sized> AnalyticFunction for &F {
    fn eval(&self, z: Complex64) -> Evaluation {
        (**self).eval(z)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

impl<F: AnalyticFunction + ?Sized> AnalyticFunction for Box<F> {
    fn eval(&self, z: Complex64) -> Evaluation {
        (**self).eval(z)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// Returns `Ok(value)` when both components are finite.
#[inline]
pub fn finite(value: Complex64) -> Evaluation {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(NonFinite)
    }
}

/// Adapts a plain closure `Complex64 -> Complex64` into an [`AnalyticFunction`].
///
/// Non-finite outputs of the closure are mapped to [`NonFinite`].
pub struct FnFunction<F> {
    name: String,
    func: F,
}

impl<F> FnFunction<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    pub fn new(name: impl Into<String>, func: F) -> Self {
        Self {
            name: name.into(),
            func,
        }
    }
}

impl<F> AnalyticFunction for FnFunction<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, z: Complex64) -> Evaluation {
        finite((self.func)(z))
    }

    fn name(&self) -> &str {
        &self.name
    }
}

impl<F> fmt::Debug for FnFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnFunction")
            .field("name", &self.name)
            .finish()
    }
}

/// Shorthand for [`FnFunction::new`].
pub fn from_fn<F>(name: impl Into<String>, func: F) -> FnFunction<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    FnFunction::new(name, func)
}

/// `factor * inner(z)`.
#[derive(Debug, Clone)]
pub struct Scaled<F> {
    pub inner: F,
    pub factor: Complex64,
}

impl<F: AnalyticFunction> AnalyticFunction for Scaled<F> {
    fn eval(&self, z: Complex64) -> Evaluation {
        finite(self.inner.eval(z)? * self.factor)
    }

    fn name(&self) -> &str {
        self.inner.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_non_finite_is_reported() {
        let f = from_fn("recip", |z: Complex64| 1.0 / z);
        assert_eq!(f.eval(Complex64::new(0.0, 0.0)), Err(NonFinite));
        assert_eq!(
            f.eval(Complex64::new(2.0, 0.0)),
            Ok(Complex64::new(0.5, 0.0))
        );
        assert_eq!(f.name(), "recip");
    }

    #[test]
    fn scaled_multiplies() {
        let f = Scaled {
            inner: from_fn("id", |z| z),
            factor: Complex64::new(0.0, 2.0),
        };
        assert_eq!(
            f.eval(Complex64::new(1.0, 1.0)),
            Ok(Complex64::new(-2.0, 2.0))
        );
    }
}
