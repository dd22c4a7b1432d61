//! Rational functions with a known pole list.
//!
//! A [`RationalOracle`] is `p(z) + Σ_j c_j / (z - z_j)^{n_j}` with explicit
//! pole locations, so the exact value of the probed mean-value integral on a
//! circle follows from the residue theorem. Tests use it as ground truth for
//! the quadrature and the pole test.

use num_complex::Complex64;

use crate::function::{finite, AnalyticFunction, Evaluation, NonFinite};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OraclePole {
    pub location: Complex64,
    /// Order of the pole, at least 1.
    pub order: u32,
    /// Coefficient of `(z - location)^{-order}`; the residue when `order == 1`.
    pub coefficient: Complex64,
}

impl OraclePole {
    pub fn simple(location: Complex64, residue: Complex64) -> Self {
        Self {
            location,
            order: 1,
            coefficient: residue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("pole order must be at least 1")]
    ZeroOrder,
    #[error("pole locations must be pairwise distinct ({0} repeats)")]
    DuplicatePole(Complex64),
    #[error("pole data must be finite")]
    NonFiniteData,
    #[error("pole at {location} is within {distance:e} of the contour")]
    PoleNearContour { location: Complex64, distance: f64 },
    #[error("pole at {0} is enclosed but not simple")]
    EnclosedHigherOrderPole(Complex64),
    #[error("contour center {0} coincides with a pole")]
    CenterIsPole(Complex64),
    #[error("contour radius must be positive and finite")]
    InvalidRadius,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalOracle {
    name: String,
    poles: Vec<OraclePole>,
    /// Polynomial coefficients, constant term first.
    entire_part: Vec<Complex64>,
}

impl RationalOracle {
    pub fn new(
        name: impl Into<String>,
        poles: Vec<OraclePole>,
        entire_part: Vec<Complex64>,
    ) -> Result<Self, OracleError> {
        for (idx, pole) in poles.iter().enumerate() {
            if pole.order == 0 {
                return Err(OracleError::ZeroOrder);
            }
            let ok = |c: Complex64| c.re.is_finite() && c.im.is_finite();
            if !ok(pole.location) || !ok(pole.coefficient) {
                return Err(OracleError::NonFiniteData);
            }
            if poles[..idx].iter().any(|p| p.location == pole.location) {
                return Err(OracleError::DuplicatePole(pole.location));
            }
        }
        if entire_part
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(OracleError::NonFiniteData);
        }
        Ok(Self {
            name: name.into(),
            poles,
            entire_part,
        })
    }

    /// Sum of simple poles with no polynomial part.
    pub fn simple_poles(
        name: impl Into<String>,
        poles: impl IntoIterator<Item = (Complex64, Complex64)>,
    ) -> Result<Self, OracleError> {
        let poles = poles
            .into_iter()
            .map(|(at, res)| OraclePole::simple(at, res))
            .collect();
        Self::new(name, poles, Vec::new())
    }

    pub fn poles(&self) -> &[OraclePole] {
        &self.poles
    }

    pub fn entire_part(&self) -> &[Complex64] {
        &self.entire_part
    }

    /// Distance from `z0` to the nearest pole, infinite when there are none.
    pub fn nearest_pole_distance(&self, z0: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|p| (p.location - z0).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact value of `(1/2πi) ∮ f(z) e^{ik(z-z0)} / (z - z0) dz` on the circle
    /// `|z - z0| = radius`, by residues: `f(z0) + Σ_enclosed R_j e^{ik w_j} / w_j`
    /// with `w_j = z_j - z0`.
    pub fn mean_value(
        &self,
        z0: Complex64,
        radius: f64,
        k: Complex64,
    ) -> Result<Complex64, OracleError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(OracleError::InvalidRadius);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for pole in &self.poles {
            let offset = pole.location - z0;
            let distance = offset.norm();
            if distance == 0.0 {
                return Err(OracleError::CenterIsPole(z0));
            }
            let gap = (distance - radius).abs();
            if gap < 1e-9 * radius {
                return Err(OracleError::PoleNearContour {
                    location: pole.location,
                    distance: gap,
                });
            }
            if distance < radius {
                if pole.order != 1 {
                    return Err(OracleError::EnclosedHigherOrderPole(pole.location));
                }
                let phase = (Complex64::i() * k * offset).exp();
                total += pole.coefficient * phase / offset;
            }
        }
        let center = self.eval(z0).map_err(|_| OracleError::CenterIsPole(z0))?;
        Ok(center + total)
    }
}

/// Free-function form of [`RationalOracle::mean_value`].
pub fn oracle_mean_value(
    oracle: &RationalOracle,
    z0: Complex64,
    radius: f64,
    k: Complex64,
) -> Result<Complex64, OracleError> {
    oracle.mean_value(z0, radius, k)
}

impl AnalyticFunction for RationalOracle {
    fn eval(&self, z: Complex64) -> Evaluation {
        let mut value = self
            .entire_part
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
        for pole in &self.poles {
            let offset = z - pole.location;
            if offset.re == 0.0 && offset.im == 0.0 {
                return Err(NonFinite);
            }
            value += pole.coefficient / offset.powi(pole.order as i32);
        }
        finite(value)
    }

    fn name(&self) -> &str {
        &self.name
    }
}
