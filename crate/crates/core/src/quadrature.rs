//! Periodic trapezoid rule on circles.
//!
//! With nodes `z_j = z0 + r e^{2πij/n}` the contour integral
//! `(1/2πi) ∮ g(z) / (z - z0) dz` reduces to the plain average of `g(z_j)`,
//! which converges geometrically for integrands analytic in an annulus around
//! the circle. The error estimate `delta` is the difference between the
//! averages over even- and odd-indexed nodes.
//!
//! Sums are accumulated sequentially in node order, so results are
//! bit-reproducible for a given node count.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::function::AnalyticFunction;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("contour radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("contour center must be finite")]
    InvalidCenter,
    #[error("node count must be even and at least 4, got {0}")]
    InvalidNodeCount(usize),
    #[error("function evaluation failed at node {index} (z = {z})")]
    EvaluationFailed { index: usize, z: Complex64 },
}

/// Circle `|z - center| = radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    center: Complex64,
    radius: f64,
}

impl Contour {
    pub fn new(center: Complex64, radius: f64) -> Result<Self, QuadratureError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(QuadratureError::InvalidRadius(radius));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(QuadratureError::InvalidCenter);
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Node offsets `r e^{2πij/n}`, starting at angle zero.
    pub fn offsets(&self, n_points: usize) -> impl Iterator<Item = Complex64> + '_ {
        let step = TAU / n_points as f64;
        (0..n_points).map(move |j| {
            let (s, c) = (step * j as f64).sin_cos();
            Complex64::new(self.radius * c, self.radius * s)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: Complex64,
    /// `|I_even - I_odd|`.
    pub delta: f64,
    pub points_used: usize,
}

pub(crate) fn check_node_count(n_points: usize) -> Result<(), QuadratureError> {
    if n_points < 4 || !n_points.is_multiple_of(2) {
        return Err(QuadratureError::InvalidNodeCount(n_points));
    }
    Ok(())
}

/// Function values on the nodes of a contour, evaluated once and reused for
/// every probe wavenumber.
#[derive(Debug, Clone)]
pub struct ContourSamples {
    contour: Contour,
    offsets: Vec<Complex64>,
    values: Vec<Complex64>,
}

impl ContourSamples {
    pub fn evaluate<F: AnalyticFunction + ?Sized>(
        f: &F,
        contour: Contour,
        n_points: usize,
    ) -> Result<Self, QuadratureError> {
        check_node_count(n_points)?;
        let offsets: Vec<Complex64> = contour.offsets(n_points).collect();
        let values = offsets
            .iter()
            .enumerate()
            .map(|(index, &w)| {
                let z = contour.center + w;
                f.eval(z)
                    .map_err(|_| QuadratureError::EvaluationFailed { index, z })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            contour,
            offsets,
            values,
        })
    }

    pub fn contour(&self) -> Contour {
        self.contour
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Trapezoid approximation of `(1/2πi) ∮ f(z) e^{ik(z-z0)} / (z - z0) dz`.
    pub fn mean_value(&self, k: Complex64) -> IntegrationResult {
        let ik = Complex64::i() * k;
        let zero = k.re == 0.0 && k.im == 0.0;
        let mut sums = [Complex64::new(0.0, 0.0); 2];
        for (j, (&w, &v)) in self.offsets.iter().zip(&self.values).enumerate() {
            let term = if zero { v } else { v * (ik * w).exp() };
            sums[j % 2] += term;
        }
        let n = self.values.len() as f64;
        let even = sums[0] * (2.0 / n);
        let odd = sums[1] * (2.0 / n);
        IntegrationResult {
            value: (sums[0] + sums[1]) / n,
            delta: (even - odd).norm(),
            points_used: self.values.len(),
        }
    }

    /// Arc-length average of `|f|` on the contour.
    pub fn magnitude_average(&self) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm()).sum();
        total / self.values.len() as f64
    }
}

/// Approximates `(1/2πi) ∮ f(z) e^{ik(z-z0)} / (z - z0) dz` on `contour` with
/// the `n_points`-node trapezoid rule.
pub fn mean_value_integral<F: AnalyticFunction + ?Sized>(
    f: &F,
    contour: Contour,
    k: Complex64,
    n_points: usize,
) -> Result<IntegrationResult, QuadratureError> {
    Ok(ContourSamples::evaluate(f, contour, n_points)?.mean_value(k))
}

/// `(1/L) ∮ |f(z)| |dz|`, the residue-scale estimate used for the threshold.
pub fn magnitude_average<F: AnalyticFunction + ?Sized>(
    f: &F,
    contour: Contour,
    n_points: usize,
) -> Result<f64, QuadratureError> {
    Ok(ContourSamples::evaluate(f, contour, n_points)?.magnitude_average())
}
