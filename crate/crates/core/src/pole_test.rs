//! Randomized test for poles inside a circle.
//!
//! If `f` is analytic in the closed disk then for every entire probe
//! `h_k(z) = e^{ik(z-z0)}`
//!
//! ```text
//! (1/2πi) ∮ f(z) h_k(z) / (z - z0) dz = f(z0) h_k(z0) = f(z0).
//! ```
//!
//! Enclosed poles add `Σ_j Res[f h_k / (z - z0), z_j]`, which can cancel for a
//! particular `k` but not for a random one except with small probability. The
//! test draws `M` wavenumbers, integrates each with the trapezoid rule and
//! compares the deviation from `f(z0)` against `T = ε · mean|f|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::function::AnalyticFunction;
use crate::quadrature::{check_node_count, Contour, ContourSamples, QuadratureError};
use crate::seed::rng_from_seed;

/// Deviations at or below this are treated as zero when the threshold itself
/// is zero (identically vanishing function on the contour).
pub const ZERO_THRESHOLD_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTestConfig {
    /// Number of probe wavenumbers `M`.
    pub samples: usize,
    /// Trapezoid nodes per integral `N` (even, at least 4).
    pub n_points: usize,
    /// Relative threshold `ε` in `(0, 1)`.
    pub epsilon: f64,
    pub rng_seed: u64,
    /// The test is inconclusive when an integral's `delta` exceeds
    /// `delta_factor · T`.
    pub delta_factor: f64,
}

impl Default for PoleTestConfig {
    fn default() -> Self {
        Self {
            samples: 3,
            n_points: 1000,
            epsilon: 1e-2,
            rng_seed: 0,
            delta_factor: 0.1,
        }
    }
}

impl PoleTestConfig {
    pub fn validate(&self) -> Result<(), PoleTestError> {
        if self.samples == 0 {
            return Err(PoleTestError::InvalidConfig(
                "samples must be at least 1".into(),
            ));
        }
        if check_node_count(self.n_points).is_err() {
            return Err(PoleTestError::InvalidConfig(format!(
                "n_points must be even and at least 4, got {}",
                self.n_points
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(PoleTestError::InvalidConfig(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.delta_factor > 0.0 && self.delta_factor.is_finite()) {
            return Err(PoleTestError::InvalidConfig(format!(
                "delta_factor must be positive, got {}",
                self.delta_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoleTestError {
    #[error("function value at the contour center {0} is not finite")]
    CenterNotFinite(Complex64),
    #[error("invalid pole-test configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    PolesDetected,
    NoPolesDetected,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PolesDetected => "poles-detected",
            Verdict::NoPolesDetected => "no-poles-detected",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One probe: wavenumber, deviation from `f(z0)` and quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub k: Complex64,
    pub deviation: f64,
    pub delta: f64,
}

/// Why a test came back inconclusive, when it was not a `delta` excess.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    EvaluationFailed {
        index: usize,
        z: Complex64,
    },
    /// `T` was zero or not finite and some deviation was not negligible.
    DegenerateThreshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleTestOutcome {
    pub verdict: Verdict,
    pub max_deviation: f64,
    pub threshold: f64,
    pub center_value: Complex64,
    pub samples: Vec<ProbeSample>,
    pub diagnostic: Option<Diagnostic>,
}

impl PoleTestOutcome {
    pub fn max_delta(&self) -> f64 {
        self.samples.iter().map(|s| s.delta).fold(0.0, f64::max)
    }
}

/// Draws `k` uniformly from the disk `|k| ≤ 1/r`, so that `|k (z - z0)| ≤ 1`
/// on and inside the contour and `e^{-1} ≤ |h_k| ≤ e` there.
pub fn sample_wavenumber<R: Rng + ?Sized>(rng: &mut R, contour: &Contour) -> Complex64 {
    let u: f64 = rng.gen();
    let phi: f64 = rng.gen::<f64>() * TAU;
    let modulus = u.sqrt() / contour.radius();
    Complex64::from_polar(modulus, phi)
}

/// Tests whether `contour` encloses poles of `f`.
pub fn test_contour<F: AnalyticFunction + ?Sized>(
    f: &F,
    contour: Contour,
    config: &PoleTestConfig,
) -> Result<PoleTestOutcome, PoleTestError> {
    config.validate()?;
    let center = contour.center();
    let center_value = f
        .eval(center)
        .map_err(|_| PoleTestError::CenterNotFinite(center))?;

    let inconclusive = |diagnostic| PoleTestOutcome {
        verdict: Verdict::Inconclusive,
        max_deviation: 0.0,
        threshold: 0.0,
        center_value,
        samples: Vec::new(),
        diagnostic: Some(diagnostic),
    };

    let nodes = match ContourSamples::evaluate(f, contour, config.n_points) {
        Ok(nodes) => nodes,
        Err(QuadratureError::EvaluationFailed { index, z }) => {
            return Ok(inconclusive(Diagnostic::EvaluationFailed { index, z }))
        }
        // Contour and node count are already validated.
        Err(other) => unreachable!("unexpected quadrature error: {other}"),
    };

    let threshold = config.epsilon * nodes.magnitude_average();
    let degenerate = !(threshold > 0.0 && threshold.is_finite());
    let mut rng = rng_from_seed(config.rng_seed);
    let mut outcome = PoleTestOutcome {
        verdict: Verdict::NoPolesDetected,
        max_deviation: 0.0,
        threshold: if threshold.is_finite() {
            threshold
        } else {
            0.0
        },
        center_value,
        samples: Vec::with_capacity(config.samples),
        diagnostic: None,
    };

    for _ in 0..config.samples {
        let k = sample_wavenumber(&mut rng, &contour);
        let integral = nodes.mean_value(k);
        let deviation = (integral.value - center_value).norm();
        outcome.samples.push(ProbeSample {
            k,
            deviation,
            delta: integral.delta,
        });
        outcome.max_deviation = outcome.max_deviation.max(deviation);

        if degenerate {
            if deviation > ZERO_THRESHOLD_FLOOR || integral.delta > ZERO_THRESHOLD_FLOOR {
                outcome.verdict = Verdict::Inconclusive;
                outcome.diagnostic = Some(Diagnostic::DegenerateThreshold);
                return Ok(outcome);
            }
            continue;
        }
        // An unresolved integral says nothing about the deviation, so the
        // precision check comes first.
        if integral.delta > config.delta_factor * threshold {
            outcome.verdict = Verdict::Inconclusive;
            return Ok(outcome);
        }
        if deviation > threshold {
            outcome.verdict = Verdict::PolesDetected;
            return Ok(outcome);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::from_fn;
    use crate::seed::rng_from_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(r: f64) -> Contour {
        Contour::new(c(0.0, 0.0), r).unwrap()
    }

    fn reciprocal() -> impl AnalyticFunction {
        from_fn("1/(1+z)", |z: Complex64| 1.0 / (1.0 + z))
    }

    #[test]
    fn wavenumber_respects_radius_bound() {
        let mut rng = rng_from_seed(1);
        for r in [0.01, 0.5, 1.0, 7.0, 1000.0] {
            for _ in 0..1000 {
                let k = sample_wavenumber(&mut rng, &circle(r));
                assert!(k.norm() * r <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn wavenumber_is_deterministic() {
        let a = sample_wavenumber(&mut rng_from_seed(42), &circle(1.0));
        let b = sample_wavenumber(&mut rng_from_seed(42), &circle(1.0));
        assert_eq!(a, b);
    }

    #[test]
    fn wavenumber_second_moment() {
        // Uniform on the unit disk: E|k|² = 1/2.
        let mut rng = rng_from_seed(2024);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| sample_wavenumber(&mut rng, &circle(1.0)).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn small_circle_has_no_poles() {
        let out = test_contour(&reciprocal(), circle(0.5), &PoleTestConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::NoPolesDetected);
        assert_eq!(out.samples.len(), 3);
        assert!(out.samples.iter().all(|s| s.deviation <= out.threshold));
    }

    #[test]
    fn large_circle_detects_the_pole() {
        let out = test_contour(&reciprocal(), circle(2.0), &PoleTestConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::PolesDetected);
        assert!(out.max_deviation > out.threshold);
        // Early exit after the first exceedance.
        assert_eq!(out.samples.len(), 1);
    }

    #[test]
    fn contour_through_unresolved_region_is_inconclusive() {
        let out = test_contour(&reciprocal(), circle(0.999), &PoleTestConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Inconclusive);
        assert!(out.max_delta() > 0.1 * out.threshold);
    }

    #[test]
    fn node_on_pole_is_inconclusive() {
        let config = PoleTestConfig {
            n_points: 8,
            ..Default::default()
        };
        let f = from_fn("1/(1-z)", |z: Complex64| 1.0 / (1.0 - z));
        let out = test_contour(&f, circle(1.0), &config).unwrap();
        assert_eq!(out.verdict, Verdict::Inconclusive);
        assert!(matches!(
            out.diagnostic,
            Some(Diagnostic::EvaluationFailed { index: 0, .. })
        ));
    }

    #[test]
    fn center_must_be_finite() {
        let f = from_fn("1/z", |z: Complex64| 1.0 / z);
        assert!(matches!(
            test_contour(&f, circle(1.0), &PoleTestConfig::default()),
            Err(PoleTestError::CenterNotFinite(_))
        ));
    }

    #[test]
    fn zero_function_passes() {
        let f = from_fn("0", |_| c(0.0, 0.0));
        let out = test_contour(&f, circle(3.0), &PoleTestConfig::default()).unwrap();
        assert_eq!(out.verdict, Verdict::NoPolesDetected);
        assert_eq!(out.threshold, 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = [
            PoleTestConfig {
                samples: 0,
                ..Default::default()
            },
            PoleTestConfig {
                n_points: 101,
                ..Default::default()
            },
            PoleTestConfig {
                n_points: 2,
                ..Default::default()
            },
            PoleTestConfig {
                epsilon: 0.0,
                ..Default::default()
            },
            PoleTestConfig {
                epsilon: 1.0,
                ..Default::default()
            },
            PoleTestConfig {
                delta_factor: 0.0,
                ..Default::default()
            },
        ];
        for config in bad {
            assert!(matches!(
                config.validate(),
                Err(PoleTestError::InvalidConfig(_))
            ));
        }
        assert!(PoleTestConfig::default().validate().is_ok());
    }
}
