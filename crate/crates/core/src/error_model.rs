//! Predicted and measured error rates of the pole test.
//!
//! The closed forms are rough: they treat the probe vector
//! `A(k) = (e^{ik w_1}, e^{ik w_2}, ...)` as uniformly distributed and ask how
//! often it is nearly perpendicular to the residue vector. The Monte Carlo
//! harness measures the actual rates on two families:
//!
//! * two enclosed poles whose contributions cancel exactly for `k = 0`, the
//!   hardest case for the test (false negatives);
//! * entire functions, where every detection is a false positive.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::function::{from_fn, AnalyticFunction};
use crate::oracle::{OraclePole, RationalOracle};
use crate::pole_test::{test_contour, PoleTestConfig, PoleTestError, Verdict};
use crate::quadrature::Contour;
use crate::seed;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ErrorModelError {
    #[error("the detection model needs at least two poles, got {0}")]
    TooFewPoles(usize),
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    PoleTest(#[from] PoleTestError),
}

fn check_epsilon(epsilon: f64) -> Result<(), ErrorModelError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(ErrorModelError::InvalidEpsilon(epsilon))
    }
}

/// Probability that one probe exposes `n_poles` enclosed poles at relative
/// threshold `epsilon`. Two poles are the hardest case and use their own form.
pub fn p_detect(epsilon: f64, n_poles: usize) -> Result<f64, ErrorModelError> {
    if n_poles < 2 {
        return Err(ErrorModelError::TooFewPoles(n_poles));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(ErrorModelError::InvalidEpsilon(epsilon));
    }
    let p = if n_poles == 2 {
        1.0 - epsilon / TAU
    } else {
        1.0 - 2.0 * PI.sqrt() * epsilon / (2.0 * n_poles as f64 - 3.0)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// `(ε / 2π)^M`, the rough false-negative rate after `M` probes.
pub fn p_false_negative(epsilon: f64, samples: usize) -> Result<f64, ErrorModelError> {
    check_epsilon(epsilon)?;
    Ok((epsilon / TAU).powi(samples as i32))
}

/// Randomized function families for [`measure_rates`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialFamily {
    /// `c·w_1/(z - z_1) - c·w_2/(z - z_2)` with `w_j = z_j - z0`, `|c| = 1`
    /// and `z_1, z_2` uniform in the disk of radius `0.9·r` about `z0`.
    /// The residue terms of the mean-value integral are `c e^{ik w_1}` and
    /// `-c e^{ik w_2}`, which cancel at `k = 0`.
    TwoPoleCancellation { contour: Contour },
    /// Random polynomials of degree at most 8 and exponentials `e^{a(z-z0)}`
    /// with `|a| ≤ 1`, tested on circles about `z0` of radius uniform in
    /// `[0.5, max_radius]`.
    Entire { center: Complex64, max_radius: f64 },
}

impl TrialFamily {
    /// Which verdict counts as an error for this family.
    pub fn error_verdict(&self) -> Verdict {
        match self {
            TrialFamily::TwoPoleCancellation { .. } => Verdict::NoPolesDetected,
            TrialFamily::Entire { .. } => Verdict::PolesDetected,
        }
    }
}

/// Uniform point in the disk of radius `radius` about the origin.
fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen::<f64>() * TAU)
}

/// Builds the two-pole cancellation function for one trial.
pub fn cancellation_instance<R: Rng>(rng: &mut R, contour: &Contour) -> RationalOracle {
    let z0 = contour.center();
    let w1 = uniform_in_disk(rng, 0.9 * contour.radius());
    let mut w2 = uniform_in_disk(rng, 0.9 * contour.radius());
    while w2 == w1 {
        w2 = uniform_in_disk(rng, 0.9 * contour.radius());
    }
    let scale = Complex64::from_polar(1.0, rng.gen::<f64>() * TAU);
    RationalOracle::new(
        "two-pole cancellation",
        vec![
            OraclePole::simple(z0 + w1, scale * w1),
            OraclePole::simple(z0 + w2, -scale * w2),
        ],
        Vec::new(),
    )
    .expect("distinct finite poles")
}

fn entire_instance<R: Rng>(rng: &mut R, center: Complex64) -> Box<dyn AnalyticFunction> {
    if rng.gen_bool(0.5) {
        let degree = rng.gen_range(0..=8usize);
        let coefficients: Vec<Complex64> =
            (0..=degree).map(|_| uniform_in_disk(rng, 1.0)).collect();
        Box::new(from_fn("random polynomial", move |z: Complex64| {
            let u = z - center;
            coefficients
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
        }))
    } else {
        let a = uniform_in_disk(rng, 1.0);
        Box::new(from_fn("random exponential", move |z: Complex64| {
            (a * (z - center)).exp()
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    /// Closed-form prediction, when one exists for the family.
    pub predicted: Option<f64>,
    pub trials: usize,
    /// Trials whose verdict was the family's error verdict.
    pub errors: usize,
    pub inconclusive: usize,
}

impl RateReport {
    /// Fraction of trials that erred; `None` for an empty report.
    pub fn measured(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.errors as f64 / self.trials as f64)
    }

    /// Binomial standard error `sqrt(p(1-p)/n)` of [`measured`](Self::measured).
    pub fn standard_error(&self) -> Option<f64> {
        self.measured()
            .map(|p| (p * (1.0 - p) / self.trials as f64).sqrt())
    }
}

/// Runs `trials` independent pole tests on random members of `family`.
/// Trial `t` uses streams derived from `(seed, t)`, so the result does not
/// depend on thread scheduling.
pub fn measure_rates(
    family: &TrialFamily,
    config: &PoleTestConfig,
    trials: usize,
    seed: u64,
) -> Result<RateReport, ErrorModelError> {
    config.validate()?;
    let predicted = match family {
        TrialFamily::TwoPoleCancellation { .. } => {
            Some(p_false_negative(config.epsilon, config.samples)?)
        }
        TrialFamily::Entire { .. } => None,
    };
    if let TrialFamily::Entire { max_radius, .. } = family {
        if !(*max_radius >= 0.5 && max_radius.is_finite()) {
            return Err(PoleTestError::InvalidConfig(format!(
                "max_radius must be finite and at least 0.5, got {max_radius}"
            ))
            .into());
        }
    }

    let verdicts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::stream(seed, t as u64);
            let trial_config = PoleTestConfig {
                rng_seed: rng.gen(),
                ..*config
            };
            match family {
                TrialFamily::TwoPoleCancellation { contour } => {
                    let f = cancellation_instance(&mut rng, contour);
                    test_contour(&f, *contour, &trial_config).map(|o| o.verdict)
                }
                TrialFamily::Entire { center, max_radius } => {
                    let radius = rng.gen_range(0.5..=*max_radius);
                    let f = entire_instance(&mut rng, *center);
                    let contour = Contour::new(*center, radius)
                        .map_err(|e| PoleTestError::InvalidConfig(e.to_string()))?;
                    test_contour(&f, contour, &trial_config).map(|o| o.verdict)
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let target = family.error_verdict();
    Ok(RateReport {
        predicted,
        trials,
        errors: verdicts.iter().filter(|&&v| v == target).count(),
        inconclusive: verdicts
            .iter()
            .filter(|&&v| v == Verdict::Inconclusive)
            .count(),
    })
}
