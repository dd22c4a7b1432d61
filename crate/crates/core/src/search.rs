//! Bracketing the radius of convergence.
//!
//! The search keeps a confirmed pole-free radius `L` and a confirmed
//! pole-containing radius `U`. It starts from a random radius in `[0.5, 1.5]`,
//! doubles it until a test detects poles (or the limit is passed), then bisects.
//! An inconclusive test, which usually means the contour runs close to a
//! singularity, halts the search with the bracket confirmed so far.

use num_complex::Complex64;
use rand::Rng;

use crate::function::AnalyticFunction;
use crate::pole_test::{test_contour, PoleTestConfig, PoleTestError, Verdict};
use crate::quadrature::Contour;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Largest radius the expansion phase will test.
    pub limit: f64,
    /// Bisection stops once `U - L <= tolerance`. Zero means run until a test
    /// is inconclusive or the bracket reaches floating-point resolution.
    pub tolerance: f64,
    /// Per-contour settings. Its `rng_seed` is replaced by a seed derived
    /// from `rng_seed` below and the test index.
    pub pole_test: PoleTestConfig,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            limit: 1024.0,
            tolerance: 0.0,
            pole_test: PoleTestConfig::default(),
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.limit > 0.0 && self.limit.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "limit must be positive and finite, got {}",
                self.limit
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(SearchError::InvalidConfig(format!(
                "tolerance must be non-negative and finite, got {}",
                self.tolerance
            )));
        }
        self.pole_test.validate().map_err(SearchError::from)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("function value at {0} is not finite")]
    CenterNotFinite(Complex64),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

impl From<PoleTestError> for SearchError {
    fn from(err: PoleTestError) -> Self {
        match err {
            PoleTestError::CenterNotFinite(z) => SearchError::CenterNotFinite(z),
            PoleTestError::InvalidConfig(msg) => SearchError::InvalidConfig(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    /// Bisection reached the tolerance or floating-point resolution.
    Converged,
    /// A contour test was inconclusive.
    HaltedInconclusive,
    /// Every radius up to the limit passed; bounds are `(0, ∞)`.
    NoPoleWithinLimit,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Converged => "converged",
            SearchStatus::HaltedInconclusive => "halted-inconclusive",
            SearchStatus::NoPoleWithinLimit => "no-pole-within-limit",
        }
    }
}

impl std::fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Expansion,
    Bisection,
}

/// One contour test and the confirmed bracket after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranscriptEntry {
    pub phase: Phase,
    pub radius: f64,
    pub verdict: Verdict,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusBounds {
    pub lower: f64,
    /// `f64::INFINITY` when no pole-containing radius was confirmed.
    pub upper: f64,
    pub status: SearchStatus,
    /// Number of contour tests performed.
    pub iterations: usize,
    pub transcript: Vec<TranscriptEntry>,
}

impl RadiusBounds {
    /// `U / L`; infinite when `L = 0` or `U = ∞`.
    pub fn ratio(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else {
            f64::INFINITY
        }
    }

    /// `U / L - 1`.
    pub fn tightness(&self) -> f64 {
        self.ratio() - 1.0
    }

    pub fn contains(&self, radius: f64) -> bool {
        self.lower < radius && radius < self.upper
    }
}

/// True when `upper - lower` is below four units in the last place of `upper`.
fn at_resolution(lower: f64, upper: f64) -> bool {
    let ulp = f64::from_bits(upper.to_bits() + 1) - upper;
    upper - lower < 4.0 * ulp
}

/// Brackets the distance from `z0` to the nearest singularity of `f`.
pub fn search_radius<F: AnalyticFunction + ?Sized>(
    f: &F,
    z0: Complex64,
    config: &SearchConfig,
) -> Result<RadiusBounds, SearchError> {
    config.validate()?;
    if f.eval(z0).is_err() {
        return Err(SearchError::CenterNotFinite(z0));
    }
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return Err(SearchError::InvalidConfig("center must be finite".into()));
    }

    let mut lower = 0.0_f64;
    let mut upper = f64::INFINITY;
    let mut transcript = Vec::new();

    let mut test =
        |phase: Phase, radius: f64, lower: f64, upper: f64| -> Result<Verdict, SearchError> {
            let index = transcript.len() as u64 + 1;
            let pole_test = PoleTestConfig {
                rng_seed: seed::derive_seed(config.rng_seed, index),
                ..config.pole_test
            };
            let contour =
                Contour::new(z0, radius).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
            let verdict = test_contour(f, contour, &pole_test)?.verdict;
            let (lower, upper) = match verdict {
                Verdict::NoPolesDetected => (radius, upper),
                Verdict::PolesDetected => (lower, radius),
                Verdict::Inconclusive => (lower, upper),
            };
            transcript.push(TranscriptEntry {
                phase,
                radius,
                verdict,
                lower,
                upper,
            });
            Ok(verdict)
        };

    let finish = |lower, upper, status, transcript: Vec<TranscriptEntry>| RadiusBounds {
        lower,
        upper,
        status,
        iterations: transcript.len(),
        transcript,
    };

    // Expansion.
    let mut radius = seed::stream(config.rng_seed, 0)
        .gen_range(0.5f64..=1.5)
        .min(config.limit);
    loop {
        match test(Phase::Expansion, radius, lower, upper)? {
            Verdict::NoPolesDetected => {
                lower = radius;
                radius *= 2.0;
                if radius > config.limit {
                    return Ok(finish(
                        0.0,
                        f64::INFINITY,
                        SearchStatus::NoPoleWithinLimit,
                        transcript,
                    ));
                }
            }
            Verdict::PolesDetected => {
                upper = radius;
                break;
            }
            Verdict::Inconclusive => {
                return Ok(finish(
                    lower,
                    upper,
                    SearchStatus::HaltedInconclusive,
                    transcript,
                ));
            }
        }
    }

    // Bisection.
    let mut status = SearchStatus::Converged;
    while upper - lower > config.tolerance && !at_resolution(lower, upper) {
        let mid = 0.5 * (lower + upper);
        if mid <= lower || mid >= upper {
            break;
        }
        match test(Phase::Bisection, mid, lower, upper)? {
            Verdict::NoPolesDetected => lower = mid,
            Verdict::PolesDetected => upper = mid,
            Verdict::Inconclusive => {
                status = SearchStatus::HaltedInconclusive;
                break;
            }
        }
    }
    Ok(finish(lower, upper, status, transcript))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::from_fn;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reciprocal() -> impl AnalyticFunction {
        from_fn("1/(1+z)", |z: Complex64| 1.0 / (1.0 + z))
    }

    #[test]
    fn brackets_unit_distance() {
        let b = search_radius(&reciprocal(), c(0.0, 0.0), &SearchConfig::default()).unwrap();
        assert!(b.lower <= 1.0 && 1.0 <= b.upper, "{b:?}");
        assert!(b.lower > 0.9 && b.upper < 1.1, "{b:?}");
        assert_eq!(b.iterations, b.transcript.len());
    }

    #[test]
    fn brackets_sqrt_two_from_i() {
        let b = search_radius(&reciprocal(), c(0.0, 1.0), &SearchConfig::default()).unwrap();
        assert!(b.contains(2f64.sqrt()), "{b:?}");
    }

    #[test]
    fn entire_function_has_no_pole_within_limit() {
        let f = from_fn("z", |z| z);
        let b = search_radius(&f, c(0.0, 0.0), &SearchConfig::default()).unwrap();
        assert_eq!(b.status, SearchStatus::NoPoleWithinLimit);
        assert_eq!((b.lower, b.upper), (0.0, f64::INFINITY));
        assert!(b.transcript.iter().all(|t| t.radius <= 1024.0));
    }

    #[test]
    fn tolerance_stops_bisection() {
        let config = SearchConfig {
            tolerance: 0.25,
            ..Default::default()
        };
        let b = search_radius(&reciprocal(), c(0.0, 0.0), &config).unwrap();
        assert_eq!(b.status, SearchStatus::Converged);
        assert!(b.upper - b.lower <= 0.25);
        assert!(b.contains(1.0));
    }

    #[test]
    fn deterministic() {
        let config = SearchConfig {
            rng_seed: 99,
            ..Default::default()
        };
        let a = search_radius(&reciprocal(), c(2.0, 0.0), &config).unwrap();
        let b = search_radius(&reciprocal(), c(2.0, 0.0), &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn center_on_pole_is_an_error() {
        assert_eq!(
            search_radius(&reciprocal(), c(-1.0, 0.0), &SearchConfig::default()),
            Err(SearchError::CenterNotFinite(c(-1.0, 0.0)))
        );
    }

    #[test]
    fn invalid_config() {
        for config in [
            SearchConfig {
                limit: 0.0,
                ..Default::default()
            },
            SearchConfig {
                tolerance: -1.0,
                ..Default::default()
            },
            SearchConfig {
                pole_test: PoleTestConfig {
                    samples: 0,
                    ..Default::default()
                },
                ..Default::default()
            },
        ] {
            assert!(matches!(
                search_radius(&reciprocal(), c(0.0, 0.0), &config),
                Err(SearchError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn resolution_guard() {
        assert!(at_resolution(1.0, 1.0 + f64::EPSILON));
        assert!(!at_resolution(1.0, 1.0 + 1e-10));
    }
}
