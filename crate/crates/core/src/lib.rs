//! Pole detection on circular contours and radius-of-convergence bounds for
//! black-box analytic functions.
//!
//! The core question is whether a circle `|z - z0| = r` encloses any poles of
//! `f`. If it does not, the mean-value identity
//! `f(z0) = (1/2πi) ∮ f(z) h(z) / (z - z0) dz` holds for every entire `h` with
//! `h(z0) = 1`; [`pole_test::test_contour`] checks it for a few random
//! `h_k(z) = e^{ik(z-z0)}` using the trapezoid rule. [`search::search_radius`]
//! wraps the test in an expanding bisection to bracket the distance from `z0`
//! to the nearest singularity.
//!
//! ```
//! use convradius::expr::ExpressionFunction;
//! use convradius::search::{search_radius, SearchConfig};
//! use num_complex::Complex64;
//!
//! let f = ExpressionFunction::parse("1/(1+z)").unwrap();
//! let bounds = search_radius(&f, Complex64::new(0.0, 0.0), &SearchConfig::default()).unwrap();
//! assert!(bounds.lower < 1.0 && 1.0 < bounds.upper);
//! ```

pub mod cli;
pub mod corpus;
pub mod error_model;
pub mod expr;
pub mod function;
pub mod oracle;
pub mod pole_test;
pub mod quadrature;
pub mod search;
pub mod seed;

pub use function::{AnalyticFunction, NonFinite};
pub use num_complex::Complex64;
