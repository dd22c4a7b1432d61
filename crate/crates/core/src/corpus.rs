//! Reference test functions with closed-form singularity locations.
//!
//! Each entry pairs an expression and expansion point with the exact
//! distance to the nearest singularity. Where the published radius for a
//! row disagrees with that geometry, the published value is kept alongside.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::expr::ExpressionFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    SimplePoles,
    Essential,
    HighOrderStructure,
    Entire,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    /// 1-based row number.
    pub row: usize,
    pub expression: &'static str,
    pub z0: Complex64,
    /// Radius as published for this row.
    pub published_radius: f64,
    /// Published (lower, upper) bracket.
    pub published_bounds: (f64, f64),
    pub singularities: Vec<Complex64>,
    pub kind: SingularityKind,
}

impl CorpusEntry {
    /// Exact distance from `z0` to the nearest singularity (infinite if none).
    pub fn derived_radius(&self) -> f64 {
        self.singularities
            .iter()
            .map(|s| (s - self.z0).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn function(&self) -> ExpressionFunction {
        ExpressionFunction::parse(self.expression).expect("corpus expressions parse")
    }

    /// True when the published radius disagrees with the singularity geometry.
    pub fn published_radius_conflicts(&self) -> bool {
        let derived = self.derived_radius();
        if derived.is_infinite() || self.published_radius.is_infinite() {
            return derived.is_infinite() != self.published_radius.is_infinite();
        }
        (derived - self.published_radius).abs() > 1e-3 * derived
    }

    pub fn z0_label(&self) -> String {
        format_complex(self.z0)
    }
}

/// Compact `a+bi` rendering used in tables and CSV.
pub fn format_complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format!("{}", z.re),
        (true, false) if z.im == 1.0 => "i".to_string(),
        (true, false) if z.im == -1.0 => "-i".to_string(),
        (true, false) => format!("{}i", z.im),
        (false, false) => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{}{}i", z.re, sign, z.im.abs())
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The eleven reference rows.
pub fn table() -> Vec<CorpusEntry> {
    let minus_one = vec![c(-1.0, 0.0)];
    let plus_minus_one = vec![c(-1.0, 0.0), c(1.0, 0.0)];
    let twelfth_roots_of_minus_one: Vec<Complex64> = (0..12)
        .map(|m| Complex64::from_polar(1.0, PI * (2 * m + 1) as f64 / 12.0))
        .collect();
    let row = |row, expression, z0, published_radius, published_bounds, singularities, kind| {
        CorpusEntry {
            row,
            expression,
            z0,
            published_radius,
            published_bounds,
            singularities,
            kind,
        }
    };
    use SingularityKind::*;
    vec![
        row(
            1,
            "1/(1+z)",
            c(0.0, 0.0),
            1.0,
            (0.984, 1.023),
            minus_one.clone(),
            SimplePoles,
        ),
        row(
            2,
            "1/(1+z)",
            c(2.0, 0.0),
            3.0,
            (2.913, 3.059),
            minus_one.clone(),
            SimplePoles,
        ),
        row(
            3,
            "1/(1+z)",
            c(-1.1, 0.0),
            0.1,
            (0.0959, 0.102),
            minus_one.clone(),
            SimplePoles,
        ),
        row(
            4,
            "1/(1+z)",
            c(0.0, 1.0),
            2f64.sqrt(),
            (1.394, 1.416),
            minus_one.clone(),
            SimplePoles,
        ),
        row(
            5,
            "1/(1+z)+1/(1-z)",
            c(0.0, 0.0),
            1.0,
            (0.806, 1.209),
            plus_minus_one.clone(),
            SimplePoles,
        ),
        row(
            6,
            "10^2+1/(1+z)",
            c(0.0, 0.0),
            1.0,
            (0.923, 1.077),
            minus_one.clone(),
            SimplePoles,
        ),
        row(
            7,
            "1/(1+z)+2/(1-z^2)",
            c(0.0, 0.0),
            FRAC_1_SQRT_2,
            (0.683, 0.716),
            plus_minus_one,
            SimplePoles,
        ),
        row(
            8,
            "exp(1/(1+z))",
            c(0.0, 0.0),
            1.0,
            (0.900, 1.050),
            minus_one,
            Essential,
        ),
        row(
            9,
            "z",
            c(0.0, 0.0),
            f64::INFINITY,
            (0.0, f64::INFINITY),
            Vec::new(),
            Entire,
        ),
        row(
            10,
            "cos(1/z)",
            c(0.0, 1.0),
            1.0,
            (0.659, 1.318),
            vec![c(0.0, 0.0)],
            Essential,
        ),
        row(
            11,
            "z^8/(z^12+1)",
            c(4.0, 0.0),
            5.0,
            (2.877, 5.755),
            twelfth_roots_of_minus_one,
            HighOrderStructure,
        ),
    ]
}
