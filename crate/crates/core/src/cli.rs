//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or parse errors, 2 when evaluation
//! fails (for example the function is not finite at the expansion point).
//! Sweep rows computed before a failing grid point are written and flushed
//! before exiting.

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::corpus::{self, format_complex};
use crate::error_model::{measure_rates, ErrorModelError, RateReport, TrialFamily};
use crate::expr::{parse_complex, ExpressionFunction};
use crate::pole_test::{test_contour, PoleTestConfig, PoleTestError, PoleTestOutcome};
use crate::quadrature::Contour;
use crate::search::{search_radius, RadiusBounds, SearchConfig, SearchError, SearchStatus};
use crate::seed::derive_seed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EVALUATION: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Test a single contour for poles.
    Test,
    /// Bracket the radius of convergence about z0.
    Bound,
    /// Run the built-in reference table.
    Corpus,
    /// Bounds along a line of expansion points (CSV).
    #[value(name = "sweep-z0")]
    SweepZ0,
    /// Bound tightness against node count (CSV).
    #[value(name = "sweep-n")]
    SweepN,
    /// Monte Carlo error rates (CSV).
    Rates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Two enclosed poles cancelling at k = 0; reports the false-negative rate.
    Cancellation,
    /// Random entire functions; reports the false-positive rate.
    Entire,
}

#[derive(Debug, Parser)]
#[command(
    name = "convradius",
    version,
    about = "Detect poles inside circles and bound the radius of convergence of complex functions"
)]
pub struct Cli {
    /// What to run; may also be given with --mode.
    #[arg(value_enum, value_name = "MODE")]
    pub mode_positional: Option<Mode>,
    #[arg(long = "mode", value_enum, hide_possible_values = true)]
    pub mode: Option<Mode>,
    /// Function of z, e.g. "1/(1+z)" or "cos(1/z)".
    #[arg(long)]
    pub expr: Option<String>,
    /// Expansion point / contour center, e.g. "0", "i", "2+3i".
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z0: String,
    /// Contour radius (test mode) or largest trial radius (rates mode).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Probe wavenumbers per contour (M).
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    /// Trapezoid nodes per integral (N).
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Relative detection threshold.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Bisection stops once U - L falls to this width.
    #[arg(long, default_value_t = 0.0)]
    pub tolerance: f64,
    /// Largest radius tried while expanding.
    #[arg(long, default_value_t = 1024.0)]
    pub limit: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Endpoints of the expansion-point line, "a..b" (sweep-z0).
    #[arg(long, allow_hyphen_values = true)]
    pub z0_grid: Option<String>,
    /// Node-count range "lo..hi", log-spaced (sweep-n).
    #[arg(long)]
    pub n_grid: Option<String>,
    /// Grid size for sweeps [default: 50 for sweep-z0, 5 for sweep-n].
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Monte Carlo trials (rates).
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = Family::Cancellation)]
    pub family: Family,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: table for test/bound/corpus, csv otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Validated description of one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub mode: Mode,
    pub expression: Option<String>,
    pub z0: Complex64,
    pub radius: Option<f64>,
    pub search: SearchConfig,
    pub z0_grid: Option<(Complex64, Complex64)>,
    pub n_grid: Option<(f64, f64)>,
    pub grid_points: usize,
    pub trials: usize,
    pub family: Family,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn parse_range<T>(
    text: &str,
    flag: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<(T, T), UsageError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| usage(format!("--{flag} must look like \"a..b\", got `{text}`")))?;
    let lo = parse(a.trim()).ok_or_else(|| usage(format!("--{flag}: cannot parse `{a}`")))?;
    let hi = parse(b.trim()).ok_or_else(|| usage(format!("--{flag}: cannot parse `{b}`")))?;
    Ok((lo, hi))
}

impl RunSpec {
    pub fn from_cli(cli: Cli) -> Result<Self, UsageError> {
        let mode = match (cli.mode_positional, cli.mode) {
            (Some(a), Some(b)) if a != b => {
                return Err(usage(
                    "conflicting modes given positionally and with --mode",
                ))
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => {
                return Err(usage(
                    "no mode given (test, bound, corpus, sweep-z0, sweep-n, rates)",
                ))
            }
        };
        let z0 = parse_complex(&cli.z0).map_err(|e| usage(format!("--z0: {e}")))?;
        let pole_test = PoleTestConfig {
            samples: cli.samples,
            n_points: cli.points,
            epsilon: cli.epsilon,
            rng_seed: cli.seed,
            ..Default::default()
        };
        let search = SearchConfig {
            limit: cli.limit,
            tolerance: cli.tolerance,
            pole_test,
            rng_seed: cli.seed,
        };
        search.validate().map_err(|e| usage(e.to_string()))?;

        let needs_expr = !matches!(mode, Mode::Corpus | Mode::Rates);
        if needs_expr && cli.expr.is_none() {
            return Err(usage(format!("--expr is required for {mode:?} mode")));
        }
        if let Some(r) = cli.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(usage(format!(
                    "--radius must be positive and finite, got {r}"
                )));
            }
        }
        if mode == Mode::Test && cli.radius.is_none() {
            return Err(usage("--radius is required for test mode"));
        }

        let z0_grid = match (&cli.z0_grid, mode) {
            (Some(text), _) => Some(parse_range(text, "z0-grid", |s| parse_complex(s).ok())?),
            (None, Mode::SweepZ0) => return Err(usage("--z0-grid is required for sweep-z0 mode")),
            (None, _) => None,
        };
        let n_grid = match (&cli.n_grid, mode) {
            (Some(text), _) => {
                let (lo, hi) = parse_range(text, "n-grid", |s| s.parse::<f64>().ok())?;
                if !(lo >= 4.0 && hi >= lo && hi.is_finite()) {
                    return Err(usage("--n-grid needs 4 <= lo <= hi"));
                }
                Some((lo, hi))
            }
            (None, Mode::SweepN) => return Err(usage("--n-grid is required for sweep-n mode")),
            (None, _) => None,
        };
        let grid_points = cli.grid_points.unwrap_or(match mode {
            Mode::SweepN => 5,
            _ => 50,
        });
        if grid_points == 0 {
            return Err(usage("--grid-points must be at least 1"));
        }
        let format = cli.format.unwrap_or(match mode {
            Mode::Test | Mode::Bound | Mode::Corpus => Format::Table,
            _ => Format::Csv,
        });
        Ok(Self {
            mode,
            expression: cli.expr,
            z0,
            radius: cli.radius,
            search,
            z0_grid,
            n_grid,
            grid_points,
            trials: cli.trials,
            family: cli.family,
            seed: cli.seed,
            format,
            out: cli.out,
        })
    }

    fn function(&self) -> Result<ExpressionFunction, UsageError> {
        let text = self.expression.as_deref().unwrap_or_default();
        ExpressionFunction::parse(text).map_err(|e| usage(format!("--expr: {e}")))
    }
}

/// Points `lo + (hi - lo) t` for `t` evenly spaced in `[0, 1]`.
pub fn linear_grid(lo: Complex64, hi: Complex64, points: usize) -> Vec<Complex64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * (i as f64 / (points - 1) as f64))
        .collect()
}

/// Log-spaced node counts between `lo` and `hi`, each rounded to the nearest
/// even integer (at least 4).
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<usize> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            let t = if points == 1 {
                0.0
            } else {
                i as f64 / (points - 1) as f64
            };
            let n = (a + (b - a) * t).exp();
            (((n / 2.0).round() as usize) * 2).max(4)
        })
        .collect()
}

enum RunError {
    Usage(UsageError),
    Evaluation(String),
    Io(io::Error),
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Io(e.into())
    }
}

impl From<UsageError> for RunError {
    fn from(e: UsageError) -> Self {
        RunError::Usage(e)
    }
}

fn center_not_finite(z: Complex64) -> RunError {
    RunError::Evaluation(format!(
        "function value at z0 = {} is not finite",
        format_complex(z)
    ))
}

impl From<SearchError> for RunError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::CenterNotFinite(z) => center_not_finite(z),
            SearchError::InvalidConfig(msg) => RunError::Usage(UsageError(msg)),
        }
    }
}

impl From<PoleTestError> for RunError {
    fn from(e: PoleTestError) -> Self {
        match e {
            PoleTestError::CenterNotFinite(z) => center_not_finite(z),
            PoleTestError::InvalidConfig(msg) => RunError::Usage(UsageError(msg)),
        }
    }
}

impl From<ErrorModelError> for RunError {
    fn from(e: ErrorModelError) -> Self {
        match e {
            ErrorModelError::PoleTest(inner) => inner.into(),
            other => RunError::Usage(UsageError(other.to_string())),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Rows of strings rendered either as CSV or as a padded text table.
struct Sink<'a> {
    format: Format,
    out: &'a mut dyn Write,
    widths: Vec<usize>,
}

impl<'a> Sink<'a> {
    fn new(
        format: Format,
        out: &'a mut dyn Write,
        header: &[&str],
        widths: &[usize],
    ) -> io::Result<Self> {
        let mut sink = Self {
            format,
            out,
            widths: widths.to_vec(),
        };
        sink.row(header.iter().map(|s| s.to_string()).collect())?;
        Ok(sink)
    }

    fn row(&mut self, fields: Vec<String>) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&fields)?;
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                self.out.write_all(&bytes)?;
            }
            Format::Table => {
                let mut line = String::new();
                for (i, field) in fields.iter().enumerate() {
                    let width = self.widths.get(i).copied().unwrap_or(0);
                    if i > 0 {
                        line.push_str("  ");
                    }
                    line.push_str(&format!("{field:<width$}"));
                }
                writeln!(self.out, "{}", line.trim_end())?;
            }
        }
        self.out.flush()
    }
}

/// Parses `args` and runs. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match RunSpec::from_cli(cli) {
        Ok(spec) => run(&spec, stdout, stderr),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Executes `spec`, writing results to `--out` when given and to `stdout`
/// otherwise. Returns the process exit code.
pub fn run(spec: &RunSpec, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &spec.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(file) => {
                let mut file = io::BufWriter::new(file);
                let r = dispatch(spec, &mut file);
                let flushed = file.flush();
                r.and(flushed.map_err(RunError::Io))
            }
            Err(e) => Err(RunError::Io(e)),
        },
        None => dispatch(spec, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(RunError::Usage(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(RunError::Evaluation(msg)) => {
            let _ = writeln!(stderr, "evaluation error: {msg}");
            EXIT_EVALUATION
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(stderr, "i/o error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    match spec.mode {
        Mode::Test => run_test(spec, out),
        Mode::Bound => run_bound(spec, out),
        Mode::Corpus => run_corpus(spec, out),
        Mode::SweepZ0 => run_sweep_z0(spec, out),
        Mode::SweepN => run_sweep_n(spec, out),
        Mode::Rates => run_rates(spec, out),
    }
}

fn run_test(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let f = spec.function()?;
    let radius = spec.radius.expect("validated");
    let contour = Contour::new(spec.z0, radius).map_err(|e| usage(e.to_string()))?;
    let outcome: PoleTestOutcome = test_contour(&f, contour, &spec.search.pole_test)?;
    if spec.format == Format::Table {
        writeln!(out, "function      {}", f.source())?;
        writeln!(
            out,
            "contour       |z - {}| = {}",
            format_complex(spec.z0),
            radius
        )?;
        writeln!(out, "verdict       {}", outcome.verdict)?;
        writeln!(out, "threshold T   {:e}", outcome.threshold)?;
        writeln!(out, "max deviation {:e}", outcome.max_deviation)?;
        if let Some(d) = &outcome.diagnostic {
            writeln!(out, "diagnostic    {d:?}")?;
        }
        writeln!(out)?;
    }
    let mut sink = Sink::new(
        spec.format,
        out,
        &["sample", "k", "deviation", "delta"],
        &[6, 44, 24, 24],
    )?;
    for (i, s) in outcome.samples.iter().enumerate() {
        sink.row(vec![
            (i + 1).to_string(),
            format_complex(s.k),
            format!("{:e}", s.deviation),
            format!("{:e}", s.delta),
        ])?;
    }
    Ok(())
}

fn describe_bounds(b: &RadiusBounds) -> String {
    match b.status {
        SearchStatus::NoPoleWithinLimit => "no pole within limit; bounds (0, inf)".to_string(),
        status => format!("bounds ({}, {}) {}", b.lower, b.upper, status),
    }
}

fn run_bound(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let f = spec.function()?;
    let bounds = search_radius(&f, spec.z0, &spec.search)?;
    match spec.format {
        Format::Table => {
            writeln!(out, "function  {}", f.source())?;
            writeln!(out, "z0        {}", format_complex(spec.z0))?;
            writeln!(out, "{}", describe_bounds(&bounds))?;
            writeln!(out, "tests     {}", bounds.iterations)?;
            writeln!(out)?;
            let mut sink = Sink::new(
                Format::Table,
                out,
                &["step", "phase", "radius", "verdict", "lower", "upper"],
                &[4, 9, 22, 17, 22, 22],
            )?;
            for (i, t) in bounds.transcript.iter().enumerate() {
                sink.row(vec![
                    (i + 1).to_string(),
                    format!("{:?}", t.phase).to_lowercase(),
                    num(t.radius),
                    t.verdict.to_string(),
                    num(t.lower),
                    num(t.upper),
                ])?;
            }
        }
        Format::Csv => {
            let mut sink = Sink::new(
                Format::Csv,
                out,
                &["expression", "z0", "lower", "upper", "status", "iterations"],
                &[],
            )?;
            sink.row(vec![
                f.source().to_string(),
                format_complex(spec.z0),
                num(bounds.lower),
                num(bounds.upper),
                bounds.status.to_string(),
                bounds.iterations.to_string(),
            ])?;
        }
    }
    Ok(())
}

fn run_corpus(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let rows = corpus::table();
    let results: Vec<Result<RadiusBounds, SearchError>> = rows
        .par_iter()
        .map(|entry| {
            let config = SearchConfig {
                rng_seed: derive_seed(spec.seed, entry.row as u64),
                ..spec.search
            };
            search_radius(&entry.function(), entry.z0, &config)
        })
        .collect();
    let (header, widths): (&[&str], &[usize]) = match spec.format {
        Format::Csv => (
            &[
                "name",
                "z0",
                "r_paper",
                "r_derived",
                "lower",
                "upper",
                "status",
            ],
            &[],
        ),
        Format::Table => (
            &[
                "function",
                "z0",
                "r_paper",
                "r_derived",
                "lower",
                "upper",
                "status",
                "published_lower",
                "published_upper",
            ],
            &[18, 5, 20, 20, 20, 20, 20, 11, 11],
        ),
    };
    let mut sink = Sink::new(spec.format, out, header, widths)?;
    for (entry, result) in rows.iter().zip(results) {
        let b = result?;
        let mut fields = vec![
            entry.expression.to_string(),
            entry.z0_label(),
            num(entry.published_radius),
            num(entry.derived_radius()),
            num(b.lower),
            num(b.upper),
            b.status.to_string(),
        ];
        if spec.format == Format::Table {
            fields.push(num(entry.published_bounds.0));
            fields.push(num(entry.published_bounds.1));
        }
        sink.row(fields)?;
    }
    Ok(())
}

fn run_sweep_z0(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let f = spec.function()?;
    let (lo, hi) = spec.z0_grid.expect("validated");
    let grid = linear_grid(lo, hi, spec.grid_points);
    let results: Vec<Result<RadiusBounds, SearchError>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &z0)| {
            let config = SearchConfig {
                rng_seed: derive_seed(spec.seed, i as u64),
                ..spec.search
            };
            search_radius(&f, z0, &config)
        })
        .collect();
    let mut sink = Sink::new(
        spec.format,
        out,
        &["z0_re", "z0_im", "lower", "upper", "status"],
        &[22, 22, 22, 22, 20],
    )?;
    for (z0, result) in grid.iter().zip(results) {
        let b = result?;
        sink.row(vec![
            num(z0.re),
            num(z0.im),
            num(b.lower),
            num(b.upper),
            b.status.to_string(),
        ])?;
    }
    Ok(())
}

fn run_sweep_n(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let f = spec.function()?;
    let (lo, hi) = spec.n_grid.expect("validated");
    let grid = log_grid(lo, hi, spec.grid_points);
    let results: Vec<Result<RadiusBounds, SearchError>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut config = SearchConfig {
                rng_seed: derive_seed(spec.seed, i as u64),
                ..spec.search
            };
            config.pole_test.n_points = n;
            search_radius(&f, spec.z0, &config)
        })
        .collect();
    let mut sink = Sink::new(
        spec.format,
        out,
        &["n_points", "lower", "upper", "tightness"],
        &[10, 22, 22, 22],
    )?;
    for (n, result) in grid.iter().zip(results) {
        let b = result?;
        sink.row(vec![
            n.to_string(),
            num(b.lower),
            num(b.upper),
            num(b.tightness()),
        ])?;
    }
    Ok(())
}

fn rate_fields(report: &RateReport) -> Vec<String> {
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    vec![
        opt(report.predicted),
        opt(report.measured()),
        report.trials.to_string(),
        opt(report.standard_error()),
    ]
}

fn run_rates(spec: &RunSpec, out: &mut dyn Write) -> Result<(), RunError> {
    let family = match spec.family {
        Family::Cancellation => TrialFamily::TwoPoleCancellation {
            contour: Contour::new(spec.z0, spec.radius.unwrap_or(1.0))
                .map_err(|e| usage(e.to_string()))?,
        },
        Family::Entire => TrialFamily::Entire {
            center: spec.z0,
            max_radius: spec.radius.unwrap_or(10.0),
        },
    };
    let report = measure_rates(&family, &spec.search.pole_test, spec.trials, spec.seed)?;
    let mut sink = Sink::new(
        spec.format,
        out,
        &["predicted", "measured", "trials", "stderr"],
        &[24, 24, 8, 24],
    )?;
    sink.row(rate_fields(&report))?;
    Ok(())
}
