//! Command-line front end: `sample`, `verify`, `eigencurves`, `separate`.
//!
//! Exit codes: 0 success, 1 evaluation or check failure, 2 usage error.

mod grid;
mod sample;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

pub use grid::{AxisRange, GridSpec, DEFAULT_T1, DEFAULT_T2};
pub use sample::{format_f64, parse_f64, to_json, write_csv, Case, SamplePoint, Sampler};

use crate::algebra::{eigencurves_with, fiber_vector_test, separation_exponent};
use crate::error::Error;
use crate::exec::Execution;
use crate::specfun::{AdaptiveOptions, DEFAULT_SMAX};
use crate::verify::{run_suite, Suite, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "polybergman", version, about = "Spectral matrix functions of nilpotent Toeplitz operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a spectral function on a grid and write CSV or JSON.
    Sample(SampleArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
    /// Tabulate eigenvalue curves of phi+ and their diagonalizers.
    Eigencurves(EigencurveArgs),
    /// Compare two interior points and, optionally, two state vectors.
    Separate(SeparateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Specfun,
    Spectral,
    Algebra,
    All,
}

#[derive(Debug, Args)]
struct Common {
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Evaluate grid points one at a time.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn quad(&self) -> Result<AdaptiveOptions, Error> {
        if !(self.tol > 0.0) {
            return Err(Error::Parse(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(AdaptiveOptions { tol: self.tol, ..AdaptiveOptions::default() })
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    case: Case,
    /// Symbol in the mini-language, e.g. `sigmoid`, `pc:witch+2*chi+`, `b:ind01`.
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// `t1=<min>:<max>:<count>[,t2=<min>:<max>:<count>[:log]]`.
    #[arg(long)]
    grid: Option<String>,
    /// Add the boundary strata (implied when --grid is omitted).
    #[arg(long)]
    include_boundary: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
    /// Node count of the fixed quadrature rules.
    #[arg(long, default_value_t = 200)]
    nodes: usize,
    /// Truncation of the composite rule.
    #[arg(long, default_value_t = DEFAULT_SMAX)]
    smax: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EigencurveArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// `t1=<min>:<max>:<count>`; `-inf` and `+inf` rows are always added.
    #[arg(long, default_value = "t1=-4:4:41")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Diagonalizer output; defaults to `<out>.basis.csv` when --out is set.
    #[arg(long)]
    basis_out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct SeparateArgs {
    /// First point `x1,x2`.
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Second point `t1,t2`.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// State vector entries `re` or `re:im`, comma-separated; normalized.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Vector length; defaults to the length of --v.
    #[arg(long)]
    n: Option<usize>,
    /// Grid of tent centres `min:max:count` for the vector test.
    #[arg(long, default_value = "-3:3:25", allow_hyphen_values = true)]
    r_grid: String,
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let res = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Eigencurves(a) => cmd_eigencurves(a),
        Command::Separate(a) => cmd_separate(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Domain(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("write failed: {e}"))
}

fn cmd_sample(a: SampleArgs) -> Result<i32, Error> {
    let quad = a.common.quad()?;
    let sampler = Sampler::new(a.case, a.symbol.as_deref(), a.n, quad)?;
    let grid = match &a.grid {
        Some(g) => GridSpec::parse(g, a.include_boundary)?,
        None => GridSpec::default(),
    };
    if a.include_boundary && !a.case.has_boundary() {
        return Err(Error::Parse(format!("case {} has no boundary evaluation", a.case.name())));
    }
    let pts = sampler.points(&grid);
    let mats = sampler.eval_all(&pts, a.common.exec())?;
    let mut out = open_out(a.out.as_deref())?;
    match a.format {
        Format::Csv => write_csv(&mut out, &pts, &mats).map_err(io_err)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &to_json(&sampler, &grid, &pts, &mats)).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, Error> {
    let suite = match a.suite {
        SuiteArg::Specfun => Suite::Specfun,
        SuiteArg::Spectral => Suite::Spectral,
        SuiteArg::Algebra => Suite::Algebra,
        SuiteArg::All => Suite::All,
    };
    if a.nodes < 8 || !(a.smax > 0.0) {
        return Err(Error::Parse("--nodes must be at least 8 and --smax positive".into()));
    }
    let opts = VerifyOptions { quad: a.common.quad()?, exec: a.common.exec(), nodes: a.nodes, smax: a.smax };
    let report = run_suite(suite, opts);
    let mut out = open_out(a.out.as_deref())?;
    match a.format {
        TextFormat::Text => write!(out, "{}", report.to_text()).map_err(io_err)?,
        TextFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(if report.verdict { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_eigencurves(a: EigencurveArgs) -> Result<i32, Error> {
    crate::specfun::check_n(a.n).map_err(|e| Error::Parse(e.to_string()))?;
    let grid = GridSpec::parse(&a.grid, false)?;
    if a.grid.contains("t2=") {
        return Err(Error::Parse("eigencurves takes only a t1 range".into()));
    }
    if grid.t1.count < 2 {
        return Err(Error::Parse("eigencurves needs at least two grid points".into()));
    }
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let table = eigencurves_with(a.n, &grid.t1.values(), exec)?;

    let mut out = open_out(a.out.as_deref())?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(["t", "j", "lambda"]).map_err(io_err)?;
    for (k, &t) in table.grid.iter().enumerate() {
        for j in 0..a.n {
            w.write_record([format_f64(t), (j + 1).to_string(), format_f64(table.lambdas[k][j])]).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    drop(w);
    out.flush().map_err(io_err)?;

    let basis_path = a.basis_out.clone().or_else(|| {
        a.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".basis.csv");
            PathBuf::from(s)
        })
    });
    if let Some(path) = basis_path {
        let mut w = csv::Writer::from_path(&path).map_err(io_err)?;
        w.write_record(["t", "row", "col", "value"]).map_err(io_err)?;
        for (k, &t) in table.grid.iter().enumerate() {
            let b = &table.diagonalizers[k];
            for r in 0..a.n {
                for c in 0..a.n {
                    w.write_record([format_f64(t), (r + 1).to_string(), (c + 1).to_string(), format_f64(b[(r, c)])])
                        .map_err(io_err)?;
                }
            }
        }
        w.flush().map_err(io_err)?;
    }
    if table.reorderings > 0 {
        eprintln!(
            "note: {} adjacent columns matched out of ascending order (continuity defect {:e})",
            table.reorderings, table.continuity_defect
        );
    }
    Ok(EXIT_OK)
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), Error> {
    let bad = || Error::Parse(format!("{what} must be two comma-separated numbers, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = a.trim().parse().map_err(|_| bad())?;
    let y: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((x, y))
}

fn parse_vector(s: &str) -> Result<Vec<Complex64>, Error> {
    let v = s
        .split(',')
        .map(|e| {
            let e = e.trim();
            let (re, im) = e.split_once(':').unwrap_or((e, "0"));
            match (re.parse::<f64>(), im.parse::<f64>()) {
                (Ok(re), Ok(im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
                _ => Err(Error::Parse(format!("bad vector entry {e:?}"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Parse("state vector must be nonzero".into()));
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

fn cmd_separate(a: SeparateArgs) -> Result<i32, Error> {
    let p = parse_pair(&a.p, "--p")?;
    let q = parse_pair(&a.q, "--q")?;
    let e = separation_exponent(p, q).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out = io::stdout().lock();
    let verdict = if e.separable { "separable" } else { "not separable" };
    writeln!(out, "{verdict}, c2={} c1={} c0={}", e.c2, e.c1, e.c0).map_err(io_err)?;

    match (&a.v, &a.w) {
        (None, None) => {}
        (Some(v), Some(w)) => {
            let v = parse_vector(v)?;
            let w = parse_vector(w)?;
            let n = a.n.unwrap_or(v.len());
            if v.len() != n || w.len() != n {
                return Err(Error::Parse(format!("--v and --w must both have length {n}")));
            }
            let range = grid::GridSpec::parse(&format!("t1={}", a.r_grid), false)?.t1;
            let t = fiber_vector_test(n, &v, &w, p.0, p.1, &range.values()).map_err(|e| Error::Parse(e.to_string()))?;
            let verdict = if t.coincide { "states coincide" } else { "states differ" };
            writeln!(out, "{verdict} at ({}, {}): modulus gap {:e}, phase gap {:e}", p.0, p.1, t.modulus_gap, t.product_gap)
                .map_err(io_err)?;
        }
        _ => return Err(Error::Parse("--v and --w must be given together".into())),
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_parse_and_normalize() {
        let v = parse_vector("3,0:4").unwrap();
        assert_eq!(v, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        assert!(parse_vector("0,0").is_err());
        assert!(parse_vector("1,x").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_from(["polybergman", "sample", "--case", "nope"]), EXIT_USAGE);
        assert_eq!(run_from(["polybergman", "sample", "--case", "phi-a", "--symbol", "bogus"]), EXIT_USAGE);
        assert_eq!(run_from(["polybergman", "separate", "--p", "1", "--q", "1,1"]), EXIT_USAGE);
        assert_eq!(run_from(["polybergman", "eigencurves", "--grid", "t1=0:1:1"]), EXIT_USAGE);
    }
}
