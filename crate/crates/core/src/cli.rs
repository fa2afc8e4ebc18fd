//! The `hcs` command line.
//!
//! Exit codes: 0 success, 1 a verification case failed, 2 invalid
//! parameters, 3 numerical failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{
    amplitude_closed, overlap, overlap_quadrature, quasiclassical_ratio, relative_phase, series_amplitude,
    CoherentState, LambdaPair, SeriesOptions,
};
use crate::error::{Error, Result};
use crate::geometry::{parse_complex, CVec3, ParabolicPoint};
use crate::observables::{expect_r, fit_ellipse, trajectory, KMTheta};
use crate::quadrature::RuleOrders;
use crate::verify::{self, limit_points, phase_reference, suite_rng, Suite, VerifyConfig, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hcs", version, about = "Hydrogen-atom coherent states: amplitudes, trajectories and self-checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized amplitude on a grid of points.
    Amplitude(AmplitudeArgs),
    /// Parabolic-basis series against the closed form on a grid.
    SeriesCheck(SeriesCheckArgs),
    /// ⟨x⟩ over one period of fictitious time, with an ellipse fit.
    Trajectory(TrajectoryArgs),
    /// Run seeded verification suites and report each case.
    Verify(VerifyArgs),
    /// Flatness and ⟨r⟩ approaching the plane-wave limit.
    Limit(LimitArgs),
    /// Overlap of two coherent states, closed form and quadrature.
    Overlap(OverlapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AmplitudeArgs {
    /// Complex 3-vector, e.g. `0.1+0.2i,0,-0.3i`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_cvec)]
    pub u: CVec3,
    /// `axis:start:stop:count`, comma-joined; missing axes are fixed at 0.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Grid,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SeriesCheckArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex_arg)]
    pub lambda1: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex_arg)]
    pub lambda2: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Grid,
    /// Bound on the discarded series tail.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_n: u32,
    #[arg(long, default_value_t = 200)]
    pub max_abs_m: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real3)]
    pub k: [f64; 3],
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real3)]
    pub m: [f64; 3],
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta0: f64,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override every case tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fock-space cutoff for the commutator suite.
    #[arg(long, default_value_t = 8)]
    pub cutoff: u32,
    /// Quadrature orders `n_s,n_t,n_phi`.
    #[arg(long, default_value = "48,48,64", value_parser = parse_orders)]
    pub orders: RuleOrders,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    /// Real unit vector.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real3)]
    pub q: [f64; 3],
    /// Comma-separated values in (0, 1).
    #[arg(long, value_delimiter = ',')]
    pub rho_list: Vec<f64>,
    /// Seed for the sample points in the unit ball.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_cvec)]
    pub u: CVec3,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_cvec)]
    pub v: CVec3,
    #[arg(long, default_value = "48,48,64", value_parser = parse_orders)]
    pub orders: RuleOrders,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_cvec(s: &str) -> std::result::Result<CVec3, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn parse_real3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        let v: f64 = p.trim().parse().map_err(|_| format!("malformed number `{p}`"))?;
        *o = v;
        if !v.is_finite() {
            return Err(format!("non-finite component `{p}`"));
        }
    }
    Ok(out)
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_orders(s: &str) -> std::result::Result<RuleOrders, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One axis of a grid: `count` evenly spaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    const FIXED: Axis = Axis {
        start: 0.0,
        stop: 0.0,
        count: 1,
    };

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x: Axis,
    pub y: Axis,
    pub z: Axis,
}

impl Grid {
    /// Points with `z` outermost and `x` innermost.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let (xs, ys, zs) = (self.x.values(), self.y.values(), self.z.values());
        let mut out = Vec::with_capacity(xs.len() * ys.len() * zs.len());
        for &z in &zs {
            for &y in &ys {
                for &x in &xs {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let mut axes: [Option<Axis>; 3] = [None; 3];
    for part in s.split(',') {
        let fields: Vec<&str> = part.trim().split(':').collect();
        let [name, start, stop, count] = fields[..] else {
            return Err(format!("grid axis `{part}` is not axis:start:stop:count"));
        };
        let slot = match name {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => return Err(format!("unknown grid axis `{name}`")),
        };
        if axes[slot].is_some() {
            return Err(format!("grid axis `{name}` given twice"));
        }
        let num = |t: &str| -> std::result::Result<f64, String> {
            let v: f64 = t.parse().map_err(|_| format!("malformed number `{t}` in grid"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite value `{t}` in grid"))
            }
        };
        let count: usize = count.parse().map_err(|_| format!("malformed count `{count}` in grid"))?;
        if count == 0 {
            return Err(format!("grid axis `{name}` has zero points"));
        }
        axes[slot] = Some(Axis {
            start: num(start)?,
            stop: num(stop)?,
            count,
        });
    }
    let [x, y, z] = axes.map(|a| a.unwrap_or(Axis::FIXED));
    Ok(Grid { x, y, z })
}

/// `printf("%.17g")`.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column-named rows, rendered as CSV or JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub schema_version: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        Table {
            schema_version: SCHEMA_VERSION,
            columns,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_g17(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => to_json(self),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::InvalidArgument(format!("cannot write output: {e}")))
        }
    }
}

fn amplitude_cmd(args: &AmplitudeArgs) -> Result<i32> {
    let state = CoherentState::new(args.u)?;
    let rows = args
        .grid
        .points()
        .par_iter()
        .map(|&[x, y, z]| {
            let a = state.amplitude(&ParabolicPoint::from_cartesian(x, y, z));
            vec![x, y, z, a.re, a.im, a.norm()]
        })
        .collect();
    let table = Table::new(vec!["x", "y", "z", "re", "im", "abs"], rows);
    emit(&table.render(args.output.format), args.output.out.as_deref())?;
    Ok(EXIT_OK)
}

fn series_check_cmd(args: &SeriesCheckArgs) -> Result<i32> {
    let lp = LambdaPair::new(args.lambda1, args.lambda2);
    let opts = SeriesOptions {
        tol: args.tol,
        max_n: args.max_n,
        max_abs_m: args.max_abs_m,
    };
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", opts.tol)));
    }
    let reference = phase_reference();
    let phase = relative_phase(series_amplitude(&lp, &reference, &opts)?, amplitude_closed(&lp, &reference)?)?;
    let rows: Result<Vec<Vec<f64>>> = args
        .grid
        .points()
        .par_iter()
        .map(|&[x, y, z]| {
            let p = ParabolicPoint::from_cartesian(x, y, z);
            let s = series_amplitude(&lp, &p, &opts)? * phase;
            let c = amplitude_closed(&lp, &p)?;
            Ok(vec![x, y, z, s.re, s.im, c.re, c.im, (s - c).norm()])
        })
        .collect();
    let table = Table::new(
        vec!["x", "y", "z", "series_re", "series_im", "closed_re", "closed_im", "abs_diff"],
        rows?,
    );
    emit(&table.render(args.output.format), args.output.out.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct EllipseSummary {
    schema_version: &'static str,
    semi_axes: [f64; 2],
    a: [f64; 3],
    b: [f64; 3],
    residual: f64,
}

fn trajectory_cmd(args: &TrajectoryArgs) -> Result<i32> {
    let start = KMTheta::new(args.k, args.m, args.theta0)?;
    let samples = trajectory(&start, args.samples)?;
    let fit = fit_ellipse(&samples)?;
    let rows = samples
        .iter()
        .map(|s| vec![s.theta, s.position[0], s.position[1], s.position[2]])
        .collect();
    let table = Table::new(vec!["theta", "x", "y", "z"], rows);
    let (major, minor) = fit.semi_axes();
    let summary = to_json(&EllipseSummary {
        schema_version: SCHEMA_VERSION,
        semi_axes: [major, minor],
        a: fit.a,
        b: fit.b,
        residual: fit.residual,
    });
    match args.output.out.as_deref() {
        Some(path) => {
            emit(&table.render(args.output.format), Some(path))?;
            emit(&summary, Some(&path.with_extension("json")))?;
        }
        None => {
            emit(&table.render(args.output.format), None)?;
            eprint!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

fn verify_cmd(args: &VerifyArgs) -> Result<i32> {
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
        }
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        tol: args.tol,
        orders: args.orders,
        cutoff: args.cutoff,
    };
    let report = verify::run(args.suite, &cfg);
    emit(&to_json(&report), args.out.as_deref())?;
    for case in report.cases.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {} {}: {:e} (tolerance {:e})", case.suite, case.case, case.value, case.tolerance);
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn limit_cmd(args: &LimitArgs) -> Result<i32> {
    if args.rho_list.is_empty() {
        return Err(Error::InvalidArgument("--rho-list is empty".into()));
    }
    let points = limit_points(&mut suite_rng(args.seed, Suite::Limit));
    let rows: Result<Vec<Vec<f64>>> = args
        .rho_list
        .iter()
        .map(|&rho| {
            let flatness = quasiclassical_ratio(&args.q, rho, &points)?;
            let u = CVec3::from_real(args.q).scale(Complex64::new(rho, 0.0));
            Ok(vec![rho, flatness, expect_r(&u)?])
        })
        .collect();
    let table = Table::new(vec!["rho", "flatness", "expect_r"], rows?);
    emit(&table.render(args.output.format), args.output.out.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct OverlapReport {
    schema_version: &'static str,
    re: f64,
    im: f64,
    abs: f64,
    quadrature_abs: f64,
    rel_err: f64,
}

fn overlap_cmd(args: &OverlapArgs) -> Result<i32> {
    let exact = overlap(&args.u, &args.v)?;
    let quad = overlap_quadrature(&args.u, &args.v, args.orders)?;
    let report = OverlapReport {
        schema_version: SCHEMA_VERSION,
        re: exact.re,
        im: exact.im,
        abs: exact.norm(),
        quadrature_abs: quad.norm(),
        rel_err: (exact - quad).norm() / exact.norm(),
    };
    emit(&to_json(&report), args.out.as_deref())?;
    Ok(EXIT_OK)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("HCS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("HCS_THREADS must be a positive integer, got `{value}`")))?;
    // A pool may already exist when called twice in one process; the first setting wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<i32> {
    configure_threads()?;
    match &cli.command {
        Command::Amplitude(a) => amplitude_cmd(a),
        Command::SeriesCheck(a) => series_check_cmd(a),
        Command::Trajectory(a) => trajectory_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Limit(a) => limit_cmd(a),
        Command::Overlap(a) => overlap_cmd(a),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hcs: {e}");
            exit_code(&e)
        }
    }
}
