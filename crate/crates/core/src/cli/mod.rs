//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 invalid input, 3 numerical guard.

mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::geometry::{self, sample_cone, sample_cone_in, SampleMode};
use crate::kempf::{tm, EvalPoint, KeplerParams, Method};
use crate::numeric::rel_diff;
use crate::obstruction::obstruction_matrix;
use crate::tyz::{remainder_decay_fit, tyz_coefficients};
use crate::verify::{self, VerifyOptions};
use crate::{ratio, Complex, Rational};

pub use output::{RunConfig, OUT_DIR_ENV};
use output::{csv_bytes, decimal, resolve, write_file};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::internal(format!("{}: {e}", path.display()))
    }

    fn csv(e: csv::Error) -> Self {
        CliError::internal(format!("csv output failed: {e}"))
    }

    fn internal(message: String) -> Self {
        CliError { code: EXIT_INVARIANT, message }
    }

    fn invalid(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() {
            EXIT_VALIDATION
        } else if e.is_numerical_guard() {
            EXIT_GUARD
        } else {
            EXIT_INVARIANT
        };
        CliError { code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Closed,
    Both,
}

/// `a:b` or `a:b:step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MRange {
    pub lo: u32,
    pub hi: u32,
    pub step: u32,
}

impl MRange {
    pub fn values(&self) -> Vec<u32> {
        (self.lo..=self.hi).step_by(self.step as usize).collect()
    }
}

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad m value {t:?}: {e}"));
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("expected a:b or a:b:step, got {s:?}")),
        };
        if lo == 0 || hi <= lo || step == 0 {
            return Err(format!("need 1 <= a < b and step >= 1, got {s:?}"));
        }
        Ok(MRange { lo, hi, step })
    }
}

/// `a,b` index pair for the hidden Γ corruption switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaIndex(pub usize, pub usize);

impl FromStr for GammaIndex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected L,J, got {s:?}"))?;
        let p = |t: &str| t.trim().parse::<usize>().map_err(|e| e.to_string());
        Ok(GammaIndex(p(a)?, p(b)?))
    }
}

#[derive(Debug, Parser)]
#[command(name = "kepler-tyz", version, about = "Kempf distortion and TYZ expansion on the Kepler manifold")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact expansion coefficients b_j, p_j, r_j.
    Coeffs {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate T_m at one point.
    Eval {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remainder of the finite expansion over a range of m, with a decay fit.
    RemainderScan {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        rho: f64,
        /// Range `a:b` or `a:b:step`.
        #[arg(long)]
        m: MRange,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Obstruction-term magnitudes on sampled cone points.
    Obstruction {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Comma-separated list of m.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
        m: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample points of the isotropic cone.
    Sample {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "orthopair")]
        mode: SampleMode,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite and write the errata report.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        corrupt_gamma: Option<GammaIndex>,
    },
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Coeffs { n, format, out } => cmd_coeffs(n, format, out.as_deref()),
        Command::Eval { n, m, rho, method, out } => cmd_eval(n, m, rho, method, out.as_deref()),
        Command::RemainderScan { n, rho, m, out } => cmd_remainder_scan(n, rho, &m, out.as_deref()),
        Command::Obstruction { n, m, seed, count, out } => cmd_obstruction(n, &m, seed, count, out.as_deref()),
        Command::Sample { n, count, seed, mode, format, out } => cmd_sample(n, count, seed, mode, format, out.as_deref()),
        Command::Verify { out, corrupt_gamma } => cmd_verify(out.as_deref(), corrupt_gamma),
    }
}

fn format_name(f: Format) -> String {
    match f {
        Format::Csv => "csv".into(),
        Format::Json => "json".into(),
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Serialize)]
struct CoeffsJson {
    n: u32,
    b: Vec<String>,
    p: Vec<String>,
    r: Vec<String>,
    b_decimal: Vec<String>,
    p_decimal: Vec<String>,
    r_decimal: Vec<String>,
    a1_check: bool,
}

pub fn cmd_coeffs(n: u32, format: Format, out: Option<&Path>) -> Result<i32, CliError> {
    KeplerParams::new(n)?;
    let e = tyz_coefficients(n)?;
    // a_1 ρ = 2 b_1 must equal (n-2)(n-1)/2.
    let a1_check = e.a_scaled(1) == ratio(((n - 2) * (n - 1)) as i64, 2) && e.a_scaled(0) == ratio(1, 1);

    let mut config = RunConfig::new("coeffs");
    config.n = Some(n);
    config.format = Some(format_name(format));

    let strings = |v: &[Rational]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>();
    let decimals = |v: &[Rational]| v.iter().map(|q| decimal(to_f64(q))).collect::<Vec<_>>();
    let bytes = match format {
        Format::Json => {
            let doc = CoeffsJson {
                n,
                b: strings(&e.b),
                p: strings(&e.p),
                r: strings(&e.r),
                b_decimal: decimals(&e.b),
                p_decimal: decimals(&e.p),
                r_decimal: decimals(&e.r),
                a1_check,
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, list) in [("b", &e.b), ("p", &e.p), ("r", &e.r)] {
                for (j, q) in list.iter().enumerate() {
                    let check = match (name, j) {
                        ("b", 0) | ("b", 1) => a1_check.to_string(),
                        _ => String::new(),
                    };
                    rows.push(vec![name.to_string(), j.to_string(), q.to_string(), decimal(to_f64(q)), check]);
                }
            }
            csv_bytes(&["series", "j", "exact", "decimal", "a1_check"], &rows, &config)?
        }
    };
    let ext = if format == Format::Json { "json" } else { "csv" };
    if let Some(path) = resolve(out, &format!("coeffs_n{n}.{ext}"), true) {
        write_file(&path, &bytes)?;
    }
    for (name, list) in [("b", &e.b), ("p", &e.p), ("r", &e.r)] {
        let shown: Vec<String> = if list.iter().all(Zero::is_zero) && name == "r" {
            vec!["0".into()]
        } else {
            strings(list)
        };
        println!("{name}: {}", shown.join(", "));
    }
    if !a1_check {
        eprintln!("a_1 identity failed for n = {n}");
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}

pub fn cmd_eval(n: u32, m: u32, rho: f64, method: MethodArg, out: Option<&Path>) -> Result<i32, CliError> {
    KeplerParams::new(n)?;
    let point = EvalPoint::new(m, rho)?;
    let mut config = RunConfig::new("eval");
    config.n = Some(n);
    config.m = Some(vec![m]);
    config.rho = Some(rho);

    let mut rows = Vec::new();
    match method {
        MethodArg::Series | MethodArg::Closed => {
            let which = if method == MethodArg::Series { Method::Series } else { Method::Closed };
            let v = tm(n, point.m(), point.rho(), which)?;
            let label = if method == MethodArg::Series { "series" } else { "closed" };
            config.method = Some(label.into());
            println!("T_m = {}", decimal(v));
            rows.push(vec![label.to_string(), decimal(v), String::new()]);
        }
        MethodArg::Both => {
            config.method = Some("both".into());
            let s = tm(n, point.m(), point.rho(), Method::Series)?;
            let c = tm(n, point.m(), point.rho(), Method::Closed)?;
            let d = rel_diff(s, c);
            println!("series = {}", decimal(s));
            println!("closed = {}", decimal(c));
            println!("rel_diff = {d:.3e}");
            rows.push(vec!["series".into(), decimal(s), decimal(d)]);
            rows.push(vec!["closed".into(), decimal(c), decimal(d)]);
        }
    }
    if let Some(path) = resolve(out, &format!("eval_n{n}_m{m}.csv"), false) {
        write_file(&path, &csv_bytes(&["method", "value", "rel_diff"], &rows, &config)?)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_remainder_scan(n: u32, rho: f64, range: &MRange, out: Option<&Path>) -> Result<i32, CliError> {
    KeplerParams::new(n)?;
    EvalPoint::new(range.lo, rho)?;
    if range.hi < 4 * range.lo {
        return Err(CliError::invalid(format!(
            "need m_max/m_min >= 4, got {}:{}",
            range.lo, range.hi
        )));
    }
    let ms = range.values();
    let fit = remainder_decay_fit(n, rho, &ms)?;
    let mut config = RunConfig::new("remainder-scan");
    config.n = Some(n);
    config.rho = Some(rho);
    config.m = Some(ms);

    let rows: Vec<Vec<String>> = fit
        .samples
        .iter()
        .map(|s| {
            vec![
                s.m.to_string(),
                decimal(s.tm),
                decimal(s.truncated),
                decimal(s.remainder),
                decimal(s.remainder.abs().ln()),
            ]
        })
        .collect();
    if let Some(path) = resolve(out, &format!("remainder_n{n}.csv"), true) {
        let header = ["m", "T_m", "truncated", "remainder", "ln_abs_remainder"];
        write_file(&path, &csv_bytes(&header, &rows, &config)?)?;
    }
    println!("slope = {:.6}", fit.slope);
    println!("expected = {:.6}", -2.0 * rho);
    println!("c0 = {}", decimal(fit.c0));
    println!("bound_ok = {}", fit.bound_ok);
    Ok(EXIT_OK)
}

struct ObstructionRow {
    m: u32,
    point: usize,
    norm: f64,
    max_abs: f64,
    normalized: f64,
    doubled_ratio: f64,
    hermitian_residual: f64,
}

/// `|z|` range of the obstruction scan.
pub const OBSTRUCTION_NORM_RANGE: (f64, f64) = (1.0, 5.0);

pub fn cmd_obstruction(n: u32, ms: &[u32], seed: u64, count: usize, out: Option<&Path>) -> Result<i32, CliError> {
    KeplerParams::new(n)?;
    if ms.is_empty() || ms.contains(&0) {
        return Err(CliError::invalid("need a nonempty list of m >= 1"));
    }
    let s2 = std::f64::consts::SQRT_2;
    let range = (OBSTRUCTION_NORM_RANGE.0 / s2, OBSTRUCTION_NORM_RANGE.1 / s2);
    let points = sample_cone_in(n as usize, count, seed, SampleMode::Orthopair, range)?;

    let cells: Vec<(u32, usize)> = ms.iter().flat_map(|&m| (0..points.len()).map(move |i| (m, i))).collect();
    let rows = cells
        .par_iter()
        .map(|&(m, i)| -> crate::Result<ObstructionRow> {
            let z = &points[i].z;
            let mat = obstruction_matrix(n, m, z)?;
            let z2: Vec<Complex> = z.iter().map(|w| w * 2.0).collect();
            let doubled = obstruction_matrix(n, m, &z2)?;
            let u = points[i].norm();
            Ok(ObstructionRow {
                m,
                point: i,
                norm: u,
                max_abs: mat.max_abs,
                normalized: (m as f64).powi(2) * u.powi(3) * mat.max_abs,
                doubled_ratio: mat.max_abs / doubled.max_abs,
                hermitian_residual: mat.hermitian_residual,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let mut config = RunConfig::new("obstruction");
    config.n = Some(n);
    config.m = Some(ms.to_vec());
    config.seed = Some(seed);
    config.count = Some(count);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                r.point.to_string(),
                decimal(r.norm),
                decimal(r.max_abs),
                decimal(r.normalized),
                decimal(r.doubled_ratio),
                decimal(r.hermitian_residual),
            ]
        })
        .collect();
    if let Some(path) = resolve(out, &format!("obstruction_n{n}.csv"), true) {
        let header = ["m", "point", "norm", "max_abs", "normalized", "z_doubling_ratio", "hermitian_residual"];
        write_file(&path, &csv_bytes(&header, &table, &config)?)?;
    }

    let per_m = |k: usize| &rows[k * points.len()..(k + 1) * points.len()];
    let mean = |v: &mut dyn Iterator<Item = f64>| {
        let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
        s / c as f64
    };
    for k in 0..ms.len() {
        let block = per_m(k);
        let norm_mean = mean(&mut block.iter().map(|r| r.normalized));
        let zr = mean(&mut block.iter().map(|r| r.doubled_ratio));
        print!("m = {}: mean m^2|z|^3 max|E| = {}, mean |z|-doubling ratio = {:.6}", ms[k], decimal(norm_mean), zr);
        if k > 0 {
            let ratio = mean(&mut per_m(k - 1).iter().zip(block).map(|(a, b)| a.max_abs / b.max_abs));
            let q = ms[k] as f64 / ms[k - 1] as f64;
            print!(", m-scaling ratio = {:.6} (expected {:.1})", ratio, q * q);
        }
        println!();
    }
    let herm = rows.iter().map(|r| r.hermitian_residual).fold(0.0, f64::max);
    println!("max hermitian residual = {herm:.3e}");
    Ok(EXIT_OK)
}

pub fn cmd_sample(n: u32, count: usize, seed: u64, mode: SampleMode, format: Format, out: Option<&Path>) -> Result<i32, CliError> {
    let points = sample_cone(n as usize, count, seed, mode)?;
    let mut config = RunConfig::new("sample");
    config.n = Some(n);
    config.count = Some(count);
    config.seed = Some(seed);
    config.mode = Some(match mode {
        SampleMode::Orthopair => "orthopair".into(),
        SampleMode::Chart => "chart".into(),
    });
    config.format = Some(format_name(format));
    let (bytes, ext) = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            geometry::write_csv(&points, &mut buf)?;
            buf.extend_from_slice(config.metadata_line().as_bytes());
            (buf, "csv")
        }
        Format::Json => {
            let mut s = geometry::to_json(&points)?;
            s.push('\n');
            (s.into_bytes(), "json")
        }
    };
    if let Some(path) = resolve(out, &format!("cone_n{n}.{ext}"), true) {
        write_file(&path, &bytes)?;
        println!("wrote {} points to {}", points.len(), path.display());
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(out: Option<&Path>, corrupt: Option<GammaIndex>) -> Result<i32, CliError> {
    let report = verify::run(&VerifyOptions {
        corrupt_gamma: corrupt.map(|GammaIndex(l, j)| (l, j)),
    });
    let mut json = serde_json::to_string_pretty(&report).map_err(|e| CliError::internal(e.to_string()))?;
    json.push('\n');
    if let Some(path) = resolve(out, "errata_report.json", true) {
        write_file(&path, json.as_bytes())?;
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    for e in &report.errata {
        let ok = e.status == verify::Status::Reconciled;
        println!("{} {}: {}", if ok { "ok  " } else { "FAIL" }, e.id, e.detail);
    }
    if report.all_passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed invariants: {}", report.failed_checks().join(", "));
        Ok(EXIT_INVARIANT)
    }
}
