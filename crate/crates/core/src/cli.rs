//! Command-line front end.
//!
//! Exit codes: 0 when the requested check passes, 1 when it fails, 2 for usage
//! or configuration errors, 3 for runtime errors.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{Algebra, HyperNum, ImaginaryUnit, SlicePoint};
use crate::battery::verify_paper;
use crate::differential::CertifyConfig;
use crate::error::{Error, Result};
use crate::logroot::{logarithm, nth_root, principal_log, principal_nthroot};
use crate::manifolds::{sphere_transition, sphere_transition_composed, ChartParams, ManifoldChart, Pole};
use crate::parallel::Execution;
use crate::sampling::{random_hypernum, random_unit, rng, PointRanges};

#[derive(Debug, Parser)]
#[command(name = "hyperslice", version, about = "Slice conformality audits for quaternionic and octonionic manifolds")]
pub struct Cli {
    /// Run on a single thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a chart: points, values and Jacobians.
    Sample(SampleArgs),
    /// Audit the conformality class of a chart at random points.
    Audit(AuditArgs),
    /// Check the slice-conformal-curve theorem hypotheses for a stem.
    Certify(CertifyArgs),
    /// Principal logarithm of stdin points (or L(q, p) for 2·dim numbers).
    Log(LogArgs),
    /// Principal n-th root of stdin points (or Rₙ(q, s) for 2·dim numbers).
    Root(RootArgs),
    /// Check the sphere atlas transition against 1/q.
    Transition(TransitionArgs),
    /// Run the reproduction battery and print a pass/fail table.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PoleArg {
    North,
    South,
}

#[derive(Debug, Clone, Args)]
pub struct ChartArgs {
    /// Chart name: sphere, sphere-north, sphere-south, helicoid, catenoid,
    /// deformation, nroot, log, psi or graph:<expr>.
    #[arg(long, conflicts_with = "expr")]
    pub chart: Option<String>,
    /// Stem expression, e.g. "(sinh(x)*cos(y) + iota*sinh(x)*sin(y), iota*y)".
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long, default_value_t = 4, value_parser = parse_dim)]
    pub dim: usize,
    /// Deformation parameter in [0, π/2].
    #[arg(long, default_value_t = PI / 4.0)]
    pub theta: f64,
    /// Root order for the nroot chart.
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = PoleArg::North)]
    pub pole: PoleArg,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub points: Option<usize>,
    /// Regular grid `AxB` over the x and y ranges with one random unit.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// x range `a,b`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub x_range: Option<(f64, f64)>,
    /// y range `a,b` for non-real points.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub y_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub points: PointArgs,
    /// Omit Jacobians from the output.
    #[arg(long)]
    pub no_jacobian: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub chart: ChartArgs,
    /// Number of stem samples.
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LogArgs {
    #[arg(long, default_value_t = 4, value_parser = parse_dim)]
    pub dim: usize,
    /// Imaginary unit used on the negative real axis, as `dim − 1`
    /// comma-separated coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub negative_unit: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RootArgs {
    #[command(flatten)]
    pub common: LogArgs,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
}

#[derive(Debug, Clone, Args)]
pub struct TransitionArgs {
    #[arg(long, default_value = "sphere")]
    pub chart: String,
    #[arg(long, default_value_t = 4, value_parser = parse_dim)]
    pub dim: usize,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_dim(s: &str) -> std::result::Result<usize, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("dimension must be 4 or 8, got `{s}`")),
    }
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like 20x10, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad grid size `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad grid size `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok((a, b))
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("range must look like -2,2, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(format!("invalid range `{s}`"));
    }
    Ok((a, b))
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Configuration(_)
        | Error::UnknownChart(_)
        | Error::Parse { .. }
        | Error::Parameter(_)
        | Error::UnsupportedDimension(_)
        | Error::InvalidUnit(_)
        | Error::DimensionMismatch { .. } => 2,
        _ => 3,
    }
}

/// Parses `args` and runs the command, reading stdin where needed.
pub fn run<'a, I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(pass) => i32::from(!pass),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

impl ChartArgs {
    fn algebra(&self) -> Algebra {
        Algebra::from_dim(self.dim).expect("dimension validated by the parser")
    }

    fn resolve(&self) -> Result<ManifoldChart> {
        let params = ChartParams {
            algebra: self.algebra(),
            theta: self.theta,
            n: self.n,
            pole: match self.pole {
                PoleArg::North => Pole::North,
                PoleArg::South => Pole::South,
            },
        };
        match (&self.chart, &self.expr) {
            (Some(name), _) => ManifoldChart::from_name(name, &params),
            (None, Some(text)) => {
                let stem = crate::expr::parse_stem_expr(text)?.to_stem(text);
                ManifoldChart::slice_function(stem, params.algebra)
            }
            (None, None) => Err(Error::Configuration("pass --chart or --expr".into())),
        }
    }
}

impl PointArgs {
    fn ranges(&self, chart: &ManifoldChart) -> PointRanges {
        let mut r = chart.point_ranges();
        if let Some(x) = self.x_range {
            r.x = x;
        }
        if let Some(y) = self.y_range {
            r.y = y;
        }
        r
    }

    fn generate(&self, chart: &ManifoldChart, default_count: usize) -> Result<Vec<SlicePoint>> {
        let ranges = self.ranges(chart);
        let pts = match self.grid {
            Some((nx, ny)) => {
                let unit = random_unit(&mut rng(self.seed), chart.algebra());
                ranges.grid(nx, ny, unit)
            }
            None => ranges.sample_many(self.seed, chart.algebra(), self.points.unwrap_or(default_count)),
        };
        if let Some(p) = pts.iter().find(|p| !chart.domain().contains(p.x, p.y)) {
            return Err(Error::Configuration(format!(
                "sample point ({}, {}) lies outside the domain of {}",
                p.x,
                p.y,
                chart.name()
            )));
        }
        Ok(pts)
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Runs a parsed command. Returns whether the verdict passed.
pub fn execute(cli: &Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<bool> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Sample(a) => sample(a, exec, stdout),
        Command::Audit(a) => {
            let chart = a.chart.resolve()?;
            let pts = a.points.generate(&chart, 1000)?;
            let summary = chart.audit(&pts, a.tol, exec)?;
            emit(&a.out, stdout, &json(&summary)?)?;
            Ok(summary.pass)
        }
        Command::Certify(a) => {
            let chart = a.chart.resolve()?;
            let cfg = CertifyConfig {
                tolerance: a.tol,
                samples: a.points,
                seed: a.seed,
                algebra: chart.algebra(),
                ..Default::default()
            };
            let cert = chart.certify(&cfg)?;
            emit(&a.out, stdout, &json(&cert)?)?;
            Ok(cert.pass)
        }
        Command::Log(a) => branch(a, stdin, stdout, principal_log, logarithm),
        Command::Root(a) => {
            let n = a.n;
            if n < 2 {
                return Err(Error::Parameter(format!("n = {n} must be at least 2")));
            }
            branch(
                &a.common,
                stdin,
                stdout,
                move |q, unit| principal_nthroot(n, q, unit),
                move |q, s| nth_root(n, q, s),
            )
        }
        Command::Transition(a) => transition(a, exec, stdout),
        Command::VerifyPaper(a) => {
            let report = verify_paper(a.seed, exec)?;
            if let Some(path) = &a.out {
                std::fs::write(path, json(&report)?)?;
            }
            stdout.write_all(report.table().as_bytes())?;
            Ok(report.pass)
        }
    }
}

#[derive(Debug, Serialize)]
struct SampleRecord {
    x: f64,
    y: f64,
    unit: Vec<f64>,
    value: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jacobian: Option<Vec<Vec<f64>>>,
}

fn sample(a: &SampleArgs, exec: Execution, stdout: &mut dyn Write) -> Result<bool> {
    let chart = a.chart.resolve()?;
    let pts = a.points.generate(&chart, 100)?;
    let records = exec
        .map(&pts, |p| -> Result<SampleRecord> {
            let value = chart.eval(p)?;
            let jacobian = if a.no_jacobian {
                None
            } else {
                Some(chart.jacobian(p, &p.unit.complete_basis())?.rows())
            };
            Ok(SampleRecord {
                x: p.x,
                y: p.y,
                unit: p.unit.value().coeffs()[1..].to_vec(),
                value,
                jacobian,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = records.iter().find(|r| r.value.iter().any(|v| !v.is_finite())) {
        return Err(Error::Domain { x: bad.x, y: bad.y });
    }
    let text = match a.format {
        Format::Json => json(&records)?,
        Format::Csv => sample_csv(&records, chart.dim(), chart.ambient_dim()),
    };
    emit(&a.out, stdout, &text)?;
    Ok(true)
}

fn sample_csv(records: &[SampleRecord], dim: usize, n: usize) -> String {
    let mut header = vec!["x".to_string(), "y".to_string()];
    header.extend((1..dim).map(|k| format!("unit_{k}")));
    header.extend((0..n).map(|k| format!("value_{k}")));
    if records.first().is_some_and(|r| r.jacobian.is_some()) {
        for r in 0..n {
            header.extend((0..dim).map(|c| format!("jacobian_{r}_{c}")));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for rec in records {
        let mut fields = vec![rec.x, rec.y];
        fields.extend(&rec.unit);
        fields.extend(&rec.value);
        if let Some(j) = &rec.jacobian {
            fields.extend(j.iter().flatten());
        }
        let line: Vec<String> = fields.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct BranchRecord {
    input: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>().map_err(|_| {
                Error::Configuration(format!("line {lineno}: `{t}` is not a number"))
            })
        })
        .collect()
}

fn branch(
    a: &LogArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    single: impl Fn(&HyperNum, Option<ImaginaryUnit>) -> Result<HyperNum>,
    pair: impl Fn(&HyperNum, &HyperNum) -> Result<HyperNum>,
) -> Result<bool> {
    let d = a.dim;
    let unit = match &a.negative_unit {
        Some(text) => {
            let c = parse_numbers(text, 0)?;
            Some(ImaginaryUnit::from_imaginary(&HyperNum::from_parts(0.0, &c)?)?)
        }
        None => None,
    };
    let mut records = Vec::new();
    for (i, line) in stdin.lines().enumerate() {
        let line = line?;
        let nums = parse_numbers(&line, i + 1)?;
        if nums.is_empty() {
            continue;
        }
        let result = if nums.len() == d {
            single(&HyperNum::from_slice(&nums)?, unit)
        } else if nums.len() == 2 * d {
            pair(&HyperNum::from_slice(&nums[..d])?, &HyperNum::from_slice(&nums[d..])?)
        } else {
            return Err(Error::Configuration(format!(
                "line {}: expected {} or {} numbers, got {}",
                i + 1,
                d,
                2 * d,
                nums.len()
            )));
        };
        records.push(match result {
            Ok(v) => BranchRecord {
                input: nums,
                value: Some(v.coeffs().to_vec()),
                error: None,
            },
            Err(e) => BranchRecord {
                input: nums,
                value: None,
                error: Some(e.to_string()),
            },
        });
    }
    let pass = records.iter().all(|r| r.error.is_none());
    let text = match a.format {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut s = String::from("input,value,error\n");
            for r in &records {
                let join = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    join(&r.input),
                    r.value.as_deref().map(join).unwrap_or_default(),
                    r.error.as_deref().unwrap_or("").replace(',', ";")
                );
            }
            s
        }
    };
    emit(&a.out, stdout, &text)?;
    Ok(pass)
}

#[derive(Debug, Serialize)]
struct TransitionReport {
    chart: String,
    dim: usize,
    points: usize,
    /// `max |(south⁻¹ ∘ north)(q)·q − 1|`.
    max_residual: f64,
    /// `max |(south⁻¹ ∘ north)(q) − 1/q| / |1/q|`.
    max_inverse_deviation: f64,
    tolerance: f64,
    pass: bool,
}

fn transition(a: &TransitionArgs, exec: Execution, stdout: &mut dyn Write) -> Result<bool> {
    if !matches!(a.chart.as_str(), "sphere" | "sphere-north" | "sphere-south") {
        return Err(Error::Configuration(format!(
            "transition maps are available for the sphere atlas only, not `{}`",
            a.chart
        )));
    }
    let algebra = Algebra::from_dim(a.dim)?;
    let res = exec
        .map_range(a.points, |i| -> Result<(f64, f64)> {
            let mut r = rng(a.seed ^ ((i as u64) << 20));
            let q = random_hypernum(&mut r, algebra) * r.random_range(0.1..=3.0);
            let t = sphere_transition_composed(&q)?;
            let inv = sphere_transition(&q)?;
            Ok((
                (t * q - HyperNum::one(algebra)).norm(),
                (t - inv).norm() / inv.norm(),
            ))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let max_residual = crate::parallel::max_of(res.iter().map(|r| r.0));
    let max_dev = crate::parallel::max_of(res.iter().map(|r| r.1));
    let report = TransitionReport {
        chart: "sphere".into(),
        dim: a.dim,
        points: a.points,
        max_residual,
        max_inverse_deviation: max_dev,
        tolerance: a.tol,
        pass: max_residual <= a.tol && max_dev <= a.tol,
    };
    emit(&a.out, stdout, &json(&report)?)?;
    Ok(report.pass)
}
