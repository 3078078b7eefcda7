//! Command-line front end: parameter parsing, sweeps and CSV output.
//!
//! Model parameters come from defaults, then an optional `key = value` file,
//! then `--fix KEY=VALUE` overrides, then the sweep variable. Values may carry
//! a unit (`20dBm`, `0.1W`, `0dB`, `100m`) or be a multiple of another length
//! key (`R_cs = 1.2*R_tx`).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::analytics;
use crate::csv_number;
use crate::error::{Error, Result};
use crate::montecarlo::{self, EstimateWithCI};
use crate::params::{db_to_linear, dbm_to_watts, NetworkParams};
use crate::process::ProcessType;
use crate::quadrature::QuadratureSpec;
use crate::sampling::{self, SimulationWindow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SWEEP_CSV_HEADER: &str = "sweep_var,value,process,quantity,analytic,quad_error";
pub const VALIDATE_CSV_HEADER: &str =
    "check,process,param_point,analytic,mc_mean,ci_low,ci_high,tolerance,pass";

/// Relative tolerance of the interference check.
pub const INTERFERENCE_REL_TOL: f64 = 0.05;
/// Absolute tolerance of the success-probability check.
pub const SUCCESS_ABS_TOL: f64 = 0.05;
/// Success checks apply where the Monte Carlo value is at least this.
pub const SUCCESS_MIN_PROB: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(
    name = "dzhcp",
    version,
    about = "Dual-zone hard-core process analytics and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Master seed of all Monte Carlo streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file (stdout when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Sweep one variable: `--sweep VAR LO..HI lin|log N`.
    #[arg(long, global = true, num_args = 4, value_names = ["VAR", "LO..HI", "SPACING", "N"])]
    pub sweep: Option<Vec<String>>,

    /// Override one parameter, e.g. `--fix R_cs=120` or `--fix P_t=20dBm`.
    #[arg(long, global = true, value_name = "KEY=VALUE")]
    pub fix: Vec<String>,

    /// Comma-separated process types (typeI, typeII, maternI, maternII).
    #[arg(long, global = true, value_name = "LIST")]
    pub process: Option<String>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Scale the exclusion area used by the analytic intensity in `validate`.
    #[arg(long, global = true, hide = true, value_name = "FACTOR")]
    pub test_corrupt_vo: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Intensity of retained transmitters.
    Intensity,
    /// Mean interference at the typical receiver.
    Interference,
    /// Asymptotic gain over the Poisson reference.
    Gain,
    /// Success probability approximation at the configured threshold.
    Success,
    /// Intensity times success probability.
    Throughput,
    /// Compare analytic results against Monte Carlo estimates.
    Validate,
    /// Dump one thinned realization as CSV.
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// One sweep variable over a sorted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Name as given on the command line, echoed into the output.
    pub var: String,
    key: ModelKey,
    unit: Option<&'static str>,
    pub lo: f64,
    pub hi: f64,
    pub spacing: Spacing,
    pub n: usize,
}

impl Sweep {
    pub fn parse(var: &str, range: &str, spacing: &str, n: &str) -> Result<Self> {
        let bad = |reason: String| Error::InvalidConfig {
            key: "sweep".into(),
            reason,
        };
        let (key, unit) =
            ModelKey::parse(var).ok_or_else(|| bad(format!("unknown sweep variable `{var}`")))?;
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| bad(format!("range `{range}` is not LO..HI")))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad lower bound `{lo}`")))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad upper bound `{hi}`")))?;
        let spacing = match spacing.to_ascii_lowercase().as_str() {
            "lin" | "linear" => Spacing::Lin,
            "log" => Spacing::Log,
            s => return Err(bad(format!("spacing must be lin or log, got `{s}`"))),
        };
        let n: usize = n
            .parse()
            .map_err(|_| bad(format!("bad point count `{n}`")))?;
        if n == 0 {
            return Err(bad("grid needs at least one point".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(bad(format!("range must satisfy LO <= HI, got {lo}..{hi}")));
        }
        if spacing == Spacing::Log && !(lo > 0.0) {
            return Err(bad("log spacing needs LO > 0".into()));
        }
        Ok(Self {
            var: var.to_string(),
            key,
            unit,
            lo,
            hi,
            spacing,
            n,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Lin => self.lo + (self.hi - self.lo) * f,
                    Spacing::Log => self.lo * (self.hi / self.lo).powf(f),
                }
            })
            .map(|v| v.clamp(self.lo, self.hi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ModelKey {
    LambdaP,
    RTx,
    RCs,
    D,
    Pt,
    A,
    Alpha,
    T,
    R0,
}

impl ModelKey {
    const ALL: [ModelKey; 9] = [
        ModelKey::LambdaP,
        ModelKey::RTx,
        ModelKey::RCs,
        ModelKey::D,
        ModelKey::Pt,
        ModelKey::A,
        ModelKey::Alpha,
        ModelKey::T,
        ModelKey::R0,
    ];

    /// Canonical key plus the unit implied by dB-suffixed aliases.
    fn parse(name: &str) -> Option<(ModelKey, Option<&'static str>)> {
        let k = match name.trim().to_ascii_lowercase().as_str() {
            "lambda_p" | "lambdap" | "lambda" => (ModelKey::LambdaP, None),
            "r_tx" | "rtx" => (ModelKey::RTx, None),
            "r_cs" | "rcs" => (ModelKey::RCs, None),
            "d" => (ModelKey::D, None),
            "p_t" | "pt" => (ModelKey::Pt, None),
            "p_t_dbm" | "pt_dbm" => (ModelKey::Pt, Some("dBm")),
            "a" | "path_loss_const" => (ModelKey::A, None),
            "alpha" => (ModelKey::Alpha, None),
            "t" | "threshold" => (ModelKey::T, None),
            "t_db" | "threshold_db" => (ModelKey::T, Some("dB")),
            "r0" | "r_0" => (ModelKey::R0, None),
            _ => return None,
        };
        Some(k)
    }

    fn name(self) -> &'static str {
        match self {
            ModelKey::LambdaP => "lambda_p",
            ModelKey::RTx => "R_tx",
            ModelKey::RCs => "R_cs",
            ModelKey::D => "d",
            ModelKey::Pt => "P_t",
            ModelKey::A => "A",
            ModelKey::Alpha => "alpha",
            ModelKey::T => "T",
            ModelKey::R0 => "r0",
        }
    }

    fn is_length(self) -> bool {
        matches!(
            self,
            ModelKey::RTx | ModelKey::RCs | ModelKey::D | ModelKey::R0
        )
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Everything one CLI run needs: raw parameter expressions plus run settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    values: BTreeMap<ModelKey, String>,
    pub processes: Vec<ProcessType>,
    pub sweep: Option<Sweep>,
    pub seed: u64,
    pub rel_tol: Option<f64>,
    pub r_max: Option<f64>,
    pub panels: Option<(usize, usize, usize)>,
    pub tail_correction: Option<bool>,
    /// Side of the square observation window for intensity estimates and `simulate`.
    pub window_side: f64,
    /// Radius of the disk observation window of Palm estimates; `40·R_cs` when absent.
    pub palm_radius: Option<f64>,
    pub intensity_reps: usize,
    pub palm_reps: usize,
    /// Thresholds (dB) of the success check; the configured `T` when empty.
    pub validate_t_db: Vec<f64>,
    pub corrupt_vo: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let values = [
            (ModelKey::LambdaP, "1e-5"),
            (ModelKey::RTx, "100"),
            (ModelKey::RCs, "1.2*R_tx"),
            (ModelKey::D, "0.8*R_tx"),
            (ModelKey::Pt, "20dBm"),
            (ModelKey::A, "0.01"),
            (ModelKey::Alpha, "3.5"),
            (ModelKey::T, "0dB"),
        ]
        .into_iter()
        .map(|(k, v)| (k, v.to_string()))
        .collect();
        Self {
            values,
            processes: ProcessType::ALL.to_vec(),
            sweep: None,
            seed: 1,
            rel_tol: None,
            r_max: None,
            panels: None,
            tail_correction: None,
            window_side: 2000.0,
            palm_radius: None,
            intensity_reps: 200,
            palm_reps: 20_000,
            validate_t_db: Vec::new(),
            corrupt_vo: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

fn parse_processes(list: &str) -> Result<Vec<ProcessType>> {
    let out: Vec<ProcessType> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(invalid("process", "empty process list"));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if let Some((k, unit)) = ModelKey::parse(key) {
            let raw = match unit {
                Some(u) => format!("{value}{u}"),
                None => value.to_string(),
            };
            // check syntax now so errors name the offending key
            parse_expr(k, &raw)?;
            self.values.insert(k, raw);
            return Ok(());
        }
        let lk = key.trim().to_ascii_lowercase();
        match lk.as_str() {
            "process" | "processes" => self.processes = parse_processes(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "rel_tol" => self.rel_tol = Some(parse_num(key, value)?),
            "r_max" => self.r_max = Some(parse_num(key, value)?),
            "panels" => {
                let parts: Vec<usize> = value
                    .split(',')
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?;
                match parts[..] {
                    [r, b, t] => self.panels = Some((r, b, t)),
                    _ => return Err(invalid(key, "expected three counts n_r,n_beta,n_theta")),
                }
            }
            "tail_correction" => self.tail_correction = Some(parse_num(key, value)?),
            "window_side" | "window" => self.window_side = parse_num(key, value)?,
            "palm_radius" => self.palm_radius = Some(parse_num(key, value)?),
            "intensity_reps" => self.intensity_reps = parse_num(key, value)?,
            "palm_reps" | "n_reps" => self.palm_reps = parse_num(key, value)?,
            "validate_t_db" => {
                self.validate_t_db = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?
            }
            "sweep" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                match parts[..] {
                    [v, r, s, n] => self.sweep = Some(Sweep::parse(v, r, s, n)?),
                    _ => return Err(invalid(key, "expected `VAR LO..HI lin|log N`")),
                }
            }
            _ => return Err(invalid(key, "unknown key")),
        }
        Ok(())
    }

    /// Apply a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                invalid(
                    &format!("line {}", lineno + 1),
                    format!("expected key = value, got `{line}`"),
                )
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_fix(&mut self, fix: &str) -> Result<()> {
        let (k, v) = fix
            .split_once('=')
            .ok_or_else(|| invalid(fix, "expected KEY=VALUE"))?;
        self.set(k, v)
    }

    /// Resolved parameters, with the sweep variable (if any) set to `sweep_value`.
    pub fn params_at(&self, sweep_value: Option<f64>) -> Result<NetworkParams> {
        let mut values = self.values.clone();
        if let (Some(s), Some(v)) = (&self.sweep, sweep_value) {
            values.insert(s.key, format!("{v}{}", s.unit.unwrap_or("")));
        }
        let mut resolved = BTreeMap::new();
        for k in ModelKey::ALL {
            if values.contains_key(&k) {
                resolve(k, &values, &mut resolved, 0)?;
            }
        }
        let get = |k: ModelKey| resolved.get(&k).copied();
        let defaults = NetworkParams::baseline();
        let params = NetworkParams {
            lambda_p: get(ModelKey::LambdaP).unwrap_or(defaults.lambda_p),
            r_tx: get(ModelKey::RTx).unwrap_or(defaults.r_tx),
            r_cs: get(ModelKey::RCs).unwrap_or(defaults.r_cs),
            d: get(ModelKey::D).unwrap_or(defaults.d),
            p_t: get(ModelKey::Pt).unwrap_or(defaults.p_t),
            path_loss_const: get(ModelKey::A).unwrap_or(defaults.path_loss_const),
            alpha: get(ModelKey::Alpha).unwrap_or(defaults.alpha),
            threshold: get(ModelKey::T).unwrap_or(defaults.threshold),
            r0: get(ModelKey::R0),
        };
        params.validate()?;
        Ok(params)
    }

    /// Sweep values, or a single `None` when there is no sweep.
    pub fn grid(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.points().into_iter().map(Some).collect(),
            None => vec![None],
        }
    }

    pub fn quadrature_spec(&self, params: &NetworkParams) -> QuadratureSpec {
        let mut spec = QuadratureSpec::for_params(params);
        if let Some(r) = self.r_max {
            spec = spec.with_r_max(r);
        }
        if let Some(t) = self.rel_tol {
            spec = spec.with_rel_tol(t);
        }
        if let Some((r, b, t)) = self.panels {
            spec = spec.with_panels(r, b, t);
        }
        if let Some(tc) = self.tail_correction {
            spec.tail_correction = tc;
        }
        spec
    }

    pub fn palm_window(&self, params: &NetworkParams) -> SimulationWindow {
        SimulationWindow::disk_for(self.palm_radius.unwrap_or(40.0 * params.r_cs), params)
    }
}

enum Term {
    Number(f64),
    Key(ModelKey),
}

/// Parse a value into a product of numbers and key references.
fn parse_expr(key: ModelKey, raw: &str) -> Result<Vec<Term>> {
    let name = key.name();
    raw.split('*')
        .map(|factor| {
            let f = factor.trim();
            if f.is_empty() {
                return Err(invalid(name, format!("empty factor in `{raw}`")));
            }
            if f.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return match ModelKey::parse(f) {
                    Some((k, None)) if k.is_length() && key.is_length() => Ok(Term::Key(k)),
                    _ => Err(invalid(
                        name,
                        format!("`{f}` is not a length key usable in `{raw}`"),
                    )),
                };
            }
            parse_quantity(key, f).map(Term::Number)
        })
        .collect()
}

/// A number with an optional unit suffix appropriate to `key`.
fn parse_quantity(key: ModelKey, s: &str) -> Result<f64> {
    let name = key.name();
    let split = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| invalid(name, format!("cannot parse `{s}`")))?;
    if !v.is_finite() {
        return Err(invalid(name, format!("`{s}` is not finite")));
    }
    let unit_lc = unit.to_ascii_lowercase();
    match (key, unit_lc.as_str()) {
        (_, "") => Ok(v),
        (ModelKey::Pt, "dbm") => Ok(dbm_to_watts(v)),
        (ModelKey::Pt, "w") => Ok(v),
        (ModelKey::Pt, "mw") => Ok(v * 1e-3),
        (ModelKey::T, "db") => Ok(db_to_linear(v)),
        (k, "m") if k.is_length() => Ok(v),
        _ => Err(invalid(name, format!("unit `{unit}` does not apply"))),
    }
}

fn resolve(
    key: ModelKey,
    values: &BTreeMap<ModelKey, String>,
    resolved: &mut BTreeMap<ModelKey, f64>,
    depth: usize,
) -> Result<f64> {
    if let Some(&v) = resolved.get(&key) {
        return Ok(v);
    }
    if depth > ModelKey::ALL.len() {
        return Err(invalid(key.name(), "circular reference"));
    }
    let raw = values
        .get(&key)
        .ok_or_else(|| invalid(key.name(), "referenced but not set"))?;
    let mut v = 1.0;
    for term in parse_expr(key, raw)? {
        v *= match term {
            Term::Number(x) => x,
            Term::Key(k) => resolve(k, values, resolved, depth + 1)?,
        };
    }
    resolved.insert(key, v);
    Ok(v)
}

/// Build the run configuration from parsed arguments.
pub fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text)?;
    }
    for f in &cli.fix {
        cfg.apply_fix(f)?;
    }
    if let Some(s) = &cli.sweep {
        cfg.sweep = Some(Sweep::parse(&s[0], &s[1], &s[2], &s[3])?);
    }
    if let Some(p) = &cli.process {
        cfg.processes = parse_processes(p)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.corrupt_vo = cli.test_corrupt_vo;
    // surface parameter errors before any work starts
    for v in cfg.grid() {
        cfg.params_at(v)?;
    }
    Ok(cfg)
}

/// One analytic value with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticValue {
    pub value: f64,
    pub error: f64,
}

fn success_with_error(
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<AnalyticValue> {
    let res = analytics::mean_interference(params, process, spec)?;
    let p = analytics::success_prob_with_gain(params.threshold, res.gain, params.alpha)?;
    // first-order propagation of the relative quadrature error through G
    let rel = res.quad_error / res.mean_interference;
    let shifted =
        analytics::success_prob_with_gain(params.threshold, res.gain * (1.0 + rel), params.alpha)?;
    Ok(AnalyticValue {
        value: p,
        error: (shifted - p).abs(),
    })
}

/// The analytic quantity reported by `command`.
pub fn evaluate(
    command: Command,
    params: &NetworkParams,
    process: ProcessType,
    spec: &QuadratureSpec,
) -> Result<(&'static str, AnalyticValue)> {
    let exact = |value| AnalyticValue { value, error: 0.0 };
    Ok(match command {
        Command::Intensity => ("intensity", exact(analytics::intensity(process, params))),
        Command::Interference => {
            let r = analytics::mean_interference(params, process, spec)?;
            (
                "mean_interference",
                AnalyticValue {
                    value: r.mean_interference,
                    error: r.quad_error,
                },
            )
        }
        Command::Gain => {
            let r = analytics::mean_interference(params, process, spec)?;
            (
                "gain",
                AnalyticValue {
                    value: r.gain,
                    error: r.gain * r.quad_error / r.mean_interference,
                },
            )
        }
        Command::Success => ("success_prob", success_with_error(params, process, spec)?),
        Command::Throughput => {
            let lambda = analytics::intensity(process, params);
            let s = success_with_error(params, process, spec)?;
            (
                "throughput",
                AnalyticValue {
                    value: lambda * s.value,
                    error: lambda * s.error,
                },
            )
        }
        Command::Validate | Command::Simulate => {
            return Err(invalid("command", "not an analytic sweep command"))
        }
    })
}

fn sweep_label(cfg: &ExperimentConfig, v: Option<f64>, params: &NetworkParams) -> (String, f64) {
    match (&cfg.sweep, v) {
        (Some(s), Some(v)) => (s.var.clone(), v),
        _ => ("lambda_p".to_string(), params.lambda_p),
    }
}

/// CSV for one of the analytic commands; rows follow sweep order, then process order.
pub fn run_sweep(command: Command, cfg: &ExperimentConfig) -> Result<String> {
    let jobs: Vec<(Option<f64>, ProcessType)> = cfg
        .grid()
        .into_iter()
        .flat_map(|v| cfg.processes.iter().map(move |&p| (v, p)))
        .collect();
    let rows: Vec<String> = jobs
        .par_iter()
        .map(|&(v, process)| {
            let params = cfg.params_at(v)?;
            let spec = cfg.quadrature_spec(&params);
            let (quantity, val) = evaluate(command, &params, process, &spec)?;
            let (var, value) = sweep_label(cfg, v, &params);
            Ok(format!(
                "{var},{},{},{quantity},{},{}",
                csv_number(value),
                process.name(),
                csv_number(val.value),
                csv_number(val.error)
            ))
        })
        .collect::<Result<_>>()?;
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub process: ProcessType,
    pub param_point: String,
    pub analytic: f64,
    pub mc: Option<EstimateWithCI>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn csv(&self) -> String {
        let (m, lo, hi) = match &self.mc {
            Some(e) => (
                csv_number(e.mean),
                csv_number(e.ci_low),
                csv_number(e.ci_high),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{m},{lo},{hi},{},{}",
            self.check,
            self.process.name(),
            self.param_point,
            csv_number(self.analytic),
            csv_number(self.tolerance),
            if self.pass { "pass" } else { "fail" }
        )
    }
}

fn validate_point(
    cfg: &ExperimentConfig,
    v: Option<f64>,
    process: ProcessType,
    point_index: u64,
) -> Result<Vec<CheckRow>> {
    let params = cfg.params_at(v)?;
    let (var, value) = sweep_label(cfg, v, &params);
    let point = format!("{var}={}", csv_number(value));
    // distinct stream families per (point, process, check)
    let seed_for = |check: u64| {
        cfg.seed
            .wrapping_add(point_index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
            .wrapping_add((process as u64) << 8 | check)
    };
    let mut rows = Vec::new();

    let vo = analytics::exclusion_area(process, &params) * cfg.corrupt_vo.unwrap_or(1.0);
    let lambda = analytics::intensity_from_area(process.rule(), params.lambda_p, vo);
    let window = SimulationWindow::square_for(cfg.window_side, &params);
    let est =
        montecarlo::estimate_intensity(&params, process, &window, cfg.intensity_reps, seed_for(1))?;
    rows.push(CheckRow {
        check: "intensity",
        process,
        param_point: point.clone(),
        analytic: lambda,
        mc: Some(est),
        tolerance: est.ci_high - est.mean,
        pass: est.contains(lambda),
    });

    let interference_defined =
        params.lambda_p > 0.0 && params.d < process.exclusion(&params).tx_radius;
    if !interference_defined {
        log::warn!(
            "{point} {process}: interference and success checks need lambda_p > 0 and d < R_cs"
        );
        return Ok(rows);
    }
    let spec = cfg.quadrature_spec(&params);
    let res = analytics::mean_interference(&params, process, &spec)?;
    let palm_window = cfg.palm_window(&params);
    let palm =
        montecarlo::palm_interference(&params, process, &palm_window, cfg.palm_reps, seed_for(2))?;
    let rel = (palm.estimate.mean - res.mean_interference).abs() / res.mean_interference;
    rows.push(CheckRow {
        check: "mean_interference",
        process,
        param_point: point.clone(),
        analytic: res.mean_interference,
        mc: Some(palm.estimate),
        tolerance: INTERFERENCE_REL_TOL,
        pass: rel <= INTERFERENCE_REL_TOL,
    });

    let thresholds: Vec<f64> = if cfg.validate_t_db.is_empty() {
        vec![params.threshold]
    } else {
        cfg.validate_t_db
            .iter()
            .map(|&db| db_to_linear(db))
            .collect()
    };
    let mc = montecarlo::estimate_success_prob(
        &params,
        process,
        &thresholds,
        &palm_window,
        cfg.palm_reps,
        seed_for(3),
    )?;
    for (t, e) in thresholds.iter().zip(mc) {
        let analytic = analytics::success_prob_with_gain(*t, res.gain, params.alpha)?;
        let pass = e.mean < SUCCESS_MIN_PROB || (analytic - e.mean).abs() <= SUCCESS_ABS_TOL;
        rows.push(CheckRow {
            check: "success_prob",
            process,
            param_point: format!("{point};T={}", csv_number(*t)),
            analytic,
            mc: Some(e),
            tolerance: SUCCESS_ABS_TOL,
            pass,
        });
    }
    Ok(rows)
}

/// Checks that the dual-zone and carrier-sense-only computations coincide
/// when the receiver disk lies inside the carrier-sense disk.
fn degeneracy_rows(cfg: &ExperimentConfig, v: Option<f64>) -> Result<Vec<CheckRow>> {
    let params = cfg.params_at(v)?;
    if !(params.d + params.r_tx <= params.r_cs) {
        return Ok(Vec::new());
    }
    let (var, value) = sweep_label(cfg, v, &params);
    let spec = cfg.quadrature_spec(&params);
    let tol = spec.rel_tol;
    let mut rows = Vec::new();
    for (dz, mat) in [
        (ProcessType::TypeI, ProcessType::MaternI),
        (ProcessType::TypeII, ProcessType::MaternII),
    ] {
        if !(cfg.processes.contains(&dz) && cfg.processes.contains(&mat)) {
            continue;
        }
        let a = analytics::intensity(dz, &params);
        let b = analytics::intensity(mat, &params);
        rows.push(CheckRow {
            check: "matern_intensity",
            process: dz,
            param_point: format!("{var}={}", csv_number(value)),
            analytic: a,
            mc: None,
            tolerance: 0.0,
            pass: a == b,
        });
        if params.lambda_p > 0.0 && params.d < params.r_cs {
            let a = analytics::mean_interference(&params, dz, &spec)?.mean_interference;
            let b = analytics::mean_interference(&params, mat, &spec)?.mean_interference;
            rows.push(CheckRow {
                check: "matern_interference",
                process: dz,
                param_point: format!("{var}={}", csv_number(value)),
                analytic: a,
                mc: None,
                tolerance: tol,
                pass: (a - b).abs() <= tol * b.abs(),
            });
        }
    }
    Ok(rows)
}

/// Validation report and overall pass flag.
pub fn run_validate(cfg: &ExperimentConfig) -> Result<(String, bool)> {
    let jobs: Vec<(u64, Option<f64>, ProcessType)> = cfg
        .grid()
        .into_iter()
        .enumerate()
        .flat_map(|(i, v)| cfg.processes.iter().map(move |&p| (i as u64, v, p)))
        .collect();
    let mut rows: Vec<CheckRow> = Vec::new();
    for (i, v, p) in &jobs {
        rows.extend(validate_point(cfg, *v, *p, *i)?);
    }
    for v in cfg.grid() {
        rows.extend(degeneracy_rows(cfg, v)?);
    }
    let mut out = String::new();
    writeln!(out, "{VALIDATE_CSV_HEADER}").unwrap();
    for r in &rows {
        writeln!(out, "{}", r.csv()).unwrap();
    }
    Ok((out, rows.iter().all(|r| r.pass)))
}

/// One realization of the first configured process in the configured square window.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<String> {
    let v = cfg.grid()[0];
    let params = cfg.params_at(v)?;
    let process = cfg.processes[0];
    let window = SimulationWindow::square_for(cfg.window_side, &params);
    let pairs = sampling::simulate_realization(&window, &params, process, cfg.seed)?;
    let mut buf = Vec::new();
    sampling::write_realization_csv(&mut buf, &pairs).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig { .. } | Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_VALIDATION,
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn execute(cli: &Cli) -> Result<(String, bool)> {
    let cfg = build_config(cli)?;
    match cli.command {
        Command::Validate => run_validate(&cfg),
        Command::Simulate => Ok((run_simulate(&cfg)?, true)),
        c => Ok((run_sweep(c, &cfg)?, true)),
    }
}

/// Parse `args` (including the program name) and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let work = || match execute(&cli) {
        Ok((text, ok)) => match write_output(cli.out.as_ref(), &text) {
            Ok(()) => {
                if ok {
                    EXIT_OK
                } else {
                    eprintln!("validation failed");
                    EXIT_VALIDATION
                }
            }
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be >= 1");
            EXIT_USAGE
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                eprintln!("error: cannot start thread pool: {e}");
                EXIT_USAGE
            }
        },
        None => work(),
    }
}
