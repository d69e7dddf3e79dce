//! Experiment orchestration: configuration, replica fan-out, reports and the
//! validation suites.

pub mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Serialize, Serializer};
use serde_json::json;
use thiserror::Error;

use crate::field::{sample_weight_field_with, FieldError, Window, DEFAULT_CAPACITY};
use crate::fpp::FppError;
use crate::greedy::{exact_supremum, exact_supremum_d1, heuristic_supremum, GreedyError, HeuristicOptions};
use crate::radius::{RadiusError, RadiusLaw, Transform, WeightMeasure};
use crate::rng::purpose;
use crate::stats::Summary;
use suites::{par_collect, replica_rng, Check, SuiteOutcome};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "PERCOLAB_WORKERS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {field}: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("{0}")]
    Suite(String),
    #[error(transparent)]
    Radius(#[from] RadiusError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Fpp(#[from] FppError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}

fn invalid(field: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::ConfigInvalid { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Speed,
    Classify,
    Greedy,
    Scaling,
    Equivalence,
    Domination,
    Validate,
}

impl FromStr for Command {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "speed" => Command::Speed,
            "classify" => Command::Classify,
            "greedy" => Command::Greedy,
            "scaling" => Command::Scaling,
            "equivalence" => Command::Equivalence,
            "domination" => Command::Domination,
            "validate" => Command::Validate,
            other => return Err(invalid("cmd", format!("unknown command `{other}`"))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Speed => "speed",
            Command::Classify => "classify",
            Command::Greedy => "greedy",
            Command::Scaling => "scaling",
            Command::Equivalence => "equivalence",
            Command::Domination => "domination",
            Command::Validate => "validate",
        };
        f.write_str(s)
    }
}

fn display_opt<T: fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// A validated experiment configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dim: usize,
    #[serde(serialize_with = "display_opt")]
    pub law: Option<RadiusLaw>,
    /// Window half-width `L`.
    #[serde(rename = "L")]
    pub half_width: f64,
    /// Horizon `T` (initial horizon for adaptive runs).
    #[serde(rename = "T")]
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
    /// Path size for exact greedy suprema.
    pub k: Option<usize>,
    /// Restarts for heuristic greedy suprema.
    pub budget: Option<usize>,
    /// Minimal path length `l` for `S_l`.
    #[serde(rename = "l")]
    pub min_length: Option<f64>,
    pub gamma: f64,
    #[serde(serialize_with = "display_opt")]
    pub measure: Option<Transform>,
    pub epsilon: f64,
    pub tolerance: Option<f64>,
    /// Targets per replica for passage-time runs.
    pub targets: usize,
    /// Suites run by `validate`; empty means all.
    pub suites: Vec<String>,
}

const KEYS: [&str; 18] = [
    "cmd", "dim", "law", "L", "T", "replicas", "seed", "alpha", "out", "k", "budget", "l", "gamma", "measure",
    "epsilon", "tolerance", "targets", "suites",
];

/// Parses `key = value` lines; `#` starts a comment, `:` may replace `=`.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = line
            .find(['=', ':'])
            .ok_or_else(|| invalid("config", format!("line {}: expected `key = value`", n + 1)))?;
        let (k, v) = (&line[..at], &line[at + 1..]);
        out.push((k.trim().trim_start_matches('-').to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, ExperimentError> {
    v.parse().map_err(|_| invalid(key, format!("cannot parse `{v}`")))
}

fn positive(key: &str, v: f64) -> Result<f64, ExperimentError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive and finite, got {v}")))
    }
}

/// Builds a configuration from an optional key-value file and flag pairs;
/// flags override the file.
pub fn load_config(path: Option<&Path>, flags: &[(String, String)]) -> Result<ExperimentConfig, ExperimentError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    if let Some(p) = path {
        let text = fs::read_to_string(p).map_err(|e| invalid("config", format!("{}: {e}", p.display())))?;
        map.extend(parse_key_values(&text)?);
    }
    for (k, v) in flags {
        map.insert(k.trim_start_matches('-').to_string(), v.clone());
    }
    if let Some(v) = map.remove("command") {
        map.entry("cmd".into()).or_insert(v);
    }
    if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(invalid(k, "unknown key"));
    }
    let get = |k: &str| map.get(k).map(String::as_str);
    let command: Command = get("cmd").ok_or_else(|| invalid("cmd", "missing"))?.parse()?;
    let dim: usize = get("dim").map_or(Ok(1), |v| parse_num("dim", v))?;
    if !(1..=crate::point::MAX_DIM).contains(&dim) {
        return Err(invalid("dim", format!("must be in 1..={}, got {dim}", crate::point::MAX_DIM)));
    }
    let law = get("law").map(|v| v.parse::<RadiusLaw>().map_err(|e| invalid("law", e.to_string()))).transpose()?;
    let pos = |k: &str, default: f64| -> Result<f64, ExperimentError> {
        positive(k, get(k).map_or(Ok(default), |v| parse_num(k, v))?)
    };
    let opt_pos = |k: &str| -> Result<Option<f64>, ExperimentError> {
        get(k).map(|v| parse_num(k, v).and_then(|x| positive(k, x))).transpose()
    };
    let count = |k: &str, min: usize| -> Result<Option<usize>, ExperimentError> {
        let v: Option<usize> = get(k).map(|v| parse_num(k, v)).transpose()?;
        match v {
            Some(n) if n < min => Err(invalid(k, format!("must be at least {min}, got {n}"))),
            v => Ok(v),
        }
    };
    let alpha = opt_pos("alpha")?;
    let mut measure =
        get("measure").map(|v| v.parse::<Transform>().map_err(|e| invalid("measure", e.to_string()))).transpose()?;
    if measure.is_none() && command == Command::Greedy {
        measure = alpha.map(|alpha| Transform::FastBall { alpha });
    }
    let cfg = ExperimentConfig {
        command,
        dim,
        law,
        half_width: pos("L", 100.0)?,
        horizon: pos("T", 100.0)?,
        replicas: count("replicas", 1)?.unwrap_or(1),
        seed: get("seed").map_or(Ok(0), |v| parse_num("seed", v))?,
        alpha,
        out: get("out").map(PathBuf::from),
        k: count("k", 1)?,
        budget: count("budget", 1)?,
        min_length: opt_pos("l")?,
        gamma: pos("gamma", 1.0)?,
        measure,
        epsilon: pos("epsilon", 0.1)?,
        tolerance: opt_pos("tolerance")?,
        targets: count("targets", 2)?.unwrap_or(400),
        suites: get("suites")
            .map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default(),
    };
    let needs_law = !matches!(command, Command::Validate | Command::Greedy)
        || (command == Command::Greedy && !matches!(cfg.measure, Some(Transform::UnitDirac { .. })));
    if needs_law && cfg.law.is_none() {
        return Err(invalid("law", format!("required by `{command}`")));
    }
    if command == Command::Greedy && cfg.measure.is_none() {
        return Err(invalid("measure", "required by `greedy` (or give alpha for fast balls)"));
    }
    if let Some(s) = cfg.suites.iter().find(|s| !suites::ALL_SUITES.contains(&s.as_str())) {
        return Err(invalid("suites", format!("unknown suite `{s}`")));
    }
    Ok(cfg)
}

/// One row of the per-replica table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaRow {
    pub replica: usize,
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

/// Summary of the first column over the successful replicas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub metric: String,
    pub n: usize,
    pub failed: usize,
    pub mean: f64,
    pub se: f64,
    pub ci_halfwidth: f64,
}

impl Aggregate {
    pub fn of_rows(metric: &str, rows: &[ReplicaRow]) -> Aggregate {
        let ok: Vec<f64> = rows.iter().filter_map(|r| r.values.first().copied().flatten()).collect();
        let s = Summary::of(&ok);
        Aggregate {
            metric: metric.to_string(),
            n: ok.len(),
            failed: rows.len() - ok.len(),
            mean: s.mean,
            se: s.se,
            ci_halfwidth: s.ci_halfwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationReport {
    /// Expected number of field points of one replica.
    pub expected_points: f64,
    /// Radius exceeded by some point with probability below `1e-12`.
    pub radius_cap: f64,
    /// Upper bound on the probability that some radius exceeds the cap.
    pub cap_exceedance_bound: f64,
    /// Replicas whose growth left the window before the horizon.
    pub boundary_touched: usize,
    pub boundary_touched_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// Names of the per-replica values.
    pub columns: Vec<String>,
    pub rows: Vec<ReplicaRow>,
    pub aggregate: Option<Aggregate>,
    pub truncation: Option<TruncationReport>,
    pub verdicts: Vec<SuiteOutcome>,
    pub details: serde_json::Value,
    /// Written to a separate file so that summaries stay reproducible.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunSummary {
    fn new(config: &ExperimentConfig) -> Self {
        RunSummary {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            columns: Vec::new(),
            rows: Vec::new(),
            aggregate: None,
            truncation: None,
            verdicts: Vec::new(),
            details: serde_json::Value::Null,
            wall_clock_seconds: 0.0,
        }
    }

    /// True when every verdict passed (vacuously for runs without verdicts).
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Worker count from the environment, `None` for the default.
pub fn worker_count() -> Result<Option<usize>, ExperimentError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(WORKERS_ENV, format!("must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs the configured command on a thread pool capped by `PERCOLAB_WORKERS`.
pub fn run_replicas(config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| invalid(WORKERS_ENV, e.to_string()))?;
    let start = Instant::now();
    let mut summary = pool.install(|| dispatch(config))?;
    summary.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(summary)
}

fn dispatch(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    match c.command {
        Command::Speed => run_speed(c),
        Command::Classify => run_classify(c),
        Command::Greedy => run_greedy(c),
        Command::Scaling => run_scaling(c),
        Command::Equivalence => run_equivalence(c),
        Command::Domination => run_domination(c),
        Command::Validate => run_validate(c),
    }
}

fn law_of(c: &ExperimentConfig) -> Result<RadiusLaw, ExperimentError> {
    c.law.ok_or_else(|| invalid("law", format!("required by `{}`", c.command)))
}

fn speed_samples(c: &ExperimentConfig, law: &RadiusLaw, horizon: f64, seed: u64) -> Vec<suites::SpeedSample> {
    par_collect(c.replicas, |i| {
        if c.dim == 1 {
            suites::reach_speed_sample(law, 1, c.half_width, horizon, seed, i)
        } else {
            suites::passage_speed_sample(law, c.dim, c.half_width, horizon, c.targets, seed, i)
        }
    })
}

fn truncation(c: &ExperimentConfig, law: &RadiusLaw, samples: &[suites::SpeedSample]) -> TruncationReport {
    let horizon = samples.iter().map(|s| s.horizon).filter(|h| h.is_finite()).fold(c.horizon, f64::max);
    let expected_points = Window { dim: c.dim, half_width: c.half_width }.volume() * horizon;
    let radius_cap = law.radius_cap(expected_points);
    let cap_exceedance_bound =
        if radius_cap >= law.essential_sup() { 0.0 } else { (expected_points * law.tail_mass(radius_cap)).min(1.0) };
    let boundary_touched = samples.iter().filter(|s| s.boundary_touch_time.is_some_and(|t| t <= s.horizon)).count();
    TruncationReport {
        expected_points,
        radius_cap,
        cap_exceedance_bound,
        boundary_touched,
        boundary_touched_fraction: boundary_touched as f64 / samples.len().max(1) as f64,
    }
}

fn run_speed(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let law = law_of(c)?;
    let samples = speed_samples(c, &law, c.horizon, c.seed);
    let mut s = RunSummary::new(c);
    s.columns = vec!["speed".into(), "boundary_touch_time".into()];
    s.rows = samples
        .iter()
        .enumerate()
        .map(|(i, x)| ReplicaRow { replica: i, values: vec![x.speed, x.boundary_touch_time], error: x.error.clone() })
        .collect();
    let agg = Aggregate::of_rows("speed", &s.rows);
    s.truncation = Some(truncation(c, &law, &samples));
    let method = if c.dim == 1 { "reach-regression" } else { "passage-regression" };
    let exact = if c.dim == 1 { law.moment(2.0).value().map(|m| m / 2.0) } else { None };
    s.details = json!({ "method": method, "exact_speed": exact });
    if let (Some(tol), Some(exact)) = (c.tolerance, exact) {
        s.verdicts.push(verdict(
            "exact-speed",
            Check::at_most("relative error of the mean speed", (agg.mean / exact - 1.0).abs(), tol),
        ));
    }
    s.aggregate = Some(agg);
    Ok(s)
}

fn verdict(name: &str, check: Check) -> SuiteOutcome {
    SuiteOutcome { name: name.to_string(), passed: check.passed, checks: vec![check], metrics: BTreeMap::new() }
}

fn run_classify(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let law = law_of(c)?;
    let g = law.classify_growth(c.dim, c.epsilon)?;
    let mut s = RunSummary::new(c);
    let greedy = c
        .measure
        .map(|t| WeightMeasure::new(law, t).greedy_classification(c.dim))
        .transpose()?;
    s.details = json!({
        "verdict": g.verdict,
        "condition1_value": g.condition1_value,
        "condition2_value": g.condition2_value,
        "log_moment_finite": g.log_moment_finite,
        "quadrature_inconclusive": g.quadrature_inconclusive,
        "greedy": greedy,
    });
    Ok(s)
}

fn run_greedy(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let transform = c.measure.ok_or_else(|| invalid("measure", "required by `greedy`"))?;
    let base = c.law.unwrap_or(RadiusLaw::Dirac { r0: 1.0 });
    let measure = WeightMeasure::new(base, transform);
    let window = Window::new(c.dim, c.half_width)?;
    let results = par_collect(c.replicas, |i| -> Result<(f64, usize, u64), ExperimentError> {
        let f = sample_weight_field_with(window, &measure, c.seed, DEFAULT_CAPACITY, &mut replica_rng(c.seed, i, purpose::WEIGHTS))?;
        let r = if c.dim == 1 {
            exact_supremum_d1(&f, c.min_length)?
        } else if let Some(k) = c.k {
            exact_supremum(&f, k, c.min_length)?
        } else {
            let opts = HeuristicOptions {
                budget: c.budget.unwrap_or(8),
                seed: crate::rng::replica_stream(i as u64, purpose::HEURISTIC),
                ..HeuristicOptions::default()
            };
            heuristic_supremum(&f, &opts, c.min_length)?
        };
        Ok((r.value, r.best.map_or(0, |b| b.points.len() - 1), r.nodes_explored))
    });
    let mut s = RunSummary::new(c);
    s.columns = vec!["value".into(), "path_points".into(), "nodes_explored".into()];
    s.rows = results
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            Ok((v, n, e)) => ReplicaRow { replica: i, values: vec![Some(v), Some(n as f64), Some(e as f64)], error: None },
            Err(e) => ReplicaRow { replica: i, values: vec![None, None, None], error: Some(e.to_string()) },
        })
        .collect();
    s.aggregate = Some(Aggregate::of_rows("value", &s.rows));
    let mode = if c.dim == 1 { "exact-line" } else if c.k.is_some() { "exact" } else { "heuristic" };
    s.details = json!({ "mode": mode, "classification": measure.greedy_classification(c.dim)? });
    Ok(s)
}

fn run_scaling(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let law = law_of(c)?;
    let factor = 2f64.powi(c.dim as i32 + 1);
    let scaled = law.scaled(2.0);
    let base = speed_samples(c, &law, c.horizon, c.seed);
    let doubled = speed_samples(c, &scaled, c.horizon / factor, c.seed.wrapping_add(1));
    let mut s = RunSummary::new(c);
    s.columns = vec!["speed".into(), "speed_scaled".into()];
    s.rows = base
        .iter()
        .zip(&doubled)
        .enumerate()
        .map(|(i, (a, b))| ReplicaRow {
            replica: i,
            values: vec![a.speed, b.speed],
            error: a.error.clone().or_else(|| b.error.clone()),
        })
        .collect();
    let mean = |v: &[suites::SpeedSample]| Summary::of(&v.iter().filter_map(|x| x.speed).collect::<Vec<_>>()).mean;
    let ratio = mean(&doubled) / mean(&base);
    let tol = c.tolerance.unwrap_or(if c.dim == 1 { 0.05 } else { 0.15 });
    s.verdicts.push(verdict(
        "scaling-ratio",
        Check::at_most(format!("relative error of the ratio against {factor}"), (ratio / factor - 1.0).abs(), tol),
    ));
    s.details = json!({ "ratio": ratio, "expected_ratio": factor, "scaled_law": scaled.to_string() });
    s.aggregate = Some(Aggregate::of_rows("speed", &s.rows));
    s.truncation = Some(truncation(c, &law, &base));
    Ok(s)
}

fn run_equivalence(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let law = law_of(c)?;
    let runs = par_collect(c.replicas, |i| {
        suites::equivalence_mismatches(&law, c.dim, c.half_width, c.horizon, c.targets, 16, c.seed, i)
    });
    let mut s = RunSummary::new(c);
    s.columns = vec!["mismatches".into(), "comparisons".into(), "max_time_difference".into()];
    let mut total = 0;
    let mut failed = 0;
    s.rows = runs
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            Ok((m, n, d)) => {
                total += m;
                ReplicaRow { replica: i, values: vec![Some(m as f64), Some(n as f64), Some(d)], error: None }
            }
            Err(e) => {
                failed += 1;
                ReplicaRow { replica: i, values: vec![None, None, None], error: Some(e.to_string()) }
            }
        })
        .collect();
    s.aggregate = Some(Aggregate::of_rows("mismatches", &s.rows));
    s.verdicts.push(verdict("membership-equivalence", Check::at_most("mismatches", total as f64, 0.0)));
    s.verdicts.push(verdict("failed-replicas", Check::at_most("failed replicas", failed as f64, 0.0)));
    Ok(s)
}

fn run_domination(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let p = suites::Domination {
        law: law_of(c)?,
        dim: c.dim,
        gamma: c.gamma,
        half_width: c.half_width,
        replicas: c.replicas,
        norms: [6.0, 12.0, 24.0].iter().map(|n| n * c.gamma).collect(),
        radii: [10.0, 20.0, 40.0].iter().map(|r| r * c.gamma).collect(),
        initial_horizon: c.horizon,
        seed: c.seed,
        ..suites::Domination::default()
    };
    let runs = par_collect(c.replicas, |i| suites::domination_replica(&p, i));
    let mut s = RunSummary::new(c);
    s.columns = p
        .norms
        .iter()
        .map(|n| format!("T_shifted[{n}]"))
        .chain(p.radii.iter().map(|r| format!("T_ball[{r}]")))
        .collect();
    let width = s.columns.len();
    let mut ok = Vec::new();
    s.rows = runs
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            Ok(v) => {
                let values = v.0.iter().chain(&v.1).map(|&x| Some(x)).collect();
                ok.push(v);
                ReplicaRow { replica: i, values, error: None }
            }
            Err(e) => ReplicaRow { replica: i, values: vec![None; width], error: Some(e.to_string()) },
        })
        .collect();
    if ok.len() >= 2 {
        s.verdicts.push(suites::domination_outcome(&p, &ok)?);
    } else {
        s.verdicts.push(verdict("domination", Check::at_least("successful replicas", ok.len() as f64, 2.0)));
    }
    s.aggregate = Some(Aggregate::of_rows(&s.columns[0], &s.rows));
    Ok(s)
}

fn run_validate(c: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let names: Vec<&str> =
        if c.suites.is_empty() { suites::ALL_SUITES.to_vec() } else { c.suites.iter().map(String::as_str).collect() };
    let mut s = RunSummary::new(c);
    for name in &names {
        let outcome = suites::run_suite(name).unwrap_or_else(|e| SuiteOutcome::errored(name, &e));
        s.verdicts.push(outcome);
    }
    let passed = s.verdicts.iter().filter(|v| v.passed).count();
    s.details = json!({ "suites": names.len(), "passed": passed, "failed": names.len() - passed });
    Ok(s)
}

fn csv_cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x}"),
        Some(x) if x > 0.0 => "inf".into(),
        Some(_) => "nan".into(),
        None => String::new(),
    }
}

/// Writes `summary.json`, `replicas.csv` (when the run has replica rows) and
/// `timing.json` into `dir`, returning the paths written.
pub fn emit_report(summary: &RunSummary, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("summary.json");
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, summary)?;
    writeln!(f)?;
    written.push(path);
    if !summary.columns.is_empty() {
        let path = dir.join("replicas.csv");
        let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
        writeln!(f, "replica,{}", summary.columns.join(","))?;
        for r in &summary.rows {
            let cells: Vec<String> = r.values.iter().map(|v| csv_cell(*v)).collect();
            writeln!(f, "{},{}", r.replica, cells.join(","))?;
        }
        f.flush()?;
        written.push(path);
    }
    let path = dir.join("timing.json");
    let timing = json!({ "schema_version": SCHEMA_VERSION, "wall_clock_seconds": summary.wall_clock_seconds });
    fs::write(&path, serde_json::to_string_pretty(&timing)? + "\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn speed_flags_give_a_valid_config() {
        let c = load_config(
            None,
            &flags(&[
                ("--cmd", "speed"),
                ("--dim", "1"),
                ("--law", "dirac:r0=1"),
                ("--L", "600"),
                ("--T", "1000"),
                ("--replicas", "20"),
                ("--seed", "7"),
            ]),
        )
        .unwrap();
        assert_eq!(c.command, Command::Speed);
        assert_eq!(c.law, Some(RadiusLaw::Dirac { r0: 1.0 }));
        assert_eq!((c.half_width, c.horizon, c.replicas, c.seed), (600.0, 1000.0, 20, 7));
    }

    #[test]
    fn missing_law_is_invalid() {
        let e = load_config(None, &flags(&[("cmd", "speed")])).unwrap_err();
        assert!(matches!(e, ExperimentError::ConfigInvalid { ref field, .. } if field == "law"), "{e}");
    }

    #[test]
    fn nonpositive_law_parameter_is_invalid() {
        let e = load_config(None, &flags(&[("cmd", "speed"), ("law", "pareto:beta=0")])).unwrap_err();
        assert!(matches!(e, ExperimentError::ConfigInvalid { ref field, .. } if field == "law"), "{e}");
    }

    #[test]
    fn nonpositive_numbers_and_unknown_keys_are_invalid() {
        for (k, v) in [("L", "0"), ("T", "-1"), ("replicas", "0"), ("dim", "4"), ("bogus", "1")] {
            let e = load_config(None, &flags(&[("cmd", "speed"), ("law", "dirac:r0=1"), (k, v)])).unwrap_err();
            assert!(matches!(e, ExperimentError::ConfigInvalid { .. }), "{k}={v}: {e}");
        }
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "# speed run\ncmd = speed\nlaw: dirac:r0=1\nL: 50\nreplicas = 3\n").unwrap();
        let c = load_config(Some(&path), &flags(&[("replicas", "5")])).unwrap();
        assert_eq!(c.half_width, 50.0);
        assert_eq!(c.replicas, 5);
    }

    #[test]
    fn single_replica_aggregate_equals_the_replica() {
        let c = load_config(None, &flags(&[("cmd", "speed"), ("law", "dirac:r0=1"), ("L", "60"), ("T", "100")])).unwrap();
        let s = run_replicas(&c).unwrap();
        let agg = s.aggregate.as_ref().unwrap();
        assert_eq!(agg.n, 1);
        assert_eq!(Some(agg.mean), s.rows[0].values[0]);
        assert_eq!(agg.se, 0.0);
    }

    #[test]
    fn identical_configs_give_identical_bytes() {
        let c = load_config(
            None,
            &flags(&[("cmd", "speed"), ("law", "dirac:r0=1"), ("L", "40"), ("T", "60"), ("replicas", "3"), ("seed", "5")]),
        )
        .unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_report(&run_replicas(&c).unwrap(), a.path()).unwrap();
        emit_report(&run_replicas(&c).unwrap(), b.path()).unwrap();
        for f in ["summary.json", "replicas.csv"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
        }
        let csv = fs::read_to_string(a.path().join("replicas.csv")).unwrap();
        assert_eq!(csv.lines().next(), Some("replica,speed,boundary_touch_time"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn classify_report_has_verdict_and_conditions() {
        let c = load_config(None, &flags(&[("cmd", "classify"), ("law", "pareto:beta=4,rmin=1"), ("dim", "2")])).unwrap();
        let s = run_replicas(&c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_report(&s, dir.path()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(v["details"]["verdict"], "Linear");
        assert!(v["details"]["condition1_value"].is_number());
        assert_eq!(v["details"]["condition2_value"], 4.0);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert!(!dir.path().join("replicas.csv").exists());
    }

    #[test]
    fn validate_lists_suites_with_counts() {
        let c = load_config(None, &flags(&[("cmd", "validate"), ("suites", "classifier")])).unwrap();
        let s = run_replicas(&c).unwrap();
        assert_eq!(s.verdicts.len(), 1);
        assert!(s.all_passed(), "{}", s.verdicts[0]);
        assert_eq!(s.details["passed"], 1);
    }

    #[test]
    fn unknown_suite_is_invalid() {
        assert!(load_config(None, &flags(&[("cmd", "validate"), ("suites", "nope")])).is_err());
    }

    #[test]
    fn greedy_unit_measure_needs_no_law() {
        let c = load_config(
            None,
            &flags(&[("cmd", "greedy"), ("dim", "2"), ("measure", "unit:mass=1"), ("L", "2"), ("k", "3"), ("replicas", "2")]),
        )
        .unwrap();
        let s = run_replicas(&c).unwrap();
        assert_eq!(s.rows.len(), 2);
        assert!(s.rows.iter().all(|r| r.error.is_none()));
    }
}
