//! Validation suites. Every size and tolerance lives in the parameter struct
//! of its suite; `Default` gives the values used by `validate`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentError;
use crate::field::{
    extend_growth_field, fast_thin, sample_growth_field_with, sample_weight_field_with, scale_field, Window,
    DEFAULT_CAPACITY,
};
use crate::fpp::{
    ball_net, center_passage_times, domination_chain_sample, grow_adaptive, halfline_renewal_d1, markov_simulate_d1,
    passage_speed, passage_times, sweep_simulate_with, trace_speed, window_curve, AdaptiveSpec, DominationChainSpec,
    GrowthTrace, SweepOptions,
};
use crate::geometry::Ball;
use crate::greedy::{d1_ceiling_check, exact_supremum, heuristic_supremum, path_score, HeuristicOptions};
use crate::point::Point;
use crate::radius::{RadiusLaw, Verdict, WeightMeasure};
use crate::rng::{purpose, replica_stream, stream_rng, SimRng};
use crate::stats::{ks_two_sample, ols_slope, quantile, survival, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Below,
}

/// One pass/fail comparison of an observed value against a limit.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Check { name: name.into(), observed, relation: Relation::AtMost, limit, passed: observed <= limit }
    }

    pub fn below(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Check { name: name.into(), observed, relation: Relation::Below, limit, passed: observed < limit }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Check { name: name.into(), observed, relation: Relation::AtLeast, limit, passed: observed >= limit }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
        };
        let tag = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{tag} {}: {:.6} {rel} {}", self.name, self.observed, self.limit)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteOutcome {
    fn new(name: &str, checks: Vec<Check>, metrics: BTreeMap<String, f64>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        SuiteOutcome { name: name.to_string(), passed, checks, metrics }
    }

    /// A suite that could not run to completion.
    pub fn errored(name: &str, err: &ExperimentError) -> Self {
        SuiteOutcome {
            name: name.to_string(),
            passed: false,
            checks: vec![Check::at_most(format!("error: {err}"), f64::NAN, 0.0)],
            metrics: BTreeMap::new(),
        }
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = if self.passed { "PASS" } else { "FAIL" };
        let body: Vec<String> = self.checks.iter().map(|c| c.to_string()).collect();
        write!(f, "{head} {} [{}]", self.name, body.join("; "))
    }
}

fn metrics<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub(crate) fn replica_rng(seed: u64, replica: usize, purpose: u64) -> SimRng {
    stream_rng(seed, replica_stream(replica as u64, purpose))
}

/// Maps `f` over `0..n` on the current thread pool, in replica order.
pub(crate) fn par_collect<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

fn unit_ball() -> Ball {
    Ball::centered(1.0)
}

/// Uniform points of the box `[-outer, outer]^d` with norm in `[inner, outer]`.
pub fn annulus_targets(dim: usize, inner: f64, outer: f64, n: usize, rng: &mut SimRng) -> Vec<Point> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mut c = [0.0; crate::point::MAX_DIM];
        for v in c.iter_mut().take(dim) {
            *v = rng.random_range(-outer..outer);
        }
        let p = Point(c);
        let r = p.norm();
        if r >= inner && r <= outer {
            out.push(p);
        }
    }
    out
}

/// Outcome of one speed replica.
#[derive(Debug, Clone, Serialize)]
pub struct SpeedSample {
    pub speed: Option<f64>,
    pub boundary_touch_time: Option<f64>,
    /// Horizon of the field actually simulated.
    pub horizon: f64,
    pub points: usize,
    pub error: Option<String>,
}

impl SpeedSample {
    fn failed(err: ExperimentError) -> Self {
        SpeedSample { speed: None, boundary_touch_time: None, horizon: f64::NAN, points: 0, error: Some(err.to_string()) }
    }
}

fn speed_values(samples: &[SpeedSample]) -> Result<Vec<f64>, ExperimentError> {
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.speed.ok_or_else(|| {
                ExperimentError::Suite(format!("replica {i} failed: {}", s.error.clone().unwrap_or_default()))
            })
        })
        .collect()
}

/// Reach-regression speed of replica `replica`: sweep of a field on
/// `[-L, L]^d x [0, T]` from the unit ball, stopped at the first emission
/// leaving the window.
pub fn reach_speed_sample(law: &RadiusLaw, dim: usize, half_width: f64, horizon: f64, seed: u64, replica: usize) -> SpeedSample {
    let run = || -> Result<SpeedSample, ExperimentError> {
        let window = Window::new(dim, half_width)?;
        let mut rng = replica_rng(seed, replica, purpose::FIELD);
        let field = sample_growth_field_with(window, horizon, law, seed, DEFAULT_CAPACITY, &mut rng)?;
        let opts = SweepOptions {
            record_region: false,
            record_accepted: false,
            stop_at_boundary: true,
            stop_time: horizon,
            ..SweepOptions::default()
        };
        let trace = sweep_simulate_with(&field, unit_ball(), &opts);
        let speed = trace_speed(&trace)?;
        Ok(SpeedSample {
            speed: Some(speed),
            boundary_touch_time: trace.boundary_touch_time,
            horizon,
            points: field.len(),
            error: None,
        })
    };
    run().unwrap_or_else(SpeedSample::failed)
}

/// Passage-regression speed of replica `replica` over `n_targets` points of
/// the annulus `0.25 L <= |x| <= 0.85 L`, the horizon doubling from
/// `initial_horizon` until every target time is exact.
pub fn passage_speed_sample(
    law: &RadiusLaw,
    dim: usize,
    half_width: f64,
    initial_horizon: f64,
    n_targets: usize,
    seed: u64,
    replica: usize,
) -> SpeedSample {
    let run = || -> Result<SpeedSample, ExperimentError> {
        let window = Window::new(dim, half_width)?;
        let mut trng = replica_rng(seed, replica, purpose::TARGETS);
        let targets = annulus_targets(dim, 0.25 * half_width, 0.85 * half_width, n_targets, &mut trng);
        let mut rng = replica_rng(seed, replica, purpose::FIELD);
        let spec = AdaptiveSpec {
            window,
            law,
            seed,
            initial_horizon,
            capacity: DEFAULT_CAPACITY,
            seed_region: unit_ball(),
        };
        let opts = SweepOptions {
            targets: targets.clone(),
            record_region: false,
            record_accepted: false,
            stop_when_targets_done: true,
            ..SweepOptions::default()
        };
        let run = grow_adaptive(&spec, &opts, &mut rng, |tr| tr.target_times.iter().all(|&t| t <= tr.horizon))?;
        let h = run.field.horizon;
        let samples: Vec<(f64, f64)> = targets
            .iter()
            .zip(&run.trace.target_times)
            .filter(|(_, &t)| t <= h)
            .map(|(x, &t)| (x.norm(), t))
            .collect();
        let speed = passage_speed(&samples)?;
        Ok(SpeedSample {
            speed: Some(speed),
            boundary_touch_time: run.trace.boundary_touch_time,
            horizon: h,
            points: run.field.len(),
            error: None,
        })
    };
    run().unwrap_or_else(SpeedSample::failed)
}

pub const EXACT_SPEED_D1: &str = "d1-exact-speed";
pub const RENEWAL_EXACTNESS: &str = "renewal-exactness";
pub const SCALING_LAW: &str = "scaling-law";
pub const CONSTRUCTION_EQUIVALENCE: &str = "construction-equivalence";
pub const TRIANGLE_INEQUALITY: &str = "triangle-inequality";
pub const DOMINATION: &str = "domination";
pub const CLASSIFIER: &str = "classifier";
pub const SUPERLINEAR_DICHOTOMY: &str = "superlinear-dichotomy";
pub const GREEDY_ORACLE: &str = "greedy-oracle";
pub const D1_CEILING: &str = "d1-ceiling";
pub const LINK_INEQUALITY: &str = "link-inequality";
pub const ISOTROPY: &str = "isotropy";

pub const ALL_SUITES: [&str; 12] = [
    EXACT_SPEED_D1,
    RENEWAL_EXACTNESS,
    SCALING_LAW,
    CONSTRUCTION_EQUIVALENCE,
    TRIANGLE_INEQUALITY,
    DOMINATION,
    CLASSIFIER,
    SUPERLINEAR_DICHOTOMY,
    GREEDY_ORACLE,
    D1_CEILING,
    LINK_INEQUALITY,
    ISOTROPY,
];

/// Runs a suite by name with default parameters.
pub fn run_suite(name: &str) -> Result<SuiteOutcome, ExperimentError> {
    match name {
        EXACT_SPEED_D1 => exact_speed_d1(&ExactSpeedD1::default()),
        RENEWAL_EXACTNESS => renewal_exactness(&RenewalExactness::default()),
        SCALING_LAW => scaling_law(&ScalingLaw::default()),
        CONSTRUCTION_EQUIVALENCE => construction_equivalence(&ConstructionEquivalence::default()),
        TRIANGLE_INEQUALITY => triangle_inequality(&TriangleInequality::default()),
        DOMINATION => domination(&Domination::default()),
        CLASSIFIER => classifier(&Classifier::default()),
        SUPERLINEAR_DICHOTOMY => superlinear_dichotomy(&SuperlinearDichotomy::default()),
        GREEDY_ORACLE => greedy_oracle(&GreedyOracle::default()),
        D1_CEILING => d1_ceiling(&D1Ceiling::default()),
        LINK_INEQUALITY => link_inequality(&LinkInequality::default()),
        ISOTROPY => isotropy(&Isotropy::default()),
        other => Err(ExperimentError::ConfigInvalid {
            field: "suites".into(),
            message: format!("unknown suite `{other}`; known: {}", ALL_SUITES.join(", ")),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct ExactSpeedD1 {
    pub half_width: f64,
    pub horizon: f64,
    pub replicas: usize,
    pub seed: u64,
    pub rel_tolerance: f64,
}

impl Default for ExactSpeedD1 {
    fn default() -> Self {
        ExactSpeedD1 { half_width: 600.0, horizon: 1000.0, replicas: 20, seed: 1, rel_tolerance: 0.05 }
    }
}

/// Mean reach-regression speed of dirac(1) in dimension 1 against `E R^2 / 2`.
pub fn exact_speed_d1(p: &ExactSpeedD1) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let samples = par_collect(p.replicas, |i| reach_speed_sample(&law, 1, p.half_width, p.horizon, p.seed, i));
    let s = Summary::of(&speed_values(&samples)?);
    let exact = law.moment(2.0).value().unwrap_or(f64::NAN) / 2.0;
    let rel = (s.mean / exact - 1.0).abs();
    Ok(SuiteOutcome::new(
        EXACT_SPEED_D1,
        vec![Check::at_most("relative error of the mean speed", rel, p.rel_tolerance)],
        metrics([("mean_speed", s.mean), ("se", s.se), ("exact_speed", exact)]),
    ))
}

#[derive(Debug, Clone)]
pub struct RenewalExactness {
    pub n_steps: usize,
    pub seed: u64,
    pub dirac_rel_tolerance: f64,
    pub pareto_rel_tolerance: f64,
}

impl Default for RenewalExactness {
    fn default() -> Self {
        RenewalExactness { n_steps: 1_000_000, seed: 2, dirac_rel_tolerance: 0.005, pareto_rel_tolerance: 0.01 }
    }
}

/// Renewal speeds of dirac(1) and pareto(4, 1) against `E R^2 / 2`.
pub fn renewal_exactness(p: &RenewalExactness) -> Result<SuiteOutcome, ExperimentError> {
    let cases = [(RadiusLaw::dirac(1.0)?, p.dirac_rel_tolerance), (RadiusLaw::pareto(4.0, 1.0)?, p.pareto_rel_tolerance)];
    let mut checks = Vec::new();
    let mut m = BTreeMap::new();
    for (i, (law, tol)) in cases.iter().enumerate() {
        let mut rng = replica_rng(p.seed, i, purpose::RENEWAL);
        let est = halfline_renewal_d1(law, p.n_steps, &mut rng)?;
        let exact = law.moment(2.0).value().unwrap_or(f64::NAN) / 2.0;
        checks.push(Check::at_most(format!("relative error for {law}"), (est.speed / exact - 1.0).abs(), *tol));
        m.insert(format!("speed[{law}]"), est.speed);
        m.insert(format!("exact[{law}]"), exact);
    }
    Ok(SuiteOutcome::new(RENEWAL_EXACTNESS, checks, m))
}

#[derive(Debug, Clone)]
pub struct ScalingLaw {
    pub d1_half_width: f64,
    pub d1_horizon: f64,
    pub d1_replicas: usize,
    pub d1_rel_tolerance: f64,
    pub d2_half_width: f64,
    /// Initial horizon for dirac(1); the scaled law starts from this over 8.
    pub d2_horizon: f64,
    pub d2_targets: usize,
    pub d2_replicas: usize,
    pub d2_rel_tolerance: f64,
    pub seed: u64,
}

impl Default for ScalingLaw {
    fn default() -> Self {
        ScalingLaw {
            d1_half_width: 600.0,
            d1_horizon: 1000.0,
            d1_replicas: 20,
            d1_rel_tolerance: 0.05,
            d2_half_width: 150.0,
            d2_horizon: 140.0,
            d2_targets: 400,
            d2_replicas: 20,
            d2_rel_tolerance: 0.15,
            seed: 3,
        }
    }
}

/// Speed ratio of dirac(2) to dirac(1) against `2^{d+1}` in dimensions 1 and 2.
pub fn scaling_law(p: &ScalingLaw) -> Result<SuiteOutcome, ExperimentError> {
    let base = RadiusLaw::dirac(1.0)?;
    let doubled = RadiusLaw::dirac(2.0)?;
    let v1 = speed_values(&par_collect(p.d1_replicas, |i| {
        reach_speed_sample(&base, 1, p.d1_half_width, p.d1_horizon, p.seed, i)
    }))?;
    let v1s = speed_values(&par_collect(p.d1_replicas, |i| {
        reach_speed_sample(&doubled, 1, p.d1_half_width, p.d1_horizon / 4.0, p.seed + 1, i)
    }))?;
    let v2 = speed_values(&par_collect(p.d2_replicas, |i| {
        passage_speed_sample(&base, 2, p.d2_half_width, p.d2_horizon, p.d2_targets, p.seed + 2, i)
    }))?;
    let v2s = speed_values(&par_collect(p.d2_replicas, |i| {
        passage_speed_sample(&doubled, 2, p.d2_half_width, p.d2_horizon / 8.0, p.d2_targets, p.seed + 3, i)
    }))?;
    let (m1, m1s, m2, m2s) = (Summary::of(&v1).mean, Summary::of(&v1s).mean, Summary::of(&v2).mean, Summary::of(&v2s).mean);
    let r1 = m1s / m1;
    let r2 = m2s / m2;
    Ok(SuiteOutcome::new(
        SCALING_LAW,
        vec![
            Check::at_most("d=1 relative error of the ratio against 4", (r1 / 4.0 - 1.0).abs(), p.d1_rel_tolerance),
            Check::at_most("d=2 relative error of the ratio against 8", (r2 / 8.0 - 1.0).abs(), p.d2_rel_tolerance),
        ],
        metrics([
            ("d1_speed_dirac1", m1),
            ("d1_speed_dirac2", m1s),
            ("d1_ratio", r1),
            ("d2_speed_dirac1", m2),
            ("d2_speed_dirac2", m2s),
            ("d2_ratio", r2),
        ]),
    ))
}

#[derive(Debug, Clone)]
pub struct ConstructionEquivalence {
    pub realizations: usize,
    pub targets: usize,
    pub time_points: usize,
    pub d1_half_width: f64,
    pub d1_horizon: f64,
    pub d2_half_width: f64,
    pub d2_horizon: f64,
    pub ks_replicas: usize,
    pub ks_time: f64,
    pub ks_half_width: f64,
    pub ks_level: f64,
    pub seed: u64,
}

impl Default for ConstructionEquivalence {
    fn default() -> Self {
        ConstructionEquivalence {
            realizations: 10,
            targets: 1000,
            time_points: 16,
            d1_half_width: 30.0,
            d1_horizon: 40.0,
            d2_half_width: 10.0,
            d2_horizon: 10.0,
            ks_replicas: 200,
            ks_time: 50.0,
            ks_half_width: 60.0,
            ks_level: 0.01,
            seed: 4,
        }
    }
}

/// Membership mismatches between the sweep region and the passage-time
/// sublevel sets on one realization: `(mismatches, comparisons, max |time difference|)`.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_mismatches(
    law: &RadiusLaw,
    dim: usize,
    half_width: f64,
    horizon: f64,
    n_targets: usize,
    time_points: usize,
    seed: u64,
    replica: usize,
) -> Result<(u64, u64, f64), ExperimentError> {
    let window = Window::new(dim, half_width)?;
    let field = sample_growth_field_with(window, horizon, law, seed, DEFAULT_CAPACITY, &mut replica_rng(seed, replica, purpose::FIELD))?;
    let mut trng = replica_rng(seed, replica, purpose::TARGETS);
    let targets: Vec<Point> = (0..n_targets).map(|_| window.sample(&mut trng)).collect();
    let opts = SweepOptions { targets: targets.clone(), stop_time: horizon, ..SweepOptions::default() };
    let trace = sweep_simulate_with(&field, unit_ball(), &opts);
    let map = passage_times(&field, unit_ball(), &targets);
    let mut mismatches = 0;
    let mut checked = 0;
    for j in 1..=time_points {
        let t = horizon * j as f64 / time_points as f64;
        for (x, &v) in targets.iter().zip(&map.values) {
            checked += 1;
            if trace.covers_at(x, t) != (v <= t) {
                mismatches += 1;
            }
        }
    }
    let max_diff = trace
        .target_times
        .iter()
        .zip(&map.values)
        .filter(|(a, b)| a.min(**b) <= horizon)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((mismatches, checked, max_diff))
}

pub fn construction_equivalence(p: &ConstructionEquivalence) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let mut checks = Vec::new();
    let mut m = BTreeMap::new();
    for (dim, hw, h) in [(1, p.d1_half_width, p.d1_horizon), (2, p.d2_half_width, p.d2_horizon)] {
        let runs = par_collect(p.realizations, |i| {
            equivalence_mismatches(&law, dim, hw, h, p.targets, p.time_points, p.seed + dim as u64, i)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let mismatches: u64 = runs.iter().map(|r| r.0).sum();
        let checked: u64 = runs.iter().map(|r| r.1).sum();
        let diff = runs.iter().map(|r| r.2).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("d={dim} membership mismatches"), mismatches as f64, 0.0));
        m.insert(format!("d{dim}_comparisons"), checked as f64);
        m.insert(format!("d{dim}_max_time_difference"), diff);
    }
    let b = unit_ball();
    let markov: Vec<f64> = par_collect(p.ks_replicas, |i| {
        let mut rng = replica_rng(p.seed, i, purpose::MARKOV);
        markov_simulate_d1(&law, p.ks_time, b, &mut rng).reach_at(p.ks_time)
    });
    let sweep = par_collect(p.ks_replicas, |i| -> Result<(f64, bool), ExperimentError> {
        let window = Window::new(1, p.ks_half_width)?;
        let mut rng = replica_rng(p.seed + 10, i, purpose::FIELD);
        let field = sample_growth_field_with(window, p.ks_time, &law, p.seed, DEFAULT_CAPACITY, &mut rng)?;
        let opts = SweepOptions {
            record_region: false,
            record_accepted: false,
            stop_time: p.ks_time,
            ..SweepOptions::default()
        };
        let tr = sweep_simulate_with(&field, b, &opts);
        Ok((tr.reach_at(p.ks_time), tr.valid_until() >= p.ks_time))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let truncated = sweep.iter().filter(|s| !s.1).count();
    let sweep: Vec<f64> = sweep.into_iter().map(|s| s.0).collect();
    let ks = ks_two_sample(&markov, &sweep);
    checks.push(Check::at_least("KS p-value of reach at the fixed time", ks.p_value, p.ks_level));
    m.insert("ks_statistic".into(), ks.statistic);
    m.insert("ks_truncated_replicas".into(), truncated as f64);
    Ok(SuiteOutcome::new(CONSTRUCTION_EQUIVALENCE, checks, m))
}

#[derive(Debug, Clone)]
pub struct TriangleInequality {
    pub realizations: usize,
    /// Balls `A` and balls `C` per realization; every pair gives a triple.
    pub sources: usize,
    pub half_width: f64,
    pub horizon: f64,
    pub net_spacing: f64,
    pub rel_slack: f64,
    pub seed: u64,
}

impl Default for TriangleInequality {
    fn default() -> Self {
        TriangleInequality {
            realizations: 100,
            sources: 10,
            half_width: 10.0,
            horizon: 8.0,
            net_spacing: 0.25,
            rel_slack: 1e-12,
            seed: 5,
        }
    }
}

fn random_ball(dim: usize, extent: f64, rng: &mut SimRng) -> Ball {
    let mut c = [0.0; crate::point::MAX_DIM];
    for v in c.iter_mut().take(dim) {
        *v = rng.random_range(-extent..extent);
    }
    Ball::new(Point(c), rng.random_range(0.5..1.5))
}

/// Passage times from one source ball, queried point by point.
struct SourceTimes {
    source: Ball,
    region: crate::geometry::RegionUnion,
}

impl SourceTimes {
    fn new(field: &crate::field::GrowthField, source: Ball) -> Self {
        let (region, _) = center_passage_times(field, &source).emission_region(field);
        SourceTimes { source, region }
    }

    fn time(&self, x: &Point) -> f64 {
        if self.source.contains(x) {
            0.0
        } else {
            self.region.earliest_hit(x).map_or(f64::INFINITY, |h| h.0)
        }
    }

    /// `sup_{c in C} T(A, c)` over a net of `C` together with the field
    /// centers inside `C`.
    fn sup_over(&self, field: &crate::field::GrowthField, set: &Ball, spacing: f64) -> f64 {
        ball_net(set, field.dim(), spacing)
            .iter()
            .chain(field.points.iter().filter(|p| set.contains(&p.center)).map(|p| &p.center))
            .map(|x| self.time(x))
            .fold(0.0, f64::max)
    }
}

/// Triangle-inequality checks on one realization over every pair of
/// `sources x sources` random balls: `(violations, finite triples)`.
pub fn triangle_violations(p: &TriangleInequality, law: &RadiusLaw, replica: usize) -> Result<(u64, u64), ExperimentError> {
    let dim = 2;
    let window = Window::new(dim, p.half_width)?;
    let field = sample_growth_field_with(window, p.horizon, law, p.seed, DEFAULT_CAPACITY, &mut replica_rng(p.seed, replica, purpose::FIELD))?;
    let mut rng = replica_rng(p.seed, replica, purpose::GEOMETRY);
    let extent = 0.4 * p.half_width;
    let from_a: Vec<SourceTimes> =
        (0..p.sources).map(|_| SourceTimes::new(&field, random_ball(dim, extent, &mut rng))).collect();
    let from_c: Vec<SourceTimes> =
        (0..p.sources).map(|_| SourceTimes::new(&field, random_ball(dim, extent, &mut rng))).collect();
    let (mut violations, mut finite) = (0, 0);
    for a in &from_a {
        for c in &from_c {
            let d = loop {
                let x = random_ball(dim, extent, &mut rng).center;
                if !c.source.contains(&x) {
                    break x;
                }
            };
            let rhs = a.sup_over(&field, &c.source, p.net_spacing) + c.time(&d);
            if rhs.is_finite() {
                finite += 1;
                if a.time(&d) > rhs + p.rel_slack * rhs.max(1.0) {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations, finite))
}

/// `T(A, d) <= T(A, C) + T(C, d)` for random balls `A`, `C` and points `d` outside `C`.
pub fn triangle_inequality(p: &TriangleInequality) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let runs = par_collect(p.realizations, |i| triangle_violations(p, &law, i))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let violations: u64 = runs.iter().map(|r| r.0).sum();
    let finite: u64 = runs.iter().map(|r| r.1).sum();
    let total = (p.realizations * p.sources * p.sources) as f64;
    Ok(SuiteOutcome::new(
        TRIANGLE_INEQUALITY,
        vec![Check::at_most("violations", violations as f64, 0.0)],
        metrics([("triples", total), ("finite_triples", finite as f64)]),
    ))
}

#[derive(Debug, Clone)]
pub struct Domination {
    pub law: RadiusLaw,
    pub dim: usize,
    pub gamma: f64,
    pub half_width: f64,
    pub replicas: usize,
    pub norms: Vec<f64>,
    pub radii: Vec<f64>,
    pub shifted_spacing: f64,
    pub ball_spacing: f64,
    pub chain_samples: usize,
    pub initial_horizon: f64,
    pub se_multiplier: f64,
    pub seed: u64,
}

impl Default for Domination {
    fn default() -> Self {
        Domination {
            law: RadiusLaw::Dirac { r0: 6.0 },
            dim: 2,
            gamma: 1.0,
            half_width: 60.0,
            replicas: 500,
            norms: vec![6.0, 12.0, 24.0],
            radii: vec![10.0, 20.0, 40.0],
            shifted_spacing: 0.1,
            ball_spacing: 0.5,
            chain_samples: 20_000,
            initial_horizon: 0.5,
            se_multiplier: 3.0,
            seed: 6,
        }
    }
}

const MAX_DOUBLINGS: usize = 40;

/// `T(B_gamma, x + B_gamma)` for `x = |x| e_1` at each norm and
/// `T(B_gamma, B_r)` at each radius, as suprema over nets, on one realization.
pub fn domination_replica(p: &Domination, replica: usize) -> Result<(Vec<f64>, Vec<f64>), ExperimentError> {
    let (law, dim) = (&p.law, p.dim);
    let window = Window::new(dim, p.half_width)?;
    let mut rng = replica_rng(p.seed, replica, purpose::FIELD);
    let mut field = sample_growth_field_with(window, p.initial_horizon, law, p.seed, DEFAULT_CAPACITY, &mut rng)?;
    let source = Ball::centered(p.gamma);
    let shifted: Vec<Vec<Point>> =
        p.norms.iter().map(|&n| ball_net(&Ball::new(Point::on_axis(n), p.gamma), dim, p.shifted_spacing)).collect();
    let balls: Vec<Vec<Point>> = p.radii.iter().map(|&r| ball_net(&Ball::centered(r), dim, p.ball_spacing)).collect();
    for _ in 0..MAX_DOUBLINGS {
        let centers = center_passage_times(&field, &source);
        let (region, _) = centers.emission_region(&field);
        let sup = |net: &Vec<Point>| {
            net.iter()
                .map(|x| if source.contains(x) { 0.0 } else { region.earliest_hit(x).map_or(f64::INFINITY, |h| h.0) })
                .fold(0.0, f64::max)
        };
        let a: Vec<f64> = shifted.iter().map(sup).collect();
        let b: Vec<f64> = balls.iter().map(sup).collect();
        if a.iter().chain(&b).all(|&t| t <= field.horizon) {
            return Ok((a, b));
        }
        let h = 2.0 * field.horizon;
        extend_growth_field(&mut field, law, h, DEFAULT_CAPACITY, &mut rng)?;
    }
    Err(ExperimentError::Suite(format!("replica {replica}: passage times not resolved after {MAX_DOUBLINGS} doublings")))
}

/// Domination of `T(B_gamma, x + B_gamma)` by the exponential chain at every
/// decile, and decay of `P(T(B_gamma, B_r) >= a r)` in `r`.
pub fn domination(p: &Domination) -> Result<SuiteOutcome, ExperimentError> {
    let runs = par_collect(p.replicas, |i| domination_replica(p, i)).into_iter().collect::<Result<Vec<_>, _>>()?;
    domination_outcome(p, &runs)
}

/// Evaluates the domination checks on per-replica results of [`domination_replica`].
pub fn domination_outcome(p: &Domination, runs: &[(Vec<f64>, Vec<f64>)]) -> Result<SuiteOutcome, ExperimentError> {
    let spec = DominationChainSpec::new(&p.law, p.dim, p.gamma)?;
    let mut m = BTreeMap::new();
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (k, &norm) in p.norms.iter().enumerate() {
        let t: Vec<f64> = runs.iter().map(|r| r.0[k]).collect();
        let x = Point::on_axis(norm);
        let mut rng = replica_rng(p.seed, k, purpose::CHAIN);
        let chain: Vec<f64> = (0..p.chain_samples).map(|_| domination_chain_sample(&spec, &x, &mut rng)).collect();
        for q in 1..=9 {
            let s = quantile(&t, q as f64 / 10.0);
            let (pt, se_t) = survival(&t, s);
            let (pc, se_c) = survival(&chain, s);
            let excess = pt - pc - p.se_multiplier * (se_t * se_t + se_c * se_c).sqrt();
            worst = worst.max(excess);
            if excess > 0.0 {
                violations += 1;
            }
        }
        m.insert(format!("mean_T[{norm}]"), Summary::of(&t).mean);
        m.insert(format!("chain_mean[{norm}]"), spec.mean(&x));
    }
    let t10: Vec<f64> = runs.iter().map(|r| r.1[0]).collect();
    let a = quantile(&t10, 0.5) / p.radii[0];
    let mut logs = Vec::new();
    for (k, &r) in p.radii.iter().enumerate() {
        let n = runs.len() as f64;
        let tail = runs.iter().filter(|run| run.1[k] >= a * r).count() as f64 / n;
        m.insert(format!("P(T_r >= a r)[{r}]"), tail);
        logs.push(tail.ln());
    }
    let slope = ols_slope(&p.radii, &logs).unwrap_or(f64::NAN);
    let slope = if slope.is_nan() && logs.last() == Some(&f64::NEG_INFINITY) { f64::NEG_INFINITY } else { slope };
    m.insert("a".into(), a);
    m.insert("chain_rate".into(), spec.rate);
    m.insert("worst_decile_excess".into(), worst);
    Ok(SuiteOutcome::new(
        DOMINATION,
        vec![
            Check::at_most("decile survival exceedances", violations as f64, 0.0),
            Check::below("slope of log P(T_r >= a r) in r", slope, 0.0),
        ],
        m,
    ))
}

#[derive(Debug, Clone)]
pub struct Classifier {
    pub epsilon: f64,
    pub rel_tolerance: f64,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier { epsilon: 0.1, rel_tolerance: 1e-12 }
    }
}

/// Closed forms of `(int_0^inf (int_x^inf r mu(dr))^{1/d} dx, E R^{d+1})`.
fn classifier_oracle(law: &RadiusLaw, d: usize) -> (f64, f64) {
    let df = d as f64;
    match *law {
        RadiusLaw::Dirac { r0 } => (r0 * r0.powf(1.0 / df), r0.powf(df + 1.0)),
        RadiusLaw::Pareto { beta, rmin } => {
            let cond1 = if beta - 1.0 > df {
                // flat part on [0, rmin] plus the power tail beyond
                let head = rmin * (beta * rmin / (beta - 1.0)).powf(1.0 / df);
                let c = (beta * rmin.powf(beta) / (beta - 1.0)).powf(1.0 / df);
                let e = (1.0 - beta) / df + 1.0;
                head + c * rmin.powf(e) / -e
            } else {
                f64::INFINITY
            };
            let cond2 = if beta > df + 1.0 { beta * rmin.powf(df + 1.0) / (beta - df - 1.0) } else { f64::INFINITY };
            (cond1, cond2)
        }
        RadiusLaw::LogPareto { beta, kappa, rmin } => {
            // Only the boundary case beta = d + 1 is tabulated:
            // E R^{d+1} = rmin^{d+1} (1 + (d+1) / (kappa - 1)).
            let cond1 = if (beta - 1.0) / df > 1.0 { f64::NAN } else { f64::INFINITY };
            let cond2 = if beta == df + 1.0 && kappa > 1.0 {
                rmin.powf(df + 1.0) * (1.0 + (df + 1.0) / (kappa - 1.0))
            } else {
                f64::NAN
            };
            (cond1, cond2)
        }
        _ => (f64::NAN, f64::NAN),
    }
}

fn matches_oracle(value: Option<f64>, oracle: f64, tol: f64) -> bool {
    match value {
        None => oracle.is_infinite(),
        Some(v) => oracle.is_finite() && ((v - oracle).abs() <= tol * oracle.abs().max(1.0)),
    }
}

/// Verdicts and condition values of the growth classifier against closed forms.
pub fn classifier(p: &Classifier) -> Result<SuiteOutcome, ExperimentError> {
    let mut table = vec![
        (RadiusLaw::pareto(4.0, 1.0)?, 2, Verdict::Linear),
        (RadiusLaw::pareto(2.5, 1.0)?, 2, Verdict::Superlinear),
        (RadiusLaw::logpareto(3.0, 1.5, 1.0)?, 2, Verdict::Indeterminate),
        (RadiusLaw::pareto(3.0, 1.0)?, 1, Verdict::Linear),
        (RadiusLaw::pareto(2.0, 1.0)?, 1, Verdict::Superlinear),
    ];
    for r0 in [0.5, 1.0, 2.5, 7.0] {
        for d in 1..=3 {
            table.push((RadiusLaw::dirac(r0)?, d, Verdict::Linear));
        }
    }
    let mut mismatches = 0;
    for (law, d, expected) in &table {
        let c = law.classify_growth(*d, p.epsilon)?;
        let (o1, o2) = classifier_oracle(law, *d);
        let ok = c.verdict == *expected
            && matches_oracle(c.condition1_value.value(), o1, p.rel_tolerance)
            && matches_oracle(c.condition2_value.value(), o2, p.rel_tolerance);
        if !ok {
            mismatches += 1;
        }
    }
    Ok(SuiteOutcome::new(
        CLASSIFIER,
        vec![Check::at_most("mismatches against the closed forms", mismatches as f64, 0.0)],
        metrics([("cases", table.len() as f64)]),
    ))
}

#[derive(Debug, Clone)]
pub struct SuperlinearDichotomy {
    pub heavy_beta: f64,
    pub heavy_scales: Vec<f64>,
    pub light_beta: f64,
    pub light_scales: Vec<f64>,
    pub replicas: usize,
    pub initial_horizon: f64,
    pub min_decade_ratio: f64,
    pub flatness: f64,
    pub seed: u64,
}

impl Default for SuperlinearDichotomy {
    fn default() -> Self {
        SuperlinearDichotomy {
            heavy_beta: 1.5,
            heavy_scales: vec![1e2, 1e3, 1e4],
            light_beta: 4.0,
            light_scales: vec![250.0, 500.0, 1000.0],
            replicas: 20,
            initial_horizon: 1.0,
            min_decade_ratio: 1.5,
            flatness: 0.1,
            seed: 8,
        }
    }
}

/// Traces of dimension 1 on the window `[-L, L]`, `L` the largest scale,
/// grown until the reach attains `L`.
pub fn traces_to_scale(law: &RadiusLaw, scale: f64, replicas: usize, initial_horizon: f64, seed: u64) -> Result<Vec<GrowthTrace>, ExperimentError> {
    par_collect(replicas, |i| -> Result<GrowthTrace, ExperimentError> {
        let spec = AdaptiveSpec {
            window: Window::new(1, scale)?,
            law,
            seed,
            initial_horizon,
            capacity: DEFAULT_CAPACITY,
            seed_region: unit_ball(),
        };
        let opts = SweepOptions {
            record_region: false,
            record_accepted: false,
            stop_at_boundary: true,
            stop_at_reach: scale,
            ..SweepOptions::default()
        };
        let mut rng = replica_rng(seed, i, purpose::FIELD);
        let run = grow_adaptive(&spec, &opts, &mut rng, |tr| tr.hitting_time(scale).is_some())?;
        Ok(run.trace)
    })
    .into_iter()
    .collect()
}

/// Apparent speeds of a heavy-tailed law increase across scales while those
/// of a light-tailed law stay flat.
pub fn superlinear_dichotomy(p: &SuperlinearDichotomy) -> Result<SuiteOutcome, ExperimentError> {
    let heavy = RadiusLaw::pareto(p.heavy_beta, 1.0)?;
    let light = RadiusLaw::pareto(p.light_beta, 1.0)?;
    let top = |s: &[f64]| s.last().copied().unwrap_or(1.0);
    let ht = traces_to_scale(&heavy, top(&p.heavy_scales), p.replicas, p.initial_horizon, p.seed)?;
    let hc = window_curve(&ht, &p.heavy_scales)?;
    let lt = traces_to_scale(&light, top(&p.light_scales), p.replicas, p.initial_horizon, p.seed + 1)?;
    let lc = window_curve(&lt, &p.light_scales)?;
    let min_ratio = hc.windows(2).map(|w| w[1].1 / w[0].1).fold(f64::INFINITY, f64::min);
    let lmax = lc.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let lmin = lc.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut m = BTreeMap::new();
    for (s, v) in &hc {
        m.insert(format!("heavy_speed[{s}]"), *v);
    }
    for (s, v) in &lc {
        m.insert(format!("light_speed[{s}]"), *v);
    }
    Ok(SuiteOutcome::new(
        SUPERLINEAR_DICHOTOMY,
        vec![
            Check::at_least("heavy tail: smallest speed ratio per decade", min_ratio, p.min_decade_ratio),
            Check::at_most("light tail: max/min speed - 1", lmax / lmin - 1.0, p.flatness),
        ],
        m,
    ))
}

#[derive(Debug, Clone)]
pub struct GreedyOracle {
    pub instances: usize,
    pub half_width: f64,
    pub k: usize,
    pub budget: usize,
    pub min_agreement: f64,
    pub scaling_realizations: usize,
    pub scales: Vec<f64>,
    pub scaling_tolerance: f64,
    pub seed: u64,
}

impl Default for GreedyOracle {
    fn default() -> Self {
        GreedyOracle {
            instances: 100,
            half_width: 3.0,
            k: 8,
            budget: 32,
            min_agreement: 0.9,
            scaling_realizations: 50,
            scales: vec![0.25, 4.0],
            scaling_tolerance: 1e-12,
            seed: 9,
        }
    }
}

/// Heuristic against exact suprema on small instances, and the exact scaling identity.
pub fn greedy_oracle(p: &GreedyOracle) -> Result<SuiteOutcome, ExperimentError> {
    let dim = 2;
    let measure = WeightMeasure::unit(1.0);
    let window = Window::new(dim, p.half_width)?;
    let fields = par_collect(p.instances.max(p.scaling_realizations), |i| {
        sample_weight_field_with(window, &measure, p.seed, DEFAULT_CAPACITY, &mut replica_rng(p.seed, i, purpose::WEIGHTS))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let pairs = par_collect(p.instances, |i| -> Result<(f64, f64), ExperimentError> {
        let exact = exact_supremum(&fields[i], p.k, None)?.value;
        let opts = HeuristicOptions { budget: p.budget, max_points: Some(p.k), seed: replica_stream(i as u64, purpose::HEURISTIC), ..HeuristicOptions::default() };
        let heur = heuristic_supremum(&fields[i], &opts, None)?.value;
        Ok((exact, heur))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let above = pairs.iter().filter(|(e, h)| *h > e * (1.0 + 1e-12)).count();
    let equal = pairs.iter().filter(|(e, h)| (h - e).abs() <= 1e-12 * e.abs()).count();
    let errs = par_collect(p.scaling_realizations, |i| -> Result<f64, ExperimentError> {
        let base = exact_supremum(&fields[i], p.k, None)?.value;
        let mut worst: f64 = 0.0;
        for &s in &p.scales {
            let scaled = exact_supremum(&scale_field(&fields[i], s)?, p.k, None)?.value;
            let back = scaled * s.powf(1.0 / dim as f64);
            worst = worst.max(if base == 0.0 { back.abs() } else { (back - base).abs() / base });
        }
        Ok(worst)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let agreement = equal as f64 / p.instances as f64;
    Ok(SuiteOutcome::new(
        GREEDY_ORACLE,
        vec![
            Check::at_most("instances with heuristic above exact", above as f64, 0.0),
            Check::at_least("fraction of instances with heuristic equal to exact", agreement, p.min_agreement),
            Check::at_most("worst relative error of the scaling identity", worst, p.scaling_tolerance),
        ],
        metrics([
            ("instances", p.instances as f64),
            ("mean_points", fields.iter().map(|f| f.len() as f64).sum::<f64>() / fields.len() as f64),
        ]),
    ))
}

#[derive(Debug, Clone)]
pub struct D1Ceiling {
    pub replicas: usize,
    pub half_width: f64,
    pub min_length: f64,
    pub alpha: f64,
    pub se_multiplier: f64,
    pub seed: u64,
}

impl Default for D1Ceiling {
    fn default() -> Self {
        D1Ceiling { replicas: 50, half_width: 200.0, min_length: 100.0, alpha: 1.0, se_multiplier: 3.0, seed: 10 }
    }
}

/// Windowed `S_l` in dimension 1 against `2 int r nu(dr)` on average and the
/// pathwise ceiling on every replica.
pub fn d1_ceiling(p: &D1Ceiling) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let measure = WeightMeasure::fast_ball(law, p.alpha);
    let window = Window::new(1, p.half_width)?;
    let runs = par_collect(p.replicas, |i| -> Result<(f64, f64), ExperimentError> {
        let f = sample_weight_field_with(window, &measure, p.seed, DEFAULT_CAPACITY, &mut replica_rng(p.seed, i, purpose::WEIGHTS))?;
        Ok(d1_ceiling_check(&f, p.min_length)?)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let violations = runs.iter().filter(|(v, c)| *v > c * (1.0 + 1e-12)).count();
    let s = Summary::of(&values);
    let bound = 2.0 * p.alpha * law.moment(2.0).value().unwrap_or(f64::NAN);
    Ok(SuiteOutcome::new(
        D1_CEILING,
        vec![
            Check::at_most("mean S_l minus se margin", s.mean - p.se_multiplier * s.se, bound),
            Check::at_most("pathwise ceiling violations", violations as f64, 0.0),
        ],
        metrics([("mean", s.mean), ("se", s.se), ("bound", bound)]),
    ))
}

#[derive(Debug, Clone)]
pub struct LinkInequality {
    pub realizations: usize,
    pub alphas: Vec<f64>,
    pub half_width: f64,
    pub horizon: f64,
    pub max_norm: f64,
    pub seed: u64,
}

impl Default for LinkInequality {
    fn default() -> Self {
        LinkInequality { realizations: 500, alphas: vec![0.1, 0.3], half_width: 8.0, horizon: 12.0, max_norm: 6.0, seed: 11 }
    }
}

/// Per-realization link checks: `(violations, checked, unreachable)`.
pub fn link_violations(p: &LinkInequality, law: &RadiusLaw, replica: usize) -> Result<(u64, u64, u64), ExperimentError> {
    let window = Window::new(2, p.half_width)?;
    let field = sample_growth_field_with(window, p.horizon, law, p.seed, DEFAULT_CAPACITY, &mut replica_rng(p.seed, replica, purpose::FIELD))?;
    let x = annulus_targets(2, 1.0 + 1e-9, p.max_norm, 1, &mut replica_rng(p.seed, replica, purpose::TARGETS))[0];
    let map = passage_times(&field, unit_ball(), &[x]);
    let t = map.values[0];
    let Some(witness) = map.witnesses[0].as_ref().filter(|_| t.is_finite()) else {
        return Ok((0, 0, p.alphas.len() as u64));
    };
    let mut path = vec![Point::ORIGIN];
    path.extend(witness.iter().map(|&i| field.points[i].center));
    path.push(x);
    let norm = x.norm();
    let mut violations = 0;
    for &alpha in &p.alphas {
        let fast = fast_thin(&field, law, alpha)?;
        let s_hat = path_score(&path, &fast)?.ratio;
        let rhs = alpha * (1.0 - s_hat - 1.0 / norm);
        if t / norm < rhs - 1e-12 * rhs.abs().max(1.0) {
            violations += 1;
        }
    }
    Ok((violations, p.alphas.len() as u64, 0))
}

/// `T(B, x) / |x| >= alpha (1 - S_hat - 1 / |x|)` along the optimal path, `S_hat`
/// the greedy ratio of that path extended from the origin in the fast-ball field.
pub fn link_inequality(p: &LinkInequality) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let runs = par_collect(p.realizations, |i| link_violations(p, &law, i))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let violations: u64 = runs.iter().map(|r| r.0).sum();
    let checked: u64 = runs.iter().map(|r| r.1).sum();
    let unreachable: u64 = runs.iter().map(|r| r.2).sum();
    Ok(SuiteOutcome::new(
        LINK_INEQUALITY,
        vec![Check::at_most("violations", violations as f64, 0.0)],
        metrics([("checked_pairs", checked as f64), ("unreachable_pairs", unreachable as f64)]),
    ))
}

#[derive(Debug, Clone)]
pub struct Isotropy {
    pub replicas: usize,
    pub radius: f64,
    pub directions: usize,
    pub half_width: f64,
    pub initial_horizon: f64,
    pub max_ratio: f64,
    pub seed: u64,
}

impl Default for Isotropy {
    fn default() -> Self {
        Isotropy { replicas: 20, radius: 50.0, directions: 8, half_width: 60.0, initial_horizon: 60.0, max_ratio: 1.1, seed: 12 }
    }
}

/// Directional speeds `radius / mean T(B, radius u_k)` over equally spaced directions.
pub fn isotropy(p: &Isotropy) -> Result<SuiteOutcome, ExperimentError> {
    let law = RadiusLaw::dirac(1.0)?;
    let targets: Vec<Point> = (0..p.directions)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / p.directions as f64;
            Point::new(&[p.radius * a.cos(), p.radius * a.sin()])
        })
        .collect();
    let runs = par_collect(p.replicas, |i| -> Result<Vec<f64>, ExperimentError> {
        let spec = AdaptiveSpec {
            window: Window::new(2, p.half_width)?,
            law: &law,
            seed: p.seed,
            initial_horizon: p.initial_horizon,
            capacity: DEFAULT_CAPACITY,
            seed_region: unit_ball(),
        };
        let opts = SweepOptions {
            targets: targets.clone(),
            record_region: false,
            record_accepted: false,
            stop_when_targets_done: true,
            ..SweepOptions::default()
        };
        let run = grow_adaptive(&spec, &opts, &mut replica_rng(p.seed, i, purpose::FIELD), |tr| {
            tr.target_times.iter().all(|&t| t <= tr.horizon)
        })?;
        Ok(run.trace.target_times)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let speeds: Vec<f64> = (0..p.directions)
        .map(|k| p.radius / Summary::of(&runs.iter().map(|r| r[k]).collect::<Vec<_>>()).mean)
        .collect();
    let max = speeds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = speeds.iter().copied().fold(f64::INFINITY, f64::min);
    let mut m = BTreeMap::new();
    for (k, v) in speeds.iter().enumerate() {
        m.insert(format!("speed[{k}]"), *v);
    }
    Ok(SuiteOutcome::new(ISOTROPY, vec![Check::at_most("max/min directional speed", max / min, p.max_ratio)], m))
}
