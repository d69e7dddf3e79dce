//! Growth dynamics and passage times.
//!
//! A center `c` with mark `(t, r)` that becomes reached at time `s` emits the
//! ball `c + B_r` at time `s + t`. The sweep processes emissions in time order,
//! which makes `S_t` equal, realization by realization, to the sublevel set
//! `{x : T(B, x) <= t}` computed by [`passage_times`].
//!
//! On a windowed field both are exact up to the first emission of a ball not
//! contained in the window, and up to the field horizon.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{extend_growth_field, sample_growth_field_with, FieldError, GrowthField, SpacetimePoint, Window};
use crate::geometry::{unit_ball_volume, Ball, PointGrid, RegionUnion};
use crate::point::Point;
use crate::radius::RadiusLaw;
use crate::rng::SimRng;
use crate::stats::{ols_slope, Summary};

#[derive(Debug, Error)]
pub enum FppError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("the second moment of the radius law is infinite; estimate {:.6} does not converge", .0.speed)]
    DivergentMean(Box<SpeedEstimate>),
    #[error("the radius law has an infinite mean")]
    InfiniteMean,
    #[error("domination rate is zero: no mass at radii >= 5 gamma")]
    RateZero,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Heap key ordered by time, then by index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Event(f64, u32);

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// How marks are read by the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepTiming {
    /// A ball is emitted `t` after its center is reached.
    Relative,
    /// A point `(c, t, r)` is accepted at time `t` if `c` is covered then.
    /// Same law as [`SweepTiming::Relative`], not the same realization.
    Absolute,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub timing: SweepTiming,
    /// Points whose first covering time is recorded in the trace.
    pub targets: Vec<Point>,
    pub record_region: bool,
    pub record_accepted: bool,
    /// Stop right after the first emission not contained in the window.
    pub stop_at_boundary: bool,
    /// Stop once every target is covered.
    pub stop_when_targets_done: bool,
    /// Stop once the reach is at least this value.
    pub stop_at_reach: f64,
    /// Emissions after this time are not processed.
    pub stop_time: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            timing: SweepTiming::Relative,
            targets: Vec::new(),
            record_region: true,
            record_accepted: true,
            stop_at_boundary: false,
            stop_when_targets_done: false,
            stop_at_reach: f64::INFINITY,
            stop_time: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Accepted {
    pub point: SpacetimePoint,
    pub acceptance_time: f64,
    /// Position of the point in the field.
    pub index: usize,
    /// Reach right after this acceptance.
    pub reach: f64,
}

#[derive(Debug, Clone)]
pub struct GrowthTrace {
    pub dim: usize,
    pub seed_region: Ball,
    pub accepted: Vec<Accepted>,
    /// Seed ball (stamp 0) followed by the accepted balls stamped with their
    /// acceptance times.
    pub region: RegionUnion,
    /// `(time, reach)` at time 0 and at every increase of the reach.
    pub reach: Vec<(f64, f64)>,
    pub boundary_touch_time: Option<f64>,
    /// Marks are complete up to this time.
    pub horizon: f64,
    /// First covering time of each target (`inf` if never covered).
    pub target_times: Vec<f64>,
    pub timing: SweepTiming,
}

impl GrowthTrace {
    fn start(dim: usize, seed_region: Ball, horizon: f64, record_region: bool, timing: SweepTiming) -> Self {
        let mut region = RegionUnion::new(dim);
        if record_region {
            region.push(seed_region, 0.0);
        }
        GrowthTrace {
            dim,
            seed_region,
            accepted: Vec::new(),
            region,
            reach: vec![(0.0, seed_region.reach())],
            boundary_touch_time: None,
            horizon,
            target_times: Vec::new(),
            timing,
        }
    }

    fn current_reach(&self) -> f64 {
        self.reach.last().map_or(0.0, |r| r.1)
    }

    fn note_reach(&mut self, t: f64, r: f64) -> f64 {
        let cur = self.current_reach();
        if r > cur {
            self.reach.push((t, r));
            r
        } else {
            cur
        }
    }

    /// Latest time up to which the trace describes the unwindowed process.
    pub fn valid_until(&self) -> f64 {
        self.boundary_touch_time.map_or(self.horizon, |t| t.min(self.horizon))
    }

    /// `sup {|x| : x in S_t}`.
    pub fn reach_at(&self, t: f64) -> f64 {
        let i = self.reach.partition_point(|&(s, _)| s <= t);
        self.reach[i.saturating_sub(1)].1
    }

    /// First time the reach is at least `s`.
    pub fn hitting_time(&self, s: f64) -> Option<f64> {
        self.reach.iter().find(|&&(_, r)| r >= s).map(|&(t, _)| t)
    }

    /// Membership of `x` in `S_t` (needs a recorded region).
    pub fn covers_at(&self, x: &Point, t: f64) -> bool {
        self.region.covers_at(x, t)
    }

    /// Writes `acceptance_time,c1..cd,r,reach`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let coords: Vec<String> = (1..=self.dim).map(|i| format!("c{i}")).collect();
        writeln!(out, "acceptance_time,{},r,reach", coords.join(","))?;
        for a in &self.accepted {
            write!(out, "{}", a.acceptance_time)?;
            for c in a.point.center.coords(self.dim) {
                write!(out, ",{c}")?;
            }
            writeln!(out, ",{},{}", a.point.radius, a.reach)?;
        }
        Ok(())
    }
}

fn target_grid(window: &Window, targets: &[Point]) -> PointGrid {
    let extent = targets
        .iter()
        .flat_map(|p| p.coords(window.dim).iter().map(|c| c.abs()).collect::<Vec<_>>())
        .fold(window.half_width, f64::max);
    PointGrid::new(window.dim, extent, extent / 64.0, targets.to_vec())
}

/// Runs the sweep with default options.
pub fn sweep_simulate(field: &GrowthField, seed_region: Ball) -> GrowthTrace {
    sweep_simulate_with(field, seed_region, &SweepOptions::default())
}

pub fn sweep_simulate_with(field: &GrowthField, seed_region: Ball, opts: &SweepOptions) -> GrowthTrace {
    match opts.timing {
        SweepTiming::Relative => sweep_relative(field, seed_region, opts),
        SweepTiming::Absolute => sweep_absolute(field, seed_region, opts),
    }
}

struct TargetState {
    grid: PointGrid,
    buf: Vec<u32>,
}

impl TargetState {
    fn new(field: &GrowthField, seed_region: &Ball, trace: &mut GrowthTrace, targets: &[Point]) -> Self {
        let mut grid = target_grid(&field.window, targets);
        trace.target_times = vec![f64::INFINITY; targets.len()];
        let mut buf = Vec::new();
        grid.drain_closed_ball(seed_region, &mut buf);
        for &id in &buf {
            trace.target_times[id as usize] = 0.0;
        }
        TargetState { grid, buf }
    }

    fn hit(&mut self, ball: &Ball, t: f64, times: &mut [f64]) {
        if self.grid.remaining() == 0 {
            return;
        }
        self.grid.drain_ball(ball, &mut self.buf);
        for &id in &self.buf {
            times[id as usize] = t;
        }
    }

    fn done(&self) -> bool {
        self.grid.remaining() == 0
    }
}

fn cell_hint(field: &GrowthField) -> f64 {
    let n = field.points.len().max(1);
    let mut radii: Vec<f64> = field.points.iter().step_by((n / 1000).max(1)).map(|p| p.radius).collect();
    if radii.is_empty() {
        return 1.0;
    }
    let mid = radii.len() / 2;
    *radii.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Records an emission and reports whether the sweep should stop.
fn accept(
    trace: &mut GrowthTrace,
    field: &GrowthField,
    targets: &mut TargetState,
    opts: &SweepOptions,
    index: usize,
    t: f64,
) -> bool {
    let p = field.points[index];
    let ball = Ball { center: p.center, radius: p.radius };
    let reach = trace.note_reach(t, ball.reach());
    if opts.record_accepted {
        trace.accepted.push(Accepted { point: p, acceptance_time: t, index, reach });
    }
    if opts.record_region {
        trace.region.push(ball, t);
    }
    targets.hit(&ball, t, &mut trace.target_times);
    let mut stop = false;
    if trace.boundary_touch_time.is_none() && !field.window.contains_ball(&p.center, p.radius) {
        trace.boundary_touch_time = Some(t);
        stop |= opts.stop_at_boundary;
    }
    stop |= opts.stop_when_targets_done && targets.done();
    stop |= reach >= opts.stop_at_reach;
    stop
}

fn sweep_relative(field: &GrowthField, seed_region: Ball, opts: &SweepOptions) -> GrowthTrace {
    let dim = field.dim();
    let mut trace = GrowthTrace::start(dim, seed_region, field.horizon, opts.record_region, SweepTiming::Relative);
    let mut targets = TargetState::new(field, &seed_region, &mut trace, &opts.targets);
    if trace.current_reach() >= opts.stop_at_reach || (opts.stop_when_targets_done && targets.done()) {
        return trace;
    }
    let centers: Vec<Point> = field.points.iter().map(|p| p.center).collect();
    let mut grid = PointGrid::new(dim, field.window.half_width, cell_hint(field), centers);
    let mut heap: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut buf = Vec::new();
    grid.drain_closed_ball(&seed_region, &mut buf);
    for &id in &buf {
        heap.push(Reverse(Event(field.points[id as usize].time, id)));
    }
    while let Some(Reverse(Event(t, id))) = heap.pop() {
        if t > opts.stop_time {
            break;
        }
        let p = field.points[id as usize];
        grid.drain_ball(&Ball { center: p.center, radius: p.radius }, &mut buf);
        for &q in &buf {
            heap.push(Reverse(Event(t + field.points[q as usize].time, q)));
        }
        if accept(&mut trace, field, &mut targets, opts, id as usize, t) {
            break;
        }
    }
    trace
}

fn sweep_absolute(field: &GrowthField, seed_region: Ball, opts: &SweepOptions) -> GrowthTrace {
    let dim = field.dim();
    let mut trace = GrowthTrace::start(dim, seed_region, field.horizon, opts.record_region, SweepTiming::Absolute);
    let mut targets = TargetState::new(field, &seed_region, &mut trace, &opts.targets);
    let mut live = RegionUnion::new(dim);
    live.push(seed_region, 0.0);
    for (i, p) in field.points.iter().enumerate() {
        if p.time > opts.stop_time {
            break;
        }
        if !live.covers(&p.center) {
            continue;
        }
        live.push(Ball { center: p.center, radius: p.radius }, p.time);
        if accept(&mut trace, field, &mut targets, opts, i, p.time) {
            break;
        }
    }
    trace
}

/// Exact passage times from a source ball to a list of targets.
#[derive(Debug, Clone, Serialize)]
pub struct PassageTimeMap {
    pub source: Ball,
    pub targets: Vec<Point>,
    /// `T(source, x)`, `inf` when unreachable in the window.
    pub values: Vec<f64>,
    /// Field indices of an optimal center sequence, first center inside the
    /// source; empty when the target lies in the source.
    pub witnesses: Vec<Option<Vec<usize>>>,
}

impl PassageTimeMap {
    /// Sum of the marks along a witness, in path order.
    pub fn witness_time(field: &GrowthField, witness: &[usize]) -> f64 {
        witness.iter().fold(0.0, |acc, &i| acc + field.points[i].time)
    }

    /// Writes `x1..xd,T` with `inf` for unreachable targets.
    pub fn write_csv<W: Write>(&self, dim: usize, mut out: W) -> std::io::Result<()> {
        let cols: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        writeln!(out, "{},T", cols.join(","))?;
        for (x, v) in self.targets.iter().zip(&self.values) {
            let coords: Vec<String> = x.coords(dim).iter().map(|c| c.to_string()).collect();
            let v = if v.is_finite() { v.to_string() } else { "inf".to_string() };
            writeln!(out, "{},{v}", coords.join(","))?;
        }
        Ok(())
    }
}

/// Reach times of every center of the field from `source` (Dijkstra), with
/// predecessor links. Centers inside the source are reached at time 0.
pub struct CenterTimes {
    pub times: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

const NO_PRED: u32 = u32::MAX;

pub fn center_passage_times(field: &GrowthField, source: &Ball) -> CenterTimes {
    let n = field.points.len();
    let centers: Vec<Point> = field.points.iter().map(|p| p.center).collect();
    let grid = PointGrid::new(field.dim(), field.window.half_width, cell_hint(field), centers);
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (i, p) in field.points.iter().enumerate() {
        if source.contains(&p.center) {
            dist[i] = 0.0;
            heap.push(Reverse(Event(0.0, i as u32)));
        }
    }
    let mut buf = Vec::new();
    while let Some(Reverse(Event(d, i))) = heap.pop() {
        let iu = i as usize;
        if settled[iu] || d > dist[iu] {
            continue;
        }
        settled[iu] = true;
        let p = field.points[iu];
        let cand = d + p.time;
        grid.query_ball(&Ball { center: p.center, radius: p.radius }, &mut buf);
        for &y in &buf {
            let yu = y as usize;
            if settled[yu] {
                continue;
            }
            if cand < dist[yu] || (cand == dist[yu] && i < pred[yu]) {
                dist[yu] = cand;
                pred[yu] = i;
                heap.push(Reverse(Event(cand, y)));
            }
        }
    }
    CenterTimes {
        times: dist,
        pred: pred.into_iter().map(|p| (p != NO_PRED).then_some(p as usize)).collect(),
    }
}

impl CenterTimes {
    /// Center sequence from the source to center `i`.
    pub fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Balls of the reached centers stamped with their emission times.
    pub fn emission_region(&self, field: &GrowthField) -> (RegionUnion, Vec<usize>) {
        let mut region = RegionUnion::new(field.dim());
        let mut ids = Vec::new();
        for (i, p) in field.points.iter().enumerate() {
            if self.times[i].is_finite() {
                region.push(Ball { center: p.center, radius: p.radius }, self.times[i] + p.time);
                ids.push(i);
            }
        }
        (region, ids)
    }
}

/// `T(source, x)` for every target by shortest paths over the field centers.
pub fn passage_times(field: &GrowthField, source: Ball, targets: &[Point]) -> PassageTimeMap {
    let centers = center_passage_times(field, &source);
    let (region, ids) = centers.emission_region(field);
    let mut values = Vec::with_capacity(targets.len());
    let mut witnesses = Vec::with_capacity(targets.len());
    for x in targets {
        if source.contains(x) {
            values.push(0.0);
            witnesses.push(Some(Vec::new()));
        } else if let Some((t, ball)) = region.earliest_hit(x) {
            values.push(t);
            witnesses.push(Some(centers.path_to(ids[ball])));
        } else {
            values.push(f64::INFINITY);
            witnesses.push(None);
        }
    }
    PassageTimeMap { source, targets: targets.to_vec(), values, witnesses }
}

/// The growth process in dimension 1 driven by exponential clocks: after an
/// exponential wait of rate `|S_t|`, a ball with a uniform center in `S_t`
/// and a radius drawn from the law is added.
pub fn markov_simulate_d1(law: &RadiusLaw, horizon: f64, seed_region: Ball, rng: &mut SimRng) -> GrowthTrace {
    let mut trace = GrowthTrace::start(1, seed_region, horizon, true, SweepTiming::Relative);
    let mut t = 0.0;
    loop {
        let rate = trace.region.union_length_1d();
        t += -(-rng.random::<f64>()).ln_1p() / rate;
        if t > horizon {
            break;
        }
        let center = trace.region.sample_uniform_in_union(rng);
        let radius = law.sample(rng);
        let ball = Ball { center, radius };
        trace.region.push(ball, t);
        let reach = trace.note_reach(t, ball.reach());
        let index = trace.accepted.len();
        trace.accepted.push(Accepted { point: SpacetimePoint { center, time: t, radius }, acceptance_time: t, index, reach });
    }
    trace
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedMethod {
    ReachRegression,
    PassageRegression,
    Renewal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEstimate {
    pub speed: f64,
    pub ci_halfwidth: f64,
    pub method: SpeedMethod,
    /// `(scale, speed)` with strictly increasing scales.
    pub window_curve: Vec<(f64, f64)>,
    pub per_replica: Vec<f64>,
}

impl SpeedEstimate {
    fn from_replicas(per_replica: Vec<f64>, method: SpeedMethod) -> Self {
        let s = Summary::of(&per_replica);
        SpeedEstimate { speed: s.mean, ci_halfwidth: s.ci_halfwidth, method, window_curve: Vec::new(), per_replica }
    }
}

/// Speed of the dominating half-line process of dimension 1.
///
/// Each step draws a size-biased radius `R`, a uniform offset `C` in `(-R, 0)`
/// and an exponential time of mean `1/E R`; the speed is total increment over
/// total time. Returns [`FppError::DivergentMean`] with the estimate attached
/// when `E R^2` is infinite.
pub fn halfline_renewal_d1(law: &RadiusLaw, n_steps: usize, rng: &mut SimRng) -> Result<SpeedEstimate, FppError> {
    let mean = law.mean().ok_or(FppError::InfiniteMean)?;
    if n_steps == 0 {
        return Err(FppError::InsufficientData("zero renewal steps".into()));
    }
    let mut incs = Vec::with_capacity(n_steps);
    let mut times = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let r = law.sample_size_biased(rng).map_err(|_| FppError::InfiniteMean)?;
        let c = -r * rng.random::<f64>();
        incs.push(c + r);
        times.push(-(-rng.random::<f64>()).ln_1p() / mean);
    }
    let total_inc: f64 = incs.iter().sum();
    let total_time: f64 = times.iter().sum();
    let speed = total_inc / total_time;
    // Delta method for a ratio of means.
    let z: Vec<f64> = incs.iter().zip(&times).map(|(i, t)| i - speed * t).collect();
    let se = Summary::of(&z).sd / (n_steps as f64).sqrt() / (total_time / n_steps as f64);
    let est = SpeedEstimate {
        speed,
        ci_halfwidth: 1.96 * se,
        method: SpeedMethod::Renewal,
        window_curve: Vec::new(),
        per_replica: vec![speed],
    };
    if law.moment(2.0).is_finite() {
        Ok(est)
    } else {
        Err(FppError::DivergentMean(Box::new(est)))
    }
}

/// Least-squares slope of the reach samples against time over the last half
/// of the valid part of a trace.
pub fn trace_speed(trace: &GrowthTrace) -> Result<f64, FppError> {
    if let Some(touch) = trace.boundary_touch_time {
        if touch < trace.horizon / 2.0 {
            return Err(FppError::InsufficientData(format!(
                "boundary touched at {touch} before half of the horizon {}",
                trace.horizon
            )));
        }
    }
    let end = trace.valid_until();
    if !(end > 0.0 && end.is_finite()) {
        return Err(FppError::InsufficientData("empty time range".into()));
    }
    let (ts, rs): (Vec<f64>, Vec<f64>) =
        trace.reach.iter().filter(|&&(t, _)| t >= end / 2.0 && t <= end).copied().unzip();
    ols_slope(&ts, &rs).ok_or_else(|| FppError::InsufficientData("degenerate regression".into()))
}

/// Reach regression aggregated over replicas.
pub fn reach_regression(traces: &[GrowthTrace]) -> Result<SpeedEstimate, FppError> {
    if traces.is_empty() {
        return Err(FppError::InsufficientData("no replicas".into()));
    }
    let per = traces.iter().map(trace_speed).collect::<Result<Vec<_>, _>>()?;
    Ok(SpeedEstimate::from_replicas(per, SpeedMethod::ReachRegression))
}

/// Least-squares slope of `|x|` against `T(B, x)` over `(norm, time)` pairs.
pub fn passage_speed(samples: &[(f64, f64)]) -> Result<f64, FppError> {
    let xs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ols_slope(&xs, &ys).ok_or_else(|| FppError::InsufficientData("fewer than two usable targets".into()))
}

pub fn passage_regression(replicas: &[Vec<(f64, f64)>]) -> Result<SpeedEstimate, FppError> {
    if replicas.is_empty() {
        return Err(FppError::InsufficientData("no replicas".into()));
    }
    let per = replicas.iter().map(|r| passage_speed(r)).collect::<Result<Vec<_>, _>>()?;
    Ok(SpeedEstimate::from_replicas(per, SpeedMethod::PassageRegression))
}

/// `(scale, scale / mean hitting time of radius scale)` for each scale.
pub fn window_curve(traces: &[GrowthTrace], scales: &[f64]) -> Result<Vec<(f64, f64)>, FppError> {
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FppError::Invalid("scales must be strictly increasing".into()));
    }
    scales
        .iter()
        .map(|&s| {
            let hits = traces
                .iter()
                .map(|t| t.hitting_time(s))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| FppError::InsufficientData(format!("a trace never reached radius {s}")))?;
            Ok((s, s / crate::stats::mean(&hits)))
        })
        .collect()
}

/// The exponential chain that dominates `T(B_gamma, x + B_gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationChainSpec {
    pub gamma: f64,
    /// `|B_gamma| mu([5 gamma, inf))`
    pub rate: f64,
}

impl DominationChainSpec {
    pub fn new(law: &RadiusLaw, dim: usize, gamma: f64) -> Result<Self, FppError> {
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(FppError::Invalid(format!("gamma must be positive, got {gamma}")));
        }
        let rate = unit_ball_volume(dim) * gamma.powi(dim as i32) * law.tail_mass(5.0 * gamma);
        if rate <= 0.0 {
            return Err(FppError::RateZero);
        }
        Ok(DominationChainSpec { gamma, rate })
    }

    /// `floor(|x| / (3 gamma))`
    pub fn hops(&self, x: &Point) -> usize {
        (x.norm() / (3.0 * self.gamma)).floor() as usize
    }

    pub fn mean(&self, x: &Point) -> f64 {
        (self.hops(x) + 1) as f64 / self.rate
    }
}

/// Sum of `hops(x) + 1` independent exponential variables of rate `spec.rate`.
pub fn domination_chain_sample(spec: &DominationChainSpec, x: &Point, rng: &mut SimRng) -> f64 {
    (0..=spec.hops(x)).map(|_| -(-rng.random::<f64>()).ln_1p() / spec.rate).sum()
}

/// Grid net of a ball: points of a lattice of the given spacing inside it,
/// plus the center and the axis extremes.
pub fn ball_net(ball: &Ball, dim: usize, spacing: f64) -> Vec<Point> {
    let n = (ball.radius / spacing).floor() as i64;
    let mut out = Vec::new();
    let mut k = vec![-n; dim];
    loop {
        let mut p = ball.center;
        for (c, &ki) in p.0.iter_mut().zip(&k) {
            *c += ki as f64 * spacing;
        }
        if ball.contains(&p) {
            out.push(p);
        }
        let mut i = 0;
        loop {
            if i == dim {
                for j in 0..dim {
                    for s in [-1.0, 1.0] {
                        let mut e = ball.center;
                        e.0[j] += s * ball.radius;
                        if ball.contains(&e) {
                            out.push(e);
                        }
                    }
                }
                return out;
            }
            if k[i] < n {
                k[i] += 1;
                break;
            }
            k[i] = -n;
            i += 1;
        }
    }
}

/// Result of [`grow_adaptive`].
pub struct AdaptiveRun {
    pub field: GrowthField,
    pub trace: GrowthTrace,
}

/// Field parameters for [`grow_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSpec<'a> {
    pub window: Window,
    pub law: &'a RadiusLaw,
    pub seed: u64,
    pub initial_horizon: f64,
    pub capacity: f64,
    pub seed_region: Ball,
}

/// Samples a field and sweeps it up to its horizon, doubling the horizon
/// (adding the independent marks beyond the old one) until `done` holds on
/// the trace or the window boundary is touched within the horizon.
pub fn grow_adaptive(
    spec: &AdaptiveSpec,
    opts: &SweepOptions,
    rng: &mut SimRng,
    done: impl Fn(&GrowthTrace) -> bool,
) -> Result<AdaptiveRun, FppError> {
    let mut field = sample_growth_field_with(spec.window, spec.initial_horizon, spec.law, spec.seed, spec.capacity, rng)?;
    loop {
        let run_opts = SweepOptions { stop_time: opts.stop_time.min(field.horizon), ..opts.clone() };
        let trace = sweep_simulate_with(&field, spec.seed_region, &run_opts);
        let touched = trace.boundary_touch_time.is_some_and(|t| t <= field.horizon);
        if done(&trace) || touched {
            return Ok(AdaptiveRun { field, trace });
        }
        let h = field.horizon * 2.0;
        extend_growth_field(&mut field, spec.law, h, spec.capacity, rng)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_growth_field;
    use crate::rng::stream_rng;

    fn line_field(points: &[(f64, f64, f64)], half_width: f64, horizon: f64) -> GrowthField {
        GrowthField {
            window: Window::new(1, half_width).unwrap(),
            horizon,
            seed: 0,
            points: points
                .iter()
                .map(|&(c, t, r)| SpacetimePoint { center: Point::on_axis(c), time: t, radius: r })
                .collect(),
        }
    }

    #[test]
    fn sweep_examples() {
        let b = Ball::centered(1.0);
        let f = line_field(&[(0.5, 1.0, 2.0)], 10.0, 2.0);
        for timing in [SweepTiming::Relative, SweepTiming::Absolute] {
            let tr = sweep_simulate_with(&f, b, &SweepOptions { timing, ..Default::default() });
            assert_eq!(tr.accepted.len(), 1);
            assert_eq!(tr.reach_at(1.0), 2.5);
            assert_eq!(tr.region.intervals().unwrap().parts(), &[(-1.5, 2.5)]);
        }
        let f = line_field(&[(0.5, 1.0, 2.0), (3.0, 1.5, 1.0)], 10.0, 2.0);
        for timing in [SweepTiming::Relative, SweepTiming::Absolute] {
            let tr = sweep_simulate_with(&f, b, &SweepOptions { timing, ..Default::default() });
            assert_eq!(tr.accepted.len(), 1);
        }
        let empty = line_field(&[], 10.0, 2.0);
        let tr = sweep_simulate(&empty, b);
        assert!(tr.accepted.is_empty());
        assert_eq!(tr.reach_at(0.0), 1.0);
        assert_eq!(tr.reach_at(1e9), 1.0);
    }

    #[test]
    fn relative_timing_chains_marks() {
        // Center 3 is reached at 1.0 and emits at 1.0 + 0.2.
        let f = line_field(&[(0.0, 0.2, 0.5), (0.5, 1.0, 2.6), (3.0, 0.2, 1.0)], 10.0, 2.0);
        let tr = sweep_simulate(&f, Ball::centered(1.0));
        let times: Vec<f64> = tr.accepted.iter().map(|a| a.acceptance_time).collect();
        assert_eq!(times, vec![0.2, 1.0, 1.2]);
        assert_eq!(tr.reach_at(1.2), 4.0);
    }

    #[test]
    fn single_center_passage_times() {
        let f = line_field(&[(0.5, 0.7, 2.0)], 10.0, 2.0);
        let targets: Vec<Point> = [2.0, 2.5, 2.6, -1.4, 0.5].iter().map(|&x| Point::on_axis(x)).collect();
        let m = passage_times(&f, Ball::centered(1.0), &targets);
        assert_eq!(m.values, vec![0.7, 0.7, f64::INFINITY, 0.7, 0.0]);
        assert_eq!(m.witnesses[0], Some(vec![0]));
    }

    #[test]
    fn two_hop_passage_time() {
        // Center 1 lies in the closed source [-1, 1]: both centers start at 0.
        let f = line_field(&[(0.0, 1.0, 1.5), (1.0, 2.0, 1.5)], 10.0, 3.0);
        let m = passage_times(&f, Ball::centered(1.0), &[Point::on_axis(2.4)]);
        assert_eq!(m.values, vec![2.0]);
        assert_eq!(m.witnesses[0], Some(vec![1]));
        // With the source shrunk to exclude center 1, the route goes through 0.
        let m = passage_times(&f, Ball::centered(0.9), &[Point::on_axis(2.4)]);
        assert_eq!(m.values, vec![3.0]);
        assert_eq!(m.witnesses[0], Some(vec![0, 1]));
    }

    #[test]
    fn sweep_matches_dijkstra_on_random_fields() {
        for (dim, law) in [(1, "pareto:beta=2.5,rmin=0.5"), (2, "exponential:rate=1.5"), (3, "dirac:r0=1")] {
            let law: RadiusLaw = law.parse().unwrap();
            let w = Window::new(dim, 6.0).unwrap();
            let f = sample_growth_field(w, 3.0, &law, 4).unwrap();
            let mut rng = stream_rng(4, 99);
            let targets: Vec<Point> = (0..300).map(|_| w.sample(&mut rng)).collect();
            let tr = sweep_simulate_with(&f, Ball::centered(1.0), &SweepOptions { targets: targets.clone(), ..Default::default() });
            let m = passage_times(&f, Ball::centered(1.0), &targets);
            assert_eq!(tr.target_times, m.values);
            for (x, (&v, wit)) in targets.iter().zip(m.values.iter().zip(&m.witnesses)) {
                for t in [0.5, 1.0, 2.0, 3.0] {
                    assert_eq!(tr.covers_at(x, t), v <= t, "dim {dim} x {x:?} t {t}");
                }
                if let Some(wit) = wit {
                    assert_eq!(PassageTimeMap::witness_time(&f, wit), v);
                }
            }
        }
    }

    #[test]
    fn markov_first_event_mean() {
        let law = RadiusLaw::dirac(1.0).unwrap();
        let mut rng = stream_rng(8, 3);
        let xs: Vec<f64> = (0..4000)
            .map(|_| {
                let tr = markov_simulate_d1(&law, 50.0, Ball::centered(1.0), &mut rng);
                tr.accepted[0].acceptance_time
            })
            .collect();
        let s = Summary::of(&xs);
        assert!((s.mean - 0.5).abs() < 3.0 * s.se, "{}", s.mean);
    }

    #[test]
    fn renewal_examples() {
        let mut rng = stream_rng(1, 4);
        let e = halfline_renewal_d1(&RadiusLaw::dirac(1.0).unwrap(), 200_000, &mut rng).unwrap();
        assert!((e.speed - 0.5).abs() < 0.01);
        match halfline_renewal_d1(&RadiusLaw::pareto(1.5, 1.0).unwrap(), 1000, &mut rng) {
            Err(FppError::DivergentMean(est)) => assert!(est.speed > 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(halfline_renewal_d1(&RadiusLaw::pareto(1.0, 1.0).unwrap(), 10, &mut rng), Err(FppError::InfiniteMean)));
    }

    #[test]
    fn synthetic_linear_trace() {
        let mut tr = GrowthTrace::start(1, Ball::centered(1.0), 100.0, false, SweepTiming::Relative);
        tr.reach = (0..=1000).map(|i| (i as f64 * 0.1, 3.0 * i as f64 * 0.1)).collect();
        let v = trace_speed(&tr).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
        tr.boundary_touch_time = Some(10.0);
        assert!(matches!(trace_speed(&tr), Err(FppError::InsufficientData(_))));
    }

    #[test]
    fn domination_chain_examples() {
        let law = RadiusLaw::dirac(6.0).unwrap();
        let spec = DominationChainSpec::new(&law, 2, 1.0).unwrap();
        assert!((spec.rate - std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(spec.hops(&Point::new(&[2.9, 0.0])), 0);
        assert_eq!(spec.hops(&Point::new(&[30.0, 0.0])), 10);
        let mut rng = stream_rng(2, 5);
        let x = Point::new(&[0.0, 30.0]);
        let xs: Vec<f64> = (0..20_000).map(|_| domination_chain_sample(&spec, &x, &mut rng)).collect();
        let s = Summary::of(&xs);
        assert!((s.mean - 11.0 / spec.rate).abs() < 3.0 * s.se);
        assert!(matches!(DominationChainSpec::new(&RadiusLaw::dirac(4.0).unwrap(), 2, 1.0), Err(FppError::RateZero)));
    }

    #[test]
    fn csv_exports() {
        let f = line_field(&[(0.5, 1.0, 2.0)], 10.0, 2.0);
        let tr = sweep_simulate(&f, Ball::centered(1.0));
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "acceptance_time,c1,r,reach\n1,0.5,2,2.5\n");
        let m = passage_times(&f, Ball::centered(1.0), &[Point::on_axis(2.0), Point::on_axis(5.0)]);
        let mut buf = Vec::new();
        m.write_csv(1, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,T\n2,1\n5,inf\n");
    }

    #[test]
    fn ball_net_lies_in_ball() {
        let b = Ball::new(Point::new(&[3.0, -1.0]), 2.0);
        let net = ball_net(&b, 2, 0.25);
        assert!(net.iter().all(|p| b.contains(p)));
        assert!(net.len() > 150);
    }
}
