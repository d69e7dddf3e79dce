//! Greedy paths: mean weight per unit length of origin-rooted point sequences.
//!
//! A path visits distinct points starting at the origin; its weight is the sum
//! of the field weights it visits and its length the polygonal length. With a
//! minimal length `l`, a path shorter than `l` is completed by a straight final
//! segment, so its ratio is `weight / max(length, l)`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::WeightedPointField;
use crate::point::Point;
use crate::rng::{purpose, stream_rng};

#[derive(Debug, Error)]
pub enum GreedyError {
    #[error("degenerate path: {0}")]
    DegeneratePath(String),
    #[error("enumeration explored more than {cap} nodes")]
    EnumerationCapExceeded { cap: u64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Default bound on the number of search nodes of [`exact_supremum`].
pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    /// Starts at the origin.
    pub points: Vec<Point>,
    pub weight: f64,
    /// Polygonal length plus the completion segment, if any.
    pub length: f64,
    /// Length of the straight completion segment.
    pub completion: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GreedyMode {
    Exact { k: usize },
    Heuristic { budget: usize },
    /// Exact over paths of any size, dimension 1.
    ExactLine,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyResult {
    /// `None` for a field without points.
    pub best: Option<PathRecord>,
    pub value: f64,
    pub mode: GreedyMode,
    pub min_length: Option<f64>,
    pub nodes_explored: u64,
    pub restarts: usize,
    pub window_half_width: f64,
}

impl GreedyResult {
    fn empty(mode: GreedyMode, min_length: Option<f64>, field: &WeightedPointField) -> Self {
        GreedyResult {
            best: None,
            value: 0.0,
            mode,
            min_length,
            nodes_explored: 0,
            restarts: 0,
            window_half_width: field.window.half_width,
        }
    }

    /// Writes the result as JSON with the path as a list of coordinates.
    pub fn write_json<W: Write>(&self, dim: usize, out: W) -> Result<(), GreedyError> {
        #[derive(Serialize)]
        struct Out<'a> {
            mode: &'a GreedyMode,
            value: f64,
            min_length: Option<f64>,
            path: Vec<Vec<f64>>,
            weight: Option<f64>,
            length: Option<f64>,
            nodes_explored: u64,
            restarts: usize,
            window_half_width: f64,
        }
        let path = self
            .best
            .as_ref()
            .map(|b| b.points.iter().map(|p| p.coords(dim).to_vec()).collect())
            .unwrap_or_default();
        let o = Out {
            mode: &self.mode,
            value: self.value,
            min_length: self.min_length,
            path,
            weight: self.best.as_ref().map(|b| b.weight),
            length: self.best.as_ref().map(|b| b.length),
            nodes_explored: self.nodes_explored,
            restarts: self.restarts,
            window_half_width: self.window_half_width,
        };
        serde_json::to_writer_pretty(out, &o)?;
        Ok(())
    }
}

fn weight_lookup(field: &WeightedPointField) -> HashMap<[u64; 3], f64> {
    field.points.iter().map(|p| (p.location.bits(), p.weight)).collect()
}

/// Scores a path given as points, the first being the origin.
pub fn path_score(points: &[Point], field: &WeightedPointField) -> Result<PathRecord, GreedyError> {
    path_score_min(points, field, None)
}

/// Scores a path, completing it to length `min_length` when shorter.
pub fn path_score_min(
    points: &[Point],
    field: &WeightedPointField,
    min_length: Option<f64>,
) -> Result<PathRecord, GreedyError> {
    if points.len() < 2 {
        return Err(GreedyError::DegeneratePath("a path needs at least two points".into()));
    }
    if points[0] != Point::ORIGIN {
        return Err(GreedyError::DegeneratePath("a path starts at the origin".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for p in points {
        if !seen.insert(p.bits()) {
            return Err(GreedyError::DegeneratePath(format!("repeated point {p}")));
        }
    }
    let lookup = weight_lookup(field);
    let weight = points[1..].iter().fold(0.0, |acc, p| acc + lookup.get(&p.bits()).copied().unwrap_or(0.0));
    let poly = points.windows(2).fold(0.0, |acc, w| acc + w[0].dist(&w[1]));
    if poly <= 0.0 {
        return Err(GreedyError::DegeneratePath("zero length".into()));
    }
    let length = poly.max(min_length.unwrap_or(0.0));
    Ok(PathRecord { points: points.to_vec(), weight, length, completion: length - poly, ratio: weight / length })
}

/// Orders candidates: higher ratio, then fewer points, then lexicographic.
fn better(a_ratio: f64, a: &[Point], b_ratio: f64, b: &[Point]) -> bool {
    match a_ratio.total_cmp(&b_ratio) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => match a.len().cmp(&b.len()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                for (p, q) in a.iter().zip(b) {
                    match p.lex_cmp(q) {
                        Ordering::Less => return true,
                        Ordering::Greater => return false,
                        Ordering::Equal => {}
                    }
                }
                false
            }
        },
    }
}

/// Indexed view of a field for the searches.
struct Instance {
    pts: Vec<Point>,
    w: Vec<f64>,
    d0: Vec<f64>,
    dist: Vec<f64>,
    n: usize,
    min_length: f64,
}

impl Instance {
    fn new(field: &WeightedPointField, min_length: Option<f64>) -> Self {
        let pts: Vec<Point> = field.points.iter().map(|p| p.location).collect();
        let w: Vec<f64> = field.points.iter().map(|p| p.weight).collect();
        let n = pts.len();
        let d0 = pts.iter().map(|p| p.norm()).collect();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = pts[i].dist(&pts[j]);
            }
        }
        Instance { pts, w, d0, dist, n, min_length: min_length.unwrap_or(0.0) }
    }

    fn hop(&self, from: Option<usize>, to: usize) -> f64 {
        match from {
            None => self.d0[to],
            Some(i) => self.dist[i * self.n + to],
        }
    }

    fn score(&self, seq: &[usize]) -> (f64, f64, f64) {
        let mut w = 0.0;
        let mut len = 0.0;
        let mut last = None;
        for &i in seq {
            w += self.w[i];
            len += self.hop(last, i);
            last = Some(i);
        }
        (w, len, w / len.max(self.min_length))
    }

    fn points(&self, seq: &[usize]) -> Vec<Point> {
        std::iter::once(Point::ORIGIN).chain(seq.iter().map(|&i| self.pts[i])).collect()
    }

    fn record(&self, seq: &[usize]) -> PathRecord {
        let (weight, poly, _) = self.score(seq);
        let length = poly.max(self.min_length);
        PathRecord { points: self.points(seq), weight, length, completion: length - poly, ratio: weight / length }
    }
}

struct Search<'a> {
    inst: &'a Instance,
    k: usize,
    nn: Vec<f64>,
    cap: u64,
    nodes: u64,
    best_ratio: f64,
    best_seq: Vec<usize>,
    best_pts: Vec<Point>,
    used: Vec<bool>,
    seq: Vec<usize>,
    scratch: Vec<f64>,
}

impl Search<'_> {
    fn consider(&mut self, ratio: f64) {
        let pts = self.inst.points(&self.seq);
        if self.best_seq.is_empty() || better(ratio, &pts[1..], self.best_ratio, &self.best_pts[1..]) {
            self.best_ratio = ratio;
            self.best_seq = self.seq.clone();
            self.best_pts = pts;
        }
    }

    /// Whether some extension by at most `slots` points could reach the incumbent.
    fn promising(&mut self, w: f64, len: f64, slots: usize) -> bool {
        let rho = self.best_ratio;
        let inst = self.inst;
        self.scratch.clear();
        for q in 0..inst.n {
            if !self.used[q] {
                self.scratch.push(inst.w[q] - rho * self.nn[q]);
            }
        }
        let take = slots.min(self.scratch.len());
        if take == 0 {
            return false;
        }
        if take < self.scratch.len() {
            self.scratch.select_nth_unstable_by(take - 1, |a, b| b.total_cmp(a));
        }
        let gain: f64 = self.scratch[..take].iter().map(|g| g.max(0.0)).sum();
        let slack = 1.0 - 1e-12;
        if w + gain < rho * len * slack {
            return false;
        }
        if inst.min_length > 0.0 {
            self.scratch.clear();
            for q in 0..inst.n {
                if !self.used[q] {
                    self.scratch.push(inst.w[q]);
                }
            }
            if take < self.scratch.len() {
                self.scratch.select_nth_unstable_by(take - 1, |a, b| b.total_cmp(a));
            }
            let top: f64 = self.scratch[..take].iter().sum();
            if (w + top) / inst.min_length < rho * slack {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, last: Option<usize>, w: f64, len: f64) -> Result<(), GreedyError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(GreedyError::EnumerationCapExceeded { cap: self.cap });
        }
        if !self.seq.is_empty() {
            let ratio = w / len.max(self.inst.min_length);
            self.consider(ratio);
        }
        let slots = self.k - self.seq.len();
        if slots == 0 || !self.promising(w, len, slots) {
            return Ok(());
        }
        let inst = self.inst;
        let mut children: Vec<(f64, usize)> = (0..inst.n)
            .filter(|&j| !self.used[j])
            .map(|j| ((w + inst.w[j]) / (len + inst.hop(last, j)), j))
            .collect();
        children.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, j) in children {
            let h = inst.hop(last, j);
            self.used[j] = true;
            self.seq.push(j);
            self.dfs(Some(j), w + inst.w[j], len + h)?;
            self.seq.pop();
            self.used[j] = false;
            if !self.promising(w, len, slots) {
                break;
            }
        }
        Ok(())
    }
}

/// Exact supremum over paths through at most `k` field points.
///
/// Depth-first branch and bound: a branch is cut only when no extension can
/// reach the incumbent ratio, using that each added point `q` costs at least
/// its nearest-neighbour distance. Ties are resolved as in the full
/// enumeration (fewer points, then lexicographic order).
pub fn exact_supremum(field: &WeightedPointField, k: usize, min_length: Option<f64>) -> Result<GreedyResult, GreedyError> {
    exact_supremum_capped(field, k, min_length, DEFAULT_NODE_CAP)
}

pub fn exact_supremum_capped(
    field: &WeightedPointField,
    k: usize,
    min_length: Option<f64>,
    cap: u64,
) -> Result<GreedyResult, GreedyError> {
    check_min_length(min_length)?;
    if k == 0 {
        return Err(GreedyError::Invalid("k must be at least 1".into()));
    }
    let inst = Instance::new(field, min_length);
    if inst.n == 0 {
        return Ok(GreedyResult::empty(GreedyMode::Exact { k }, min_length, field));
    }
    let nn = (0..inst.n)
        .map(|i| (0..inst.n).filter(|&j| j != i).map(|j| inst.dist[i * inst.n + j]).fold(inst.d0[i], f64::min))
        .collect();
    let mut s = Search {
        inst: &inst,
        k,
        nn,
        cap,
        nodes: 0,
        best_ratio: 0.0,
        best_seq: Vec::new(),
        best_pts: Vec::new(),
        used: vec![false; inst.n],
        seq: Vec::new(),
        scratch: Vec::new(),
    };
    // Best singleton as the initial incumbent.
    for i in 0..inst.n {
        s.seq.push(i);
        let (_, _, r) = inst.score(&s.seq);
        s.consider(r);
        s.seq.pop();
    }
    s.dfs(None, 0.0, 0.0)?;
    let best = inst.record(&s.best_seq);
    Ok(GreedyResult {
        value: best.ratio,
        best: Some(best),
        mode: GreedyMode::Exact { k },
        min_length,
        nodes_explored: s.nodes,
        restarts: 0,
        window_half_width: field.window.half_width,
    })
}

/// Literal enumeration of all ordered subsets of size `1..=k`; for small
/// instances only.
pub fn enumerate_supremum(field: &WeightedPointField, k: usize, min_length: Option<f64>) -> Result<GreedyResult, GreedyError> {
    check_min_length(min_length)?;
    let inst = Instance::new(field, min_length);
    if inst.n == 0 {
        return Ok(GreedyResult::empty(GreedyMode::Exact { k }, min_length, field));
    }
    fn rec(inst: &Instance, k: usize, seq: &mut Vec<usize>, used: &mut [bool], best: &mut (f64, Vec<usize>), count: &mut u64) {
        if !seq.is_empty() {
            *count += 1;
            let (_, _, r) = inst.score(seq);
            let pts = inst.points(seq);
            if best.1.is_empty() || better(r, &pts[1..], best.0, &inst.points(&best.1)[1..]) {
                *best = (r, seq.clone());
            }
        }
        if seq.len() == k {
            return;
        }
        for j in 0..inst.n {
            if !used[j] {
                used[j] = true;
                seq.push(j);
                rec(inst, k, seq, used, best, count);
                seq.pop();
                used[j] = false;
            }
        }
    }
    let mut best = (0.0, Vec::new());
    let mut count = 0;
    rec(&inst, k, &mut Vec::new(), &mut vec![false; inst.n], &mut best, &mut count);
    let rec = inst.record(&best.1);
    Ok(GreedyResult {
        value: rec.ratio,
        best: Some(rec),
        mode: GreedyMode::Exact { k },
        min_length,
        nodes_explored: count,
        restarts: 0,
        window_half_width: field.window.half_width,
    })
}

fn check_min_length(min_length: Option<f64>) -> Result<(), GreedyError> {
    match min_length {
        Some(l) if !(l > 0.0 && l.is_finite()) => Err(GreedyError::Invalid(format!("min_length must be positive, got {l}"))),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeuristicOptions {
    /// Number of local-search restarts.
    pub budget: usize,
    /// Cap on the number of field points of a path.
    pub max_points: Option<usize>,
    /// Only the points with the best singleton ratios take part.
    pub pool: usize,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions { budget: 8, max_points: None, pool: 64, seed: 0 }
    }
}

/// Local search over paths. Each restart grows a path by greedy insertion up
/// to the size cap; every intermediate path is polished by insertion,
/// removal, exchange, relocation and segment reversal moves until none
/// improves.
pub fn heuristic_supremum(
    field: &WeightedPointField,
    opts: &HeuristicOptions,
    min_length: Option<f64>,
) -> Result<GreedyResult, GreedyError> {
    check_min_length(min_length)?;
    if opts.budget == 0 {
        return Err(GreedyError::Invalid("budget must be at least 1".into()));
    }
    let mode = GreedyMode::Heuristic { budget: opts.budget };
    if field.points.is_empty() {
        return Ok(GreedyResult::empty(mode, min_length, field));
    }
    let l = min_length.unwrap_or(0.0);
    let mut order: Vec<usize> = (0..field.points.len()).collect();
    let single = |i: usize| field.points[i].weight / field.points[i].location.norm().max(l);
    order.sort_by(|&a, &b| single(b).total_cmp(&single(a)).then(a.cmp(&b)));
    order.truncate(opts.pool.max(1));
    let sub = WeightedPointField { points: order.iter().map(|&i| field.points[i]).collect(), ..field.clone() };
    let inst = Instance::new(&sub, min_length);
    let cap = opts.max_points.unwrap_or(usize::MAX).max(1);
    let mut rng = stream_rng(opts.seed, purpose::HEURISTIC);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..opts.budget {
        let start = if r < inst.n { r } else { rng.random_range(0..inst.n) };
        let mut seq = vec![start];
        loop {
            let polished = local_search(&inst, seq.clone(), cap);
            let (_, _, ratio) = inst.score(&polished);
            let replace = match &best {
                None => true,
                Some((br, bs)) => better(ratio, &inst.points(&polished)[1..], *br, &inst.points(bs)[1..]),
            };
            if replace {
                best = Some((ratio, polished));
            }
            if seq.len() >= cap.min(inst.n) {
                break;
            }
            seq = greedy_insertion(&inst, &seq);
        }
    }
    let (_, seq) = best.expect("at least one restart");
    let rec = inst.record(&seq);
    Ok(GreedyResult {
        value: rec.ratio,
        best: Some(rec),
        mode,
        min_length,
        nodes_explored: 0,
        restarts: opts.budget,
        window_half_width: field.window.half_width,
    })
}

/// The path with one more point maximizing the ratio, even when it decreases.
fn greedy_insertion(inst: &Instance, seq: &[usize]) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for q in (0..inst.n).filter(|q| !seq.contains(q)) {
        for pos in 0..=seq.len() {
            let mut c = seq.to_vec();
            c.insert(pos, q);
            let (_, _, ratio) = inst.score(&c);
            if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
                best = Some((ratio, c));
            }
        }
    }
    best.map_or_else(|| seq.to_vec(), |b| b.1)
}

fn local_search(inst: &Instance, mut seq: Vec<usize>, cap: usize) -> Vec<usize> {
    let mut used = vec![false; inst.n];
    for &i in &seq {
        used[i] = true;
    }
    let improves = |cand: &[usize], cur: &[usize]| {
        let (_, _, a) = inst.score(cand);
        let (_, _, b) = inst.score(cur);
        a > b * (1.0 + 1e-15) || (a == b && cand.len() < cur.len())
    };
    loop {
        let mut best_move: Option<Vec<usize>> = None;
        let consider = |cand: Vec<usize>, best_move: &mut Option<Vec<usize>>| {
            let cur = best_move.as_deref().unwrap_or(&seq);
            if improves(&cand, cur) {
                *best_move = Some(cand);
            }
        };
        let m = seq.len();
        if m < cap {
            for q in (0..inst.n).filter(|&q| !used[q]) {
                for pos in 0..=m {
                    let mut c = seq.clone();
                    c.insert(pos, q);
                    consider(c, &mut best_move);
                }
            }
        }
        if m > 1 {
            for i in 0..m {
                let mut c = seq.clone();
                c.remove(i);
                consider(c, &mut best_move);
            }
        }
        for i in 0..m {
            for q in (0..inst.n).filter(|&q| !used[q]) {
                let mut c = seq.clone();
                c[i] = q;
                consider(c, &mut best_move);
            }
            for j in 0..m {
                if i != j {
                    let mut c = seq.clone();
                    let x = c.remove(i);
                    c.insert(j, x);
                    consider(c, &mut best_move);
                }
                if i < j {
                    let mut c = seq.clone();
                    c[i..=j].reverse();
                    consider(c, &mut best_move);
                }
            }
        }
        match best_move {
            Some(next) => {
                for &i in &seq {
                    used[i] = false;
                }
                for &i in &next {
                    used[i] = true;
                }
                seq = next;
            }
            None => return seq,
        }
    }
}

/// `max_x weight(x) / |x|`, 0 for an empty field.
pub fn singleton_supremum(field: &WeightedPointField) -> f64 {
    field.points.iter().map(|p| p.weight / p.location.norm()).fold(0.0, f64::max)
}

/// Exact supremum in dimension 1 over paths of any size.
///
/// An optimal path sweeps an interval `[-b, a]` around the origin, first
/// towards the nearer end, for a length of `min(2a + b, a + 2b)` (or `a`, `b`
/// when one side is empty).
pub fn exact_supremum_d1(field: &WeightedPointField, min_length: Option<f64>) -> Result<GreedyResult, GreedyError> {
    check_min_length(min_length)?;
    if field.dim() != 1 {
        return Err(GreedyError::Invalid("exact_supremum_d1 needs dimension 1".into()));
    }
    if field.points.is_empty() {
        return Ok(GreedyResult::empty(GreedyMode::ExactLine, min_length, field));
    }
    let l = min_length.unwrap_or(0.0);
    let mut pos: Vec<(f64, f64)> = Vec::new();
    let mut neg: Vec<(f64, f64)> = Vec::new();
    for p in &field.points {
        let x = p.location.0[0];
        if x > 0.0 {
            pos.push((x, p.weight));
        } else {
            neg.push((-x, p.weight));
        }
    }
    pos.sort_by(|a, b| a.0.total_cmp(&b.0));
    neg.sort_by(|a, b| a.0.total_cmp(&b.0));
    let prefix = |v: &[(f64, f64)]| {
        let mut acc = 0.0;
        std::iter::once(0.0).chain(v.iter().map(|e| {
            acc += e.1;
            acc
        }))
        .collect::<Vec<f64>>()
    };
    let (wp, wn) = (prefix(&pos), prefix(&neg));
    let mut best: Option<(f64, usize, usize, Vec<Point>)> = None;
    for i in 0..=pos.len() {
        for j in 0..=neg.len() {
            if i + j == 0 {
                continue;
            }
            let a = if i > 0 { pos[i - 1].0 } else { 0.0 };
            let b = if j > 0 { neg[j - 1].0 } else { 0.0 };
            let len = if i == 0 { b } else if j == 0 { a } else { (2.0 * a + b).min(a + 2.0 * b) };
            let ratio = (wp[i] + wn[j]) / len.max(l);
            if let Some((br, bi, bj, _)) = &best {
                if ratio < *br || (ratio == *br && i + j >= bi + bj) {
                    continue;
                }
            }
            let right = pos[..i].iter().map(|e| Point::on_axis(e.0));
            let left = neg[..j].iter().map(|e| Point::on_axis(-e.0));
            let seq: Vec<Point> = if i > 0 && j > 0 && a > b {
                left.chain(right).collect()
            } else {
                right.chain(left).collect()
            };
            best = Some((ratio, i, j, seq));
        }
    }
    let (_, _, _, seq) = best.expect("nonempty field");
    let mut points = vec![Point::ORIGIN];
    points.extend(seq);
    let rec = path_score_min(&points, field, min_length)?;
    Ok(GreedyResult {
        value: rec.ratio,
        best: Some(rec),
        mode: GreedyMode::ExactLine,
        min_length,
        nodes_explored: 0,
        restarts: 0,
        window_half_width: field.window.half_width,
    })
}

/// Exact windowed `S_l` in dimension 1 and the pathwise ceiling
/// `max_{L'} W([-L', L']) / max(l, L')`, `W` being the total weight.
pub fn d1_ceiling_check(field: &WeightedPointField, l: f64) -> Result<(f64, f64), GreedyError> {
    let value = exact_supremum_d1(field, Some(l))?.value;
    let mut abs: Vec<(f64, f64)> = field.points.iter().map(|p| (p.location.0[0].abs(), p.weight)).collect();
    abs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut ceiling: f64 = 0.0;
    let mut i = 0;
    while i < abs.len() {
        let x = abs[i].0;
        while i < abs.len() && abs[i].0 == x {
            acc += abs[i].1;
            i += 1;
        }
        ceiling = ceiling.max(acc / x.max(l));
    }
    Ok((value, ceiling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_weight_field, scale_field, WeightedPoint, Window};
    use crate::radius::WeightMeasure;
    use proptest::prelude::*;

    fn field2(pts: &[((f64, f64), f64)]) -> WeightedPointField {
        WeightedPointField {
            window: Window::new(2, 5.0).unwrap(),
            points: pts.iter().map(|&((x, y), w)| WeightedPoint { location: Point::new(&[x, y]), weight: w }).collect(),
            measure: WeightMeasure::unit(1.0),
            seed: 0,
            horizon_too_short: false,
        }
    }

    fn field1(pts: &[(f64, f64)]) -> WeightedPointField {
        WeightedPointField {
            window: Window::new(1, 50.0).unwrap(),
            points: pts.iter().map(|&(x, w)| WeightedPoint { location: Point::on_axis(x), weight: w }).collect(),
            measure: WeightMeasure::unit(1.0),
            seed: 0,
            horizon_too_short: false,
        }
    }

    fn p(x: f64, y: f64) -> Point {
        Point::new(&[x, y])
    }

    #[test]
    fn path_score_examples() {
        let f = field2(&[((1.0, 0.0), 3.0)]);
        assert_eq!(path_score(&[Point::ORIGIN, p(1.0, 0.0)], &f).unwrap().ratio, 3.0);
        assert_eq!(path_score(&[Point::ORIGIN, p(0.0, 2.0)], &f).unwrap().ratio, 0.0);
        let f = field2(&[((1.0, 0.0), 2.0), ((2.0, 0.0), 2.0)]);
        let r = path_score(&[Point::ORIGIN, p(2.0, 0.0), p(1.0, 0.0)], &f).unwrap();
        assert_eq!((r.weight, r.length, r.ratio), (4.0, 3.0, 4.0 / 3.0));
        assert!(path_score(&[Point::ORIGIN, p(1.0, 0.0), p(1.0, 0.0)], &f).is_err());
        assert!(path_score(&[Point::ORIGIN], &f).is_err());
    }

    #[test]
    fn exact_examples() {
        let f = field2(&[((1.0, 0.0), 2.0), ((2.0, 0.0), 2.0)]);
        for r in [exact_supremum(&f, 2, None).unwrap(), enumerate_supremum(&f, 2, None).unwrap()] {
            assert_eq!(r.value, 2.0);
            assert_eq!(r.best.unwrap().points, vec![Point::ORIGIN, p(1.0, 0.0)]);
        }
        assert_eq!(enumerate_supremum(&f, 2, None).unwrap().nodes_explored, 4);
        assert_eq!(exact_supremum(&field2(&[]), 3, None).unwrap().value, 0.0);
        assert_eq!(exact_supremum(&field2(&[((0.5, 0.0), 3.0)]), 1, None).unwrap().value, 6.0);
    }

    #[test]
    fn min_length_completion() {
        let f = field1(&[(1.0, 5.0)]);
        let r = exact_supremum(&f, 1, Some(10.0)).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.best.unwrap().completion, 9.0);
        assert_eq!(d1_ceiling_check(&f, 10.0).unwrap(), (0.5, 0.5));
        assert_eq!(d1_ceiling_check(&field1(&[]), 10.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn singleton_examples() {
        assert_eq!(singleton_supremum(&field2(&[((0.5, 0.0), 3.0)])), 6.0);
        assert_eq!(singleton_supremum(&field2(&[])), 0.0);
    }

    #[test]
    fn heuristic_on_singleton_field() {
        let f = field2(&[((0.5, 0.5), 3.0)]);
        let h = heuristic_supremum(&f, &HeuristicOptions::default(), None).unwrap();
        assert_eq!(h.value, exact_supremum(&f, 1, None).unwrap().value);
    }

    #[test]
    fn json_export() {
        let f = field2(&[((1.0, 0.0), 2.0)]);
        let r = exact_supremum(&f, 2, None).unwrap();
        let mut buf = Vec::new();
        r.write_json(2, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["value"], 2.0);
        assert_eq!(v["mode"]["kind"], "exact");
        assert_eq!(v["path"][1][0], 1.0);
    }

    fn random_field(seed: u64, half: f64) -> WeightedPointField {
        let m = WeightMeasure::new("exponential:rate=1".parse().unwrap(), crate::radius::Transform::Identity);
        sample_weight_field(Window::new(2, half).unwrap(), &m, seed).unwrap()
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        for seed in 0..40 {
            let f = random_field(seed, 1.3);
            if f.len() > 8 {
                continue;
            }
            for l in [None, Some(2.5)] {
                for k in 1..=4 {
                    let a = exact_supremum(&f, k, l).unwrap();
                    let b = enumerate_supremum(&f, k, l).unwrap();
                    assert_eq!(a.value, b.value, "seed {seed} k {k}");
                    assert_eq!(a.best, b.best, "seed {seed} k {k}");
                }
            }
        }
    }

    #[test]
    fn d1_solver_matches_enumeration() {
        for seed in 0..30 {
            let m = WeightMeasure::new("uniform:a=0.5,b=2".parse().unwrap(), crate::radius::Transform::Identity);
            let f = sample_weight_field(Window::new(1, 3.0).unwrap(), &m, seed).unwrap();
            if f.len() > 7 {
                continue;
            }
            for l in [None, Some(4.0)] {
                let a = exact_supremum_d1(&f, l).unwrap().value;
                let b = enumerate_supremum(&f, f.len().max(1), l).unwrap().value;
                assert!((a - b).abs() <= 1e-12 * b.max(1.0), "seed {seed}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaling_identity_on_small_fields() {
        for seed in 0..10 {
            let f = random_field(seed, 1.5);
            let base = exact_supremum(&f, 3, None).unwrap().value;
            for m in [0.25, 4.0] {
                let g = scale_field(&f, m).unwrap();
                let v = exact_supremum(&g, 3, None).unwrap().value;
                assert!((v * m.sqrt() - base).abs() <= 1e-12 * base.max(1e-300));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn adding_a_point_never_lowers_the_value(seed in 0u64..1000, x in -1.5f64..1.5, y in -1.5f64..1.5, w in 0.1f64..3.0) {
            let f = random_field(seed, 1.5);
            prop_assume!(f.len() <= 10);
            let before = exact_supremum(&f, 3, None).unwrap().value;
            let mut g = f.clone();
            g.points.push(WeightedPoint { location: p(x, y), weight: w });
            prop_assert!(exact_supremum(&g, 3, None).unwrap().value >= before);
        }

        #[test]
        fn min_length_lowers_the_value(seed in 0u64..1000, l1 in 0.1f64..5.0, dl in 0.0f64..5.0) {
            let f = random_field(seed, 1.5);
            prop_assume!(f.len() <= 10);
            let s = exact_supremum(&f, 3, None).unwrap().value;
            let a = exact_supremum(&f, 3, Some(l1)).unwrap().value;
            let b = exact_supremum(&f, 3, Some(l1 + dl)).unwrap().value;
            prop_assert!(a <= s && b <= a);
        }

        #[test]
        fn window_restriction_lowers_the_value(seed in 0u64..1000, inner in 0.5f64..1.5) {
            let f = random_field(seed, 1.5);
            prop_assume!(f.len() <= 10);
            let mut g = f.clone();
            g.points.retain(|q| q.location.coords(2).iter().all(|c| c.abs() <= inner));
            prop_assert!(exact_supremum(&g, 3, None).unwrap().value <= exact_supremum(&f, 3, None).unwrap().value);
        }

        #[test]
        fn heuristic_never_exceeds_exact(seed in 0u64..1000) {
            let f = random_field(seed, 1.5);
            prop_assume!(f.len() <= 10);
            let opts = HeuristicOptions { max_points: Some(3), ..Default::default() };
            let h = heuristic_supremum(&f, &opts, None).unwrap().value;
            prop_assert!(h <= exact_supremum(&f, 3, None).unwrap().value);
        }
    }
}
