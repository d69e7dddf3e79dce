//! Closed balls, indexed unions of balls, and the spatial grids used by the
//! growth engines.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::point::{Point, MAX_DIM};

/// Closed Euclidean ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// Volume of the unit ball in dimension `d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 / 3.0 * PI,
        _ => {
            let h = d as f64 / 2.0;
            PI.powf(h) / gamma(h + 1.0)
        }
    }
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        Ball { center, radius }
    }

    /// The ball of radius `r` around the origin.
    pub fn centered(radius: f64) -> Self {
        Ball { center: Point::ORIGIN, radius }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.center.dist2(x) <= self.radius * self.radius
    }

    pub fn volume(&self, dim: usize) -> f64 {
        unit_ball_volume(dim) * self.radius.powi(dim as i32)
    }

    /// Largest norm of a point of the ball.
    pub fn reach(&self) -> f64 {
        self.center.norm() + self.radius
    }

    /// Uniform point in the ball (rejection from the bounding cube).
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Point {
        loop {
            let mut p = Point::ORIGIN;
            let mut n2 = 0.0;
            for i in 0..dim {
                let u = 2.0 * rng.random::<f64>() - 1.0;
                p.0[i] = u;
                n2 += u * u;
            }
            if n2 <= 1.0 {
                return self.center.add(&p.scaled(self.radius));
            }
        }
    }
}

type CellKey = [i64; MAX_DIM];

fn cell_of(x: &Point, dim: usize, h: f64) -> CellKey {
    let mut k = [0i64; MAX_DIM];
    for (ki, &xi) in k.iter_mut().zip(&x.0[..dim]) {
        *ki = (xi / h).floor() as i64;
    }
    k
}

/// Calls `f` for every cell key of the box `[lo, hi]`.
fn for_cells(lo: &CellKey, hi: &CellKey, dim: usize, mut f: impl FnMut(CellKey)) {
    let mut k = *lo;
    loop {
        f(k);
        let mut i = 0;
        loop {
            if i == dim {
                return;
            }
            if k[i] < hi[i] {
                k[i] += 1;
                break;
            }
            k[i] = lo[i];
            i += 1;
        }
    }
}

fn cell_count(lo: &CellKey, hi: &CellKey, dim: usize) -> f64 {
    (0..dim).map(|i| (hi[i] - lo[i] + 1) as f64).product()
}

/// Balls spanning more cells than this go to a separate list.
const LARGE_BALL_CELLS: f64 = 256.0;

/// A finite union of closed balls with a uniform-grid index.
///
/// Each ball carries a stamp (its acceptance time for growth traces).
#[derive(Debug, Clone)]
pub struct RegionUnion {
    dim: usize,
    balls: Vec<Ball>,
    stamps: Vec<f64>,
    cell: f64,
    index: HashMap<CellKey, Vec<u32>>,
    large: Vec<u32>,
    indexed: usize,
    intervals: Option<IntervalSet>,
    volume_sum: f64,
}

impl RegionUnion {
    pub fn new(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        RegionUnion {
            dim,
            balls: Vec::new(),
            stamps: Vec::new(),
            cell: 1.0,
            index: HashMap::new(),
            large: Vec::new(),
            indexed: 0,
            intervals: (dim == 1).then(IntervalSet::default),
            volume_sum: 0.0,
        }
    }

    pub fn from_balls(dim: usize, balls: impl IntoIterator<Item = Ball>) -> Self {
        let mut u = RegionUnion::new(dim);
        for b in balls {
            u.push(b, 0.0);
        }
        u
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn stamps(&self) -> &[f64] {
        &self.stamps
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Sum of the ball volumes.
    pub fn total_ball_volume(&self) -> f64 {
        self.volume_sum
    }

    pub fn push(&mut self, ball: Ball, stamp: f64) {
        let id = self.balls.len() as u32;
        self.balls.push(ball);
        self.stamps.push(stamp);
        self.volume_sum += ball.volume(self.dim);
        if let Some(iv) = self.intervals.as_mut() {
            iv.insert(ball.center.0[0] - ball.radius, ball.center.0[0] + ball.radius);
        }
        if self.balls.len() >= 2 * self.indexed.max(8) {
            self.rebuild();
        } else {
            self.insert_index(id);
        }
    }

    fn insert_index(&mut self, id: u32) {
        let b = self.balls[id as usize];
        let (lo, hi) = self.bounding_cells(&b);
        if cell_count(&lo, &hi, self.dim) > LARGE_BALL_CELLS {
            self.large.push(id);
            return;
        }
        let index = &mut self.index;
        for_cells(&lo, &hi, self.dim, |k| index.entry(k).or_default().push(id));
    }

    fn bounding_cells(&self, b: &Ball) -> (CellKey, CellKey) {
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for i in 0..self.dim {
            lo[i] = ((b.center.0[i] - b.radius) / self.cell).floor() as i64;
            hi[i] = ((b.center.0[i] + b.radius) / self.cell).floor() as i64;
        }
        (lo, hi)
    }

    /// Rebuilds the index with cell size equal to the median radius.
    fn rebuild(&mut self) {
        let mut radii: Vec<f64> = self.balls.iter().map(|b| b.radius).collect();
        let mid = radii.len() / 2;
        let (_, median, _) = radii.select_nth_unstable_by(mid, f64::total_cmp);
        self.cell = *median;
        self.index.clear();
        self.large.clear();
        for id in 0..self.balls.len() as u32 {
            self.insert_index(id);
        }
        self.indexed = self.balls.len();
    }

    fn candidates<'a>(&'a self, x: &Point) -> impl Iterator<Item = u32> + 'a {
        let cell = self.index.get(&cell_of(x, self.dim, self.cell));
        cell.into_iter().flatten().copied().chain(self.large.iter().copied())
    }

    /// Whether `x` lies in some ball of the union.
    pub fn covers(&self, x: &Point) -> bool {
        self.candidates(x).any(|id| self.balls[id as usize].contains(x))
    }

    /// Number of balls containing `x`.
    pub fn coverage_count(&self, x: &Point) -> usize {
        self.candidates(x).filter(|&id| self.balls[id as usize].contains(x)).count()
    }

    /// Membership by scanning every ball, bypassing the index.
    pub fn covers_linear(&self, x: &Point) -> bool {
        self.balls.iter().any(|b| b.contains(x))
    }

    /// Smallest stamp among the balls containing `x`.
    pub fn earliest_cover(&self, x: &Point) -> Option<f64> {
        self.candidates(x)
            .filter(|&id| self.balls[id as usize].contains(x))
            .map(|id| self.stamps[id as usize])
            .min_by(f64::total_cmp)
    }

    /// Smallest stamp among balls containing `x` whose center is not `x`,
    /// together with the ball index.
    pub fn earliest_hit(&self, x: &Point) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for id in self.candidates(x) {
            let b = &self.balls[id as usize];
            let d2 = b.center.dist2(x);
            if d2 > 0.0 && d2 <= b.radius * b.radius {
                let s = self.stamps[id as usize];
                let better = match best {
                    None => true,
                    Some((t, j)) => s < t || (s == t && (id as usize) < j),
                };
                if better {
                    best = Some((s, id as usize));
                }
            }
        }
        best
    }

    /// Whether `x` is covered by a ball stamped at or before `t`.
    pub fn covers_at(&self, x: &Point, t: f64) -> bool {
        self.candidates(x).any(|id| self.stamps[id as usize] <= t && self.balls[id as usize].contains(x))
    }

    /// Exact length of the union in dimension 1.
    pub fn union_length_1d(&self) -> f64 {
        assert_eq!(self.dim, 1, "union_length_1d needs dimension 1");
        self.intervals.as_ref().map_or(0.0, IntervalSet::length)
    }

    /// The union as disjoint intervals (dimension 1 only).
    pub fn intervals(&self) -> Option<&IntervalSet> {
        self.intervals.as_ref()
    }

    /// Unbiased Monte Carlo estimate of the union volume and its standard error.
    pub fn union_volume_mc<R: Rng + ?Sized>(&self, n_samples: usize, rng: &mut R) -> (f64, f64) {
        assert!(n_samples >= 1, "need at least one sample");
        if self.balls.is_empty() {
            return (0.0, 0.0);
        }
        let cumulative = self.cumulative_volumes();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n_samples {
            let x = self.sample_in_random_ball(&cumulative, rng);
            let w = 1.0 / self.coverage_count(&x) as f64;
            s += w;
            s2 += w * w;
        }
        let n = n_samples as f64;
        let mean = s / n;
        let var = if n_samples > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (self.volume_sum * mean, self.volume_sum * (var / n).sqrt())
    }

    fn cumulative_volumes(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.balls
            .iter()
            .map(|b| {
                acc += b.volume(self.dim);
                acc
            })
            .collect()
    }

    fn sample_in_random_ball<R: Rng + ?Sized>(&self, cumulative: &[f64], rng: &mut R) -> Point {
        let total = *cumulative.last().expect("nonempty union");
        let u = rng.random::<f64>() * total;
        let i = cumulative.partition_point(|&c| c <= u).min(self.balls.len() - 1);
        self.balls[i].sample(self.dim, rng)
    }

    /// Uniform point of the union.
    pub fn sample_uniform_in_union<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        assert!(!self.balls.is_empty(), "cannot sample from an empty union");
        if let Some(iv) = &self.intervals {
            return Point::on_axis(iv.sample(rng));
        }
        let cumulative = self.cumulative_volumes();
        loop {
            let x = self.sample_in_random_ball(&cumulative, rng);
            let k = self.coverage_count(&x);
            if k == 1 || rng.random::<f64>() * (k as f64) < 1.0 {
                return x;
            }
        }
    }
}

/// Disjoint closed intervals kept sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    parts: Vec<(f64, f64)>,
    length: f64,
}

impl IntervalSet {
    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn insert(&mut self, lo: f64, hi: f64) {
        debug_assert!(lo <= hi);
        let start = self.parts.partition_point(|&(_, b)| b < lo);
        let end = self.parts.partition_point(|&(a, _)| a <= hi);
        let (mut nlo, mut nhi) = (lo, hi);
        if start < end {
            nlo = nlo.min(self.parts[start].0);
            nhi = nhi.max(self.parts[end - 1].1);
        }
        self.parts.splice(start..end, std::iter::once((nlo, nhi)));
        self.length = self.parts.iter().map(|&(a, b)| b - a).sum();
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.parts.partition_point(|&(_, b)| b < x);
        i < self.parts.len() && self.parts[i].0 <= x
    }

    /// Uniform point of the union.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut u = rng.random::<f64>() * self.length;
        for &(a, b) in &self.parts {
            let len = b - a;
            if u < len {
                return a + u;
            }
            u -= len;
        }
        self.parts.last().map_or(0.0, |&(_, b)| b)
    }

    /// Largest absolute value in the union.
    pub fn reach(&self) -> f64 {
        match (self.parts.first(), self.parts.last()) {
            (Some(&(a, _)), Some(&(_, b))) => a.abs().max(b.abs()),
            _ => 0.0,
        }
    }
}

/// Dense grid of points inside a box `[-L, L]^d`, with removal.
///
/// Used to discover, in one pass per ball, the not yet reached points a ball
/// covers.
#[derive(Debug, Clone)]
pub struct PointGrid {
    dim: usize,
    half_width: f64,
    cell: f64,
    per_axis: usize,
    cells: Vec<Vec<u32>>,
    points: Vec<Point>,
    remaining: usize,
}

impl PointGrid {
    /// Builds a grid over `[-half_width, half_width]^d` with cells of side
    /// about `cell_hint`, coarsened so the cell count stays near the point count.
    pub fn new(dim: usize, half_width: f64, cell_hint: f64, points: Vec<Point>) -> Self {
        let max_cells = (4 * points.len()).max(1024) as f64;
        let max_per_axis = max_cells.powf(1.0 / dim as f64).floor().max(1.0);
        let want = (2.0 * half_width / cell_hint).ceil().max(1.0);
        let per_axis = want.min(max_per_axis) as usize;
        let cell = 2.0 * half_width / per_axis as f64;
        let mut grid = PointGrid {
            dim,
            half_width,
            cell,
            per_axis,
            cells: vec![Vec::new(); per_axis.pow(dim as u32)],
            remaining: points.len(),
            points,
        };
        for id in 0..grid.points.len() {
            let c = grid.cell_index(&grid.points[id]);
            grid.cells[c].push(id as u32);
        }
        grid
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    fn axis_cell(&self, x: f64) -> usize {
        let k = ((x + self.half_width) / self.cell).floor();
        (k.max(0.0) as usize).min(self.per_axis - 1)
    }

    fn cell_index(&self, p: &Point) -> usize {
        let mut idx = 0;
        for i in (0..self.dim).rev() {
            idx = idx * self.per_axis + self.axis_cell(p.0[i]);
        }
        idx
    }

    fn visit_box(&self, ball: &Ball, mut f: impl FnMut(usize)) {
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        for i in 0..self.dim {
            let a = ball.center.0[i] - ball.radius;
            let b = ball.center.0[i] + ball.radius;
            if b < -self.half_width || a > self.half_width {
                return;
            }
            lo[i] = self.axis_cell(a);
            hi[i] = self.axis_cell(b);
        }
        let mut k = lo;
        loop {
            let mut idx = 0;
            for i in (0..self.dim).rev() {
                idx = idx * self.per_axis + k[i];
            }
            f(idx);
            let mut i = 0;
            loop {
                if i == self.dim {
                    return;
                }
                if k[i] < hi[i] {
                    k[i] += 1;
                    break;
                }
                k[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Removes and returns the ids of remaining points `y` with
    /// `0 < |y - c| <= r`.
    pub fn drain_ball(&mut self, ball: &Ball, out: &mut Vec<u32>) {
        out.clear();
        if self.remaining == 0 {
            return;
        }
        let r2 = ball.radius * ball.radius;
        let mut cells = std::mem::take(&mut self.cells);
        let points = &self.points;
        self.visit_box(ball, |idx| {
            cells[idx].retain(|&id| {
                let d2 = points[id as usize].dist2(&ball.center);
                if d2 > 0.0 && d2 <= r2 {
                    out.push(id);
                    false
                } else {
                    true
                }
            });
        });
        self.cells = cells;
        self.remaining -= out.len();
    }

    /// Ids of remaining points `y` with `0 < |y - c| <= r`, without removal.
    pub fn query_ball(&self, ball: &Ball, out: &mut Vec<u32>) {
        out.clear();
        let r2 = ball.radius * ball.radius;
        self.visit_box(ball, |idx| {
            for &id in &self.cells[idx] {
                let d2 = self.points[id as usize].dist2(&ball.center);
                if d2 > 0.0 && d2 <= r2 {
                    out.push(id);
                }
            }
        });
    }

    /// Removes and returns every remaining point inside the closed ball,
    /// including a point at its center.
    pub fn drain_closed_ball(&mut self, ball: &Ball, out: &mut Vec<u32>) {
        out.clear();
        let r2 = ball.radius * ball.radius;
        let mut cells = std::mem::take(&mut self.cells);
        let points = &self.points;
        self.visit_box(ball, |idx| {
            cells[idx].retain(|&id| {
                if points[id as usize].dist2(&ball.center) <= r2 {
                    out.push(id);
                    false
                } else {
                    true
                }
            });
        });
        self.cells = cells;
        self.remaining -= out.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::stats::{chi_square_uniform, Summary};
    use proptest::prelude::{prop_assert, proptest};

    fn p2(x: f64, y: f64) -> Point {
        Point::new(&[x, y])
    }

    #[test]
    fn covers_examples() {
        let u = RegionUnion::from_balls(2, [Ball::centered(1.0)]);
        assert!(u.covers(&p2(1.0, 0.0)));
        assert!(!u.covers(&p2(1.0001, 0.0)));
        assert!(!RegionUnion::new(2).covers(&p2(0.0, 0.0)));
    }

    #[test]
    fn union_length_examples() {
        let b = |c: f64, r: f64| Ball::new(Point::on_axis(c), r);
        assert_eq!(RegionUnion::from_balls(1, [b(1.0, 1.0), b(2.0, 1.0)]).union_length_1d(), 3.0);
        assert_eq!(RegionUnion::from_balls(1, [b(0.5, 0.5), b(2.5, 0.5)]).union_length_1d(), 2.0);
        assert_eq!(RegionUnion::new(1).union_length_1d(), 0.0);
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn mc_volume_examples() {
        let mut rng = stream_rng(1, 7);
        let pi = std::f64::consts::PI;
        let one = RegionUnion::from_balls(2, [Ball::centered(1.0)]);
        assert_eq!(one.union_volume_mc(1000, &mut rng), (pi, 0.0));
        let twin = RegionUnion::from_balls(2, [Ball::centered(1.0), Ball::centered(1.0)]);
        let (v, se) = twin.union_volume_mc(1000, &mut rng);
        assert!((v - pi).abs() <= 3.0 * se + 1e-12);
        let three = RegionUnion::from_balls(2, (0..3).map(|i| Ball::new(p2(3.0 * i as f64, 0.0), 1.0)));
        let (v, se) = three.union_volume_mc(1000, &mut rng);
        assert!((v - 3.0 * pi).abs() < 1e-12 && se == 0.0);
    }

    #[test]
    fn uniform_sampling_examples() {
        let mut rng = stream_rng(2, 7);
        let one = RegionUnion::from_balls(2, [Ball::new(p2(2.0, -1.0), 1.5)]);
        let xs: Vec<f64> = (0..20_000).map(|_| one.sample_uniform_in_union(&mut rng).0[0]).collect();
        let s = Summary::of(&xs);
        assert!((s.mean - 2.0).abs() < 3.0 * s.se);

        let two = RegionUnion::from_balls(2, [Ball::new(p2(-2.0, 0.0), 1.0), Ball::new(p2(2.0, 0.0), 1.0)]);
        let n = 100_000;
        let left = (0..n).filter(|_| two.sample_uniform_in_union(&mut rng).0[0] < 0.0).count() as f64;
        assert!((left / n as f64 - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());

        let b = |c: f64, r: f64| Ball::new(Point::on_axis(c), r);
        let line = RegionUnion::from_balls(1, [b(1.0, 1.0), b(2.0, 1.0)]);
        let mut bins = [0u64; 10];
        for _ in 0..100_000 {
            let x = line.sample_uniform_in_union(&mut rng).0[0];
            bins[((x / 0.3) as usize).min(9)] += 1;
        }
        assert!(chi_square_uniform(&bins).p_value > 0.01);
    }

    #[test]
    fn interval_set_merges() {
        let mut s = IntervalSet::default();
        s.insert(0.0, 1.0);
        s.insert(2.0, 3.0);
        s.insert(-5.0, -4.0);
        assert_eq!(s.parts().len(), 3);
        s.insert(0.5, 2.0);
        assert_eq!(s.parts(), &[(-5.0, -4.0), (0.0, 3.0)]);
        assert_eq!(s.length(), 4.0);
        assert!(s.contains(2.5) && !s.contains(-3.0));
        assert_eq!(s.reach(), 5.0);
    }

    #[test]
    fn indexed_membership_matches_scan() {
        let mut rng = stream_rng(3, 7);
        for dim in 1..=3 {
            let mut u = RegionUnion::new(dim);
            for _ in 0..300 {
                let c = Ball::new(Point::ORIGIN, 10.0).sample(dim, &mut rng);
                let r = 0.05 + 3.0 * rng.random::<f64>().powi(3);
                u.push(Ball::new(c, r), 0.0);
            }
            u.push(Ball::new(Point::ORIGIN, 40.0), 1.0);
            for _ in 0..10_000 {
                let x = Ball::new(Point::ORIGIN, 12.0).sample(dim, &mut rng);
                assert_eq!(u.covers(&x), u.covers_linear(&x));
            }
        }
    }

    #[test]
    fn point_grid_drains_each_point_once() {
        let mut rng = stream_rng(4, 7);
        let pts: Vec<Point> = (0..2000).map(|_| Ball::centered(9.0).sample(2, &mut rng)).collect();
        let mut grid = PointGrid::new(2, 10.0, 0.7, pts.clone());
        let mut seen = vec![false; pts.len()];
        let mut out = Vec::new();
        for _ in 0..200 {
            let b = Ball::new(Ball::centered(10.0).sample(2, &mut rng), 3.0 * rng.random::<f64>());
            let mut expect = Vec::new();
            grid.query_ball(&b, &mut expect);
            grid.drain_ball(&b, &mut out);
            expect.sort();
            out.sort();
            assert_eq!(expect, out);
            for &id in &out {
                assert!(!seen[id as usize]);
                assert!(b.contains(&pts[id as usize]));
                seen[id as usize] = true;
            }
        }
        let brute = (0..pts.len()).filter(|&i| !seen[i]).count();
        assert_eq!(brute, grid.remaining());
    }

    proptest! {
        #[test]
        fn samples_lie_in_union(seed in 0u64..500, n in 1usize..6) {
            let mut rng = stream_rng(seed, 7);
            let balls: Vec<Ball> = (0..n)
                .map(|_| Ball::new(Ball::centered(3.0).sample(2, &mut rng), 0.1 + rng.random::<f64>()))
                .collect();
            let u = RegionUnion::from_balls(2, balls);
            for _ in 0..50 {
                let x = u.sample_uniform_in_union(&mut rng);
                prop_assert!(u.covers(&x));
            }
        }
    }
}
