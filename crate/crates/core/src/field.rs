//! Poisson fields: the growth field on window x [0, T] x (0, inf), weighted
//! point fields, the fast-ball thinning and the scaling map.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::point::{Point, MAX_DIM};
use crate::radius::{RadiusError, RadiusLaw, WeightMeasure};
use crate::rng::{purpose, stream_rng, SimRng};

/// Expected point count above which sampling refuses to run.
pub const DEFAULT_CAPACITY: f64 = 5e7;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("expected {expected:.3e} points exceeds the capacity {cap:.3e}")]
    CapacityExceeded { expected: f64, cap: f64 },
    #[error("invalid field parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Radius(#[from] RadiusError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// The box `[-L, L]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub dim: usize,
    pub half_width: f64,
}

impl Window {
    pub fn new(dim: usize, half_width: f64) -> Result<Self, FieldError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(FieldError::Invalid(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(FieldError::Invalid(format!("half width must be positive, got {half_width}")));
        }
        Ok(Window { dim, half_width })
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.coords(self.dim).iter().all(|c| c.abs() <= self.half_width)
    }

    /// Whether the closed ball of radius `r` around `c` lies in the window.
    pub fn contains_ball(&self, c: &Point, r: f64) -> bool {
        c.coords(self.dim).iter().all(|x| x.abs() + r <= self.half_width)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = Point::ORIGIN;
        for i in 0..self.dim {
            p.0[i] = (2.0 * rng.random::<f64>() - 1.0) * self.half_width;
        }
        p
    }

    pub fn scaled(&self, factor: f64) -> Window {
        Window { dim: self.dim, half_width: self.half_width * factor }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub center: Point,
    pub time: f64,
    pub radius: f64,
}

/// A realization of the growth field restricted to a window and a time horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthField {
    pub window: Window,
    pub horizon: f64,
    pub seed: u64,
    /// Sorted by time; ties keep generation order.
    pub points: Vec<SpacetimePoint>,
}

fn draw_count<R: Rng + ?Sized>(mean: f64, cap: f64, rng: &mut R) -> Result<usize, FieldError> {
    if mean > cap {
        return Err(FieldError::CapacityExceeded { expected: mean, cap });
    }
    if mean <= 0.0 {
        return Ok(0);
    }
    let poisson = Poisson::new(mean).map_err(|e| FieldError::Invalid(e.to_string()))?;
    Ok(poisson.sample(rng) as usize)
}

impl GrowthField {
    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Radius above which the field holds no point except with probability `1e-12`.
    pub fn radius_cap(&self, law: &RadiusLaw) -> f64 {
        law.radius_cap(self.window.volume() * self.horizon)
    }

    /// Writes the line-oriented text format.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<(), FieldError> {
        writeln!(out, "{} {:.16e} {:.16e} {}", self.dim(), self.window.half_width, self.horizon, self.seed)?;
        let mut line = String::new();
        for p in &self.points {
            line.clear();
            for c in p.center.coords(self.dim()) {
                let _ = write!(line, "{c:.16e} ");
            }
            let _ = write!(line, "{:.16e} {:.16e}", p.time, p.radius);
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self, FieldError> {
        let mut lines = input.lines().enumerate();
        let bad = |line: usize, reason: &str| FieldError::Format { line: line + 1, reason: reason.to_string() };
        let (n, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let header = header?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(bad(n, "header must be `dim L T seed`"));
        }
        let dim: usize = parts[0].parse().map_err(|_| bad(n, "bad dim"))?;
        let half_width: f64 = parts[1].parse().map_err(|_| bad(n, "bad L"))?;
        let horizon: f64 = parts[2].parse().map_err(|_| bad(n, "bad T"))?;
        let seed: u64 = parts[3].parse().map_err(|_| bad(n, "bad seed"))?;
        let window = Window::new(dim, half_width)?;
        let mut points = Vec::new();
        for (n, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            let vals = vals.map_err(|_| bad(n, "bad number"))?;
            if vals.len() != dim + 2 {
                return Err(bad(n, "wrong number of fields"));
            }
            points.push(SpacetimePoint { center: Point::new(&vals[..dim]), time: vals[dim], radius: vals[dim + 1] });
        }
        Ok(GrowthField { window, horizon, seed, points })
    }
}

/// Samples the growth field on `[-L, L]^d x [0, horizon]` from stream
/// [`purpose::FIELD`] of `seed`.
pub fn sample_growth_field(window: Window, horizon: f64, law: &RadiusLaw, seed: u64) -> Result<GrowthField, FieldError> {
    let mut rng = stream_rng(seed, purpose::FIELD);
    sample_growth_field_with(window, horizon, law, seed, DEFAULT_CAPACITY, &mut rng)
}

/// Samples the growth field from an explicit generator.
pub fn sample_growth_field_with(
    window: Window,
    horizon: f64,
    law: &RadiusLaw,
    seed: u64,
    capacity: f64,
    rng: &mut SimRng,
) -> Result<GrowthField, FieldError> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(FieldError::Invalid(format!("horizon must be finite and nonnegative, got {horizon}")));
    }
    let n = draw_count(window.volume() * horizon, capacity, rng)?;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let center = window.sample(rng);
        let time = rng.random::<f64>() * horizon;
        let radius = law.sample(rng);
        points.push(SpacetimePoint { center, time, radius });
    }
    points.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(GrowthField { window, horizon, seed, points })
}

/// Raises the horizon of `field` to `new_horizon` by adding the independent
/// points with times in `(horizon, new_horizon]`. The points already present
/// are kept, so the result is the same realization seen over a longer span.
pub fn extend_growth_field(
    field: &mut GrowthField,
    law: &RadiusLaw,
    new_horizon: f64,
    capacity: f64,
    rng: &mut SimRng,
) -> Result<(), FieldError> {
    if !(new_horizon >= field.horizon && new_horizon.is_finite()) {
        return Err(FieldError::Invalid(format!("cannot shrink the horizon to {new_horizon}")));
    }
    let extra_mean = field.window.volume() * (new_horizon - field.horizon);
    if field.points.len() as f64 + extra_mean > capacity {
        return Err(FieldError::CapacityExceeded { expected: field.points.len() as f64 + extra_mean, cap: capacity });
    }
    let n = draw_count(extra_mean, f64::INFINITY, rng)?;
    let start = field.points.len();
    for _ in 0..n {
        let center = field.window.sample(rng);
        let time = field.horizon + rng.random::<f64>() * (new_horizon - field.horizon);
        let radius = law.sample(rng);
        field.points.push(SpacetimePoint { center, time, radius });
    }
    field.points[start..].sort_by(|a, b| a.time.total_cmp(&b.time));
    field.horizon = new_horizon;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub location: Point,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPointField {
    pub window: Window,
    pub points: Vec<WeightedPoint>,
    pub measure: WeightMeasure,
    pub seed: u64,
    /// Set by [`fast_thin`] when the horizon is shorter than `alpha * r_cap`.
    pub horizon_too_short: bool,
}

impl WeightedPointField {
    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Samples a Poisson field with intensity Lebesgue x `measure` on the window.
pub fn sample_weight_field(window: Window, measure: &WeightMeasure, seed: u64) -> Result<WeightedPointField, FieldError> {
    let mut rng = stream_rng(seed, purpose::WEIGHTS);
    sample_weight_field_with(window, measure, seed, DEFAULT_CAPACITY, &mut rng)
}

pub fn sample_weight_field_with(
    window: Window,
    measure: &WeightMeasure,
    seed: u64,
    capacity: f64,
    rng: &mut SimRng,
) -> Result<WeightedPointField, FieldError> {
    let mass = measure
        .total_mass()
        .value()
        .ok_or_else(|| FieldError::Invalid("weight measure has infinite total mass".into()))?;
    let n = draw_count(window.volume() * mass, capacity, rng)?;
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let location = window.sample(rng);
        let weight = measure.sample_weight(rng)?;
        if location == Point::ORIGIN {
            continue;
        }
        points.push(WeightedPoint { location, weight });
    }
    Ok(WeightedPointField { window, points, measure: *measure, seed, horizon_too_short: false })
}

/// Keeps `(center, radius)` of every point with `time <= alpha * radius`.
pub fn fast_thin(field: &GrowthField, law: &RadiusLaw, alpha: f64) -> Result<WeightedPointField, FieldError> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(FieldError::Invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    let points = field
        .points
        .iter()
        .filter(|p| p.time <= alpha * p.radius)
        .map(|p| WeightedPoint { location: p.center, weight: p.radius })
        .collect();
    Ok(WeightedPointField {
        window: field.window,
        points,
        measure: WeightMeasure::fast_ball(*law, alpha),
        seed: field.seed,
        horizon_too_short: field.horizon < alpha * field.radius_cap(law),
    })
}

/// Maps `(c, r)` to `(m^{1/d} c, r)`.
pub fn scale_field(field: &WeightedPointField, m: f64) -> Result<WeightedPointField, FieldError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(FieldError::Invalid(format!("scale must be positive, got {m}")));
    }
    let factor = m.powf(1.0 / field.dim() as f64);
    Ok(WeightedPointField {
        window: field.window.scaled(factor),
        points: field
            .points
            .iter()
            .map(|p| WeightedPoint { location: p.location.scaled(factor), weight: p.weight })
            .collect(),
        ..field.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radius::Transform;
    use crate::stats::Summary;

    fn dirac1() -> RadiusLaw {
        RadiusLaw::dirac(1.0).unwrap()
    }

    #[test]
    fn growth_count_mean() {
        let w = Window::new(2, 5.0).unwrap();
        let counts: Vec<f64> =
            (0..400).map(|s| sample_growth_field(w, 2.0, &dirac1(), s).unwrap().len() as f64).collect();
        let m = Summary::of(&counts).mean;
        assert!((m - 200.0).abs() < 4.0 * (200.0f64 / 400.0).sqrt(), "mean {m}");
    }

    #[test]
    fn zero_horizon_is_empty() {
        let f = sample_growth_field(Window::new(2, 5.0).unwrap(), 0.0, &dirac1(), 1).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn growth_field_invariants() {
        let w = Window::new(3, 2.0).unwrap();
        let law = RadiusLaw::pareto(3.0, 1.0).unwrap();
        let f = sample_growth_field(w, 3.0, &law, 5).unwrap();
        assert!(f.points.windows(2).all(|p| p[0].time <= p[1].time));
        assert!(f.points.iter().all(|p| w.contains(&p.center) && (0.0..=3.0).contains(&p.time) && p.radius >= 1.0));
        assert_eq!(f, sample_growth_field(w, 3.0, &law, 5).unwrap());
        assert_ne!(f, sample_growth_field(w, 3.0, &law, 6).unwrap());
    }

    #[test]
    fn pareto_radius_mean() {
        let law = RadiusLaw::pareto(3.0, 1.0).unwrap();
        let f = sample_growth_field(Window::new(2, 50.0).unwrap(), 11.0, &law, 9).unwrap();
        let r: Vec<f64> = f.points.iter().take(100_000).map(|p| p.radius).collect();
        assert_eq!(r.len(), 100_000);
        let se = (0.75f64 / r.len() as f64).sqrt();
        assert!((Summary::of(&r).mean - 1.5).abs() < 3.0 * se);
    }

    #[test]
    fn capacity_guard() {
        let w = Window::new(3, 1e4).unwrap();
        assert!(matches!(sample_growth_field(w, 1.0, &dirac1(), 1), Err(FieldError::CapacityExceeded { .. })));
    }

    #[test]
    fn text_round_trip() {
        let law = RadiusLaw::exponential(0.7).unwrap();
        let f = sample_growth_field(Window::new(2, 3.0).unwrap(), 1.5, &law, 77).unwrap();
        let mut buf = Vec::new();
        f.write_text(&mut buf).unwrap();
        let g = GrowthField::read_text(buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn weight_field_examples() {
        let unit = WeightMeasure::unit(1.0);
        let w = Window::new(2, 1.5).unwrap();
        let counts: Vec<f64> = (0..400)
            .map(|s| {
                let f = sample_weight_field(w, &unit, s).unwrap();
                assert!(f.points.iter().all(|p| p.weight == 1.0));
                f.len() as f64
            })
            .collect();
        assert!((Summary::of(&counts).mean - 9.0).abs() < 4.0 * (9.0f64 / 400.0).sqrt());

        let fast = WeightMeasure::fast_ball(dirac1(), 0.5);
        let w = Window::new(2, 5.0).unwrap();
        let counts: Vec<f64> = (0..400).map(|s| sample_weight_field(w, &fast, s).unwrap().len() as f64).collect();
        assert!((Summary::of(&counts).mean - 50.0).abs() < 4.0 * (50.0f64 / 400.0).sqrt());

        let empty = WeightMeasure::new(dirac1(), Transform::FastBall { alpha: 0.0 });
        assert!(sample_weight_field(w, &empty, 3).unwrap().is_empty());
    }

    #[test]
    fn fast_thin_examples() {
        let w = Window::new(2, 5.0).unwrap();
        let single = GrowthField {
            window: w,
            horizon: 1.0,
            seed: 0,
            points: vec![SpacetimePoint { center: Point::new(&[1.0, 1.0]), time: 0.4, radius: 1.0 }],
        };
        let thin = fast_thin(&single, &dirac1(), 0.5).unwrap();
        assert_eq!(thin.points, vec![WeightedPoint { location: Point::new(&[1.0, 1.0]), weight: 1.0 }]);
        assert!(fast_thin(&single, &dirac1(), 0.0).unwrap().is_empty());

        let counts: Vec<f64> = (0..400)
            .map(|s| {
                let f = sample_growth_field(w, 0.5, &dirac1(), s).unwrap();
                let t = fast_thin(&f, &dirac1(), 0.5).unwrap();
                assert!(!t.horizon_too_short);
                assert!(t.points.iter().all(|p| f.points.iter().any(|q| q.center == p.location && q.radius == p.weight)));
                t.len() as f64
            })
            .collect();
        assert!((Summary::of(&counts).mean - 50.0).abs() < 4.0 * (50.0f64 / 400.0).sqrt());
        let short = sample_growth_field(w, 0.2, &dirac1(), 1).unwrap();
        assert!(fast_thin(&short, &dirac1(), 0.5).unwrap().horizon_too_short);
    }

    #[test]
    fn scale_examples() {
        let f = WeightedPointField {
            window: Window::new(2, 3.0).unwrap(),
            points: vec![WeightedPoint { location: Point::new(&[1.0, 0.0]), weight: 2.0 }],
            measure: WeightMeasure::unit(1.0),
            seed: 0,
            horizon_too_short: false,
        };
        let g = scale_field(&f, 4.0).unwrap();
        assert_eq!(g.points[0], WeightedPoint { location: Point::new(&[2.0, 0.0]), weight: 2.0 });
        assert_eq!(g.window.half_width, 6.0);
        assert_eq!(scale_field(&f, 1.0).unwrap(), f);
    }
}
