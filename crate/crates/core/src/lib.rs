//! Simulation and analysis laboratory for continuous first-passage percolation
//! (spherical outbursts with random radii) and the continuous greedy paths model.
//!
//! Module map:
//! - [`radius`]: radius laws, derived weight measures, growth classification.
//! - [`field`]: Poisson fields of outbursts and of weighted points, thinning, scaling.
//! - [`geometry`]: balls, unions of balls, uniform sampling, spatial grids.
//! - [`fpp`]: growth engines, passage times, speed estimation, domination chains.
//! - [`greedy`]: greedy path scores, exact and heuristic suprema.
//! - [`experiments`]: configuration, replica fan-out, reports, validation suites.

pub mod experiments;
pub mod field;
pub mod fpp;
pub mod geometry;
pub mod greedy;
pub mod point;
pub mod radius;
pub mod rng;
pub mod stats;

pub use field::{GrowthField, SpacetimePoint, WeightedPoint, WeightedPointField, Window};
pub use geometry::{Ball, RegionUnion};
pub use point::{Point, MAX_DIM};
pub use radius::{ExtendedReal, GrowthClassification, RadiusLaw, Verdict, WeightMeasure};
