//! Distributional properties of greedy suprema on sampled fields.

use percolab::field::{sample_weight_field, Window};
use percolab::greedy::{heuristic_supremum, singleton_supremum, HeuristicOptions};
use percolab::radius::{Transform, WeightMeasure};
use percolab::stats::quantile;

#[test]
fn unit_weight_tail_decays_at_least_like_a_power() {
    let measure = WeightMeasure::unit(1.0);
    let window = Window::new(2, 20.0).unwrap();
    let opts = HeuristicOptions { budget: 4, max_points: Some(12), pool: 32, seed: 0 };
    let mut values: Vec<f64> = (0..500)
        .map(|seed| {
            let field = sample_weight_field(window, &measure, 1000 + seed).unwrap();
            heuristic_supremum(&field, &opts, None).unwrap().value
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let alpha0 = values[values.len() * 8 / 10];
    let survival = |a: f64| values.iter().filter(|&&v| v >= a).count() as f64 / values.len() as f64;
    let (p0, p1) = (survival(alpha0), survival(2.0 * alpha0));
    assert!(p1 > 0.0, "no replica reached {}", 2.0 * alpha0);
    let slope = (p1 / p0).ln() / 2f64.ln();
    assert!(slope <= -1.5, "tail slope {slope} over [{alpha0}, {}]", 2.0 * alpha0);
}

#[test]
fn heavy_singleton_supremum_grows_with_the_window() {
    let measure = WeightMeasure::new("pareto:beta=0.75,rmin=1".parse().unwrap(), Transform::Identity);
    let median_at = |half_width: f64| {
        let window = Window::new(2, half_width).unwrap();
        let values: Vec<f64> = (0..50)
            .map(|seed| singleton_supremum(&sample_weight_field(window, &measure, seed).unwrap()))
            .collect();
        quantile(&values, 0.5)
    };
    let (small, large) = (median_at(20.0), median_at(40.0));
    assert!(large >= 2.0 * small, "median {small} at L=20 and {large} at L=40");
}
