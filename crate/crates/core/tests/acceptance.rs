//! Acceptance run: one PASS/FAIL line per suite with every tolerance pinned here.

use std::process::ExitCode;
use std::time::Instant;

use percolab::experiments::suites::*;
use percolab::experiments::ExperimentError;
use percolab::radius::RadiusLaw;

type Runner = Box<dyn Fn() -> Result<SuiteOutcome, ExperimentError>>;

fn suites() -> Vec<(&'static str, Option<f64>, Runner)> {
    vec![
        (
            CLASSIFIER,
            None,
            Box::new(|| classifier(&Classifier { epsilon: 0.1, rel_tolerance: 1e-12 })),
        ),
        (
            RENEWAL_EXACTNESS,
            None,
            Box::new(|| {
                renewal_exactness(&RenewalExactness {
                    n_steps: 1_000_000,
                    seed: 2,
                    dirac_rel_tolerance: 0.005,
                    pareto_rel_tolerance: 0.01,
                })
            }),
        ),
        (
            EXACT_SPEED_D1,
            Some(60.0),
            Box::new(|| {
                exact_speed_d1(&ExactSpeedD1 {
                    half_width: 600.0,
                    horizon: 1000.0,
                    replicas: 20,
                    seed: 1,
                    rel_tolerance: 0.05,
                })
            }),
        ),
        (
            SCALING_LAW,
            Some(600.0),
            Box::new(|| {
                scaling_law(&ScalingLaw {
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
                })
            }),
        ),
        (
            CONSTRUCTION_EQUIVALENCE,
            None,
            Box::new(|| {
                construction_equivalence(&ConstructionEquivalence {
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
                })
            }),
        ),
        (
            TRIANGLE_INEQUALITY,
            None,
            Box::new(|| {
                triangle_inequality(&TriangleInequality {
                    realizations: 100,
                    sources: 10,
                    half_width: 10.0,
                    horizon: 8.0,
                    net_spacing: 0.25,
                    rel_slack: 1e-12,
                    seed: 5,
                })
            }),
        ),
        (
            DOMINATION,
            None,
            Box::new(|| {
                domination(&Domination {
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
                })
            }),
        ),
        (
            SUPERLINEAR_DICHOTOMY,
            None,
            Box::new(|| {
                superlinear_dichotomy(&SuperlinearDichotomy {
                    heavy_beta: 1.5,
                    heavy_scales: vec![1e2, 1e3, 1e4],
                    light_beta: 4.0,
                    light_scales: vec![250.0, 500.0, 1000.0],
                    replicas: 20,
                    initial_horizon: 1.0,
                    min_decade_ratio: 1.5,
                    flatness: 0.1,
                    seed: 8,
                })
            }),
        ),
        (
            GREEDY_ORACLE,
            None,
            Box::new(|| {
                greedy_oracle(&GreedyOracle {
                    instances: 100,
                    half_width: 3.0,
                    k: 8,
                    budget: 32,
                    min_agreement: 0.9,
                    scaling_realizations: 50,
                    scales: vec![0.25, 4.0],
                    scaling_tolerance: 1e-12,
                    seed: 9,
                })
            }),
        ),
        (
            D1_CEILING,
            None,
            Box::new(|| {
                d1_ceiling(&D1Ceiling {
                    replicas: 50,
                    half_width: 200.0,
                    min_length: 100.0,
                    alpha: 1.0,
                    se_multiplier: 3.0,
                    seed: 10,
                })
            }),
        ),
        (
            LINK_INEQUALITY,
            None,
            Box::new(|| {
                link_inequality(&LinkInequality {
                    realizations: 500,
                    alphas: vec![0.1, 0.3],
                    half_width: 8.0,
                    horizon: 12.0,
                    max_norm: 6.0,
                    seed: 11,
                })
            }),
        ),
        (
            ISOTROPY,
            None,
            Box::new(|| {
                isotropy(&Isotropy {
                    replicas: 20,
                    radius: 50.0,
                    directions: 8,
                    half_width: 60.0,
                    initial_horizon: 60.0,
                    max_ratio: 1.1,
                    seed: 12,
                })
            }),
        ),
    ]
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, run) in suites() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| SuiteOutcome::errored(name, &e));
        let secs = start.elapsed().as_secs_f64();
        let in_time = budget.is_none_or(|b| secs <= b);
        let passed = outcome.passed && in_time;
        if !passed {
            failed += 1;
        }
        println!("{} {name} ({secs:.1} s)", if passed { "PASS" } else { "FAIL" });
        for c in &outcome.checks {
            println!("    {c}");
        }
        if let Some(b) = budget {
            println!("    {} runtime: {secs:.1} <= {b}", if in_time { "ok" } else { "FAILED" });
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} suite(s) failed");
        ExitCode::FAILURE
    }
}
