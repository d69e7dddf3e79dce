//! Closed forms of the radius module against direct quadrature of the tail function.

use percolab::radius::{ExtendedReal, RadiusLaw};

/// `P(R >= x)` written out independently of the library.
fn tail(law: &RadiusLaw, x: f64) -> f64 {
    match *law {
        RadiusLaw::Dirac { r0 } => f64::from(u8::from(x <= r0)),
        RadiusLaw::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
        RadiusLaw::Exponential { rate } => (-rate * x.max(0.0)).exp(),
        RadiusLaw::Pareto { beta, rmin } => (rmin / x.max(rmin)).powf(beta),
        RadiusLaw::LogPareto { beta, kappa, rmin } => {
            let x = x.max(rmin);
            (rmin / x).powf(beta) * (1.0 + (x / rmin).ln()).powf(-kappa)
        }
    }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::integrate(f, a, b, 1e-12).integral
}

/// `int_from^end f` for a bounded support, otherwise `int_from^inf f` through
/// `x = start e^u`, `u = t / (1 - t)`.
fn integrate_to_end(f: impl Fn(f64) -> f64, from: f64, end: f64) -> f64 {
    if end.is_finite() {
        return if from < end { integrate(&f, from, end) } else { 0.0 };
    }
    let (head, start) = if from > 0.0 { (0.0, from) } else { (integrate(|v| f(v * v) * 2.0 * v, from, 1.0), 1.0) };
    let g = |t: f64| {
        let u = t / (1.0 - t);
        if u > 700.0 {
            return 0.0;
        }
        let x = start * u.exp();
        f(x) * x / ((1.0 - t) * (1.0 - t))
    };
    head + integrate(g, 0.0, 1.0)
}

fn support_start(law: &RadiusLaw) -> f64 {
    match *law {
        RadiusLaw::Dirac { r0 } => r0,
        RadiusLaw::Uniform { a, .. } => a,
        RadiusLaw::Exponential { .. } => 0.0,
        RadiusLaw::Pareto { rmin, .. } | RadiusLaw::LogPareto { rmin, .. } => rmin,
    }
}

fn support_end(law: &RadiusLaw) -> f64 {
    match *law {
        RadiusLaw::Dirac { r0 } => r0,
        RadiusLaw::Uniform { b, .. } => b,
        _ => f64::INFINITY,
    }
}

fn moment(law: &RadiusLaw, k: f64) -> f64 {
    let s0 = support_start(law);
    s0.powf(k) + integrate_to_end(|x| k * x.powf(k - 1.0) * tail(law, x), s0, support_end(law))
}

fn partial_first_moment(law: &RadiusLaw, x: f64) -> f64 {
    let x = x.max(support_start(law));
    if x == 0.0 {
        return moment(law, 1.0);
    }
    x * tail(law, x) + integrate_to_end(|y| tail(law, y), x, support_end(law))
}

fn condition_integral(law: &RadiusLaw, d: usize) -> f64 {
    let p = 1.0 / d as f64;
    let s0 = support_start(law);
    s0 * moment(law, 1.0).powf(p) + integrate_to_end(|x| partial_first_moment(law, x).powf(p), s0, support_end(law))
}

fn tail_root_integral(law: &RadiusLaw, d: usize) -> f64 {
    let p = 1.0 / d as f64;
    let s0 = support_start(law);
    s0 + integrate_to_end(|x| tail(law, x).powf(p), s0, support_end(law))
}

fn finite(v: ExtendedReal) -> f64 {
    v.value().expect("expected a finite value")
}

fn assert_close(what: &str, got: f64, want: f64, rel: f64) {
    assert!((got / want - 1.0).abs() <= rel, "{what}: closed form {got} vs quadrature {want}");
}

fn laws() -> Vec<RadiusLaw> {
    vec![
        RadiusLaw::uniform(0.5, 2.0).unwrap(),
        RadiusLaw::exponential(1.5).unwrap(),
        RadiusLaw::pareto(4.0, 1.0).unwrap(),
        RadiusLaw::pareto(5.5, 0.5).unwrap(),
        RadiusLaw::logpareto(4.0, 2.0, 1.0).unwrap(),
        RadiusLaw::logpareto(5.0, 0.5, 2.0).unwrap(),
    ]
}

#[test]
fn moments_match_quadrature() {
    for law in laws() {
        for k in [0.5, 1.0, 2.0, 3.0] {
            assert_close(&format!("E R^{k} for {law}"), finite(law.moment(k)), moment(&law, k), 1e-7);
        }
    }
}

#[test]
fn critical_logpareto_moment_matches_quadrature() {
    let law = RadiusLaw::logpareto(2.0, 6.0, 1.0).unwrap();
    assert_close("E R^2 at beta", finite(law.moment(2.0)), moment(&law, 2.0), 1e-7);
}

#[test]
fn partial_first_moment_matches_quadrature() {
    for law in laws() {
        for x in [0.1, 0.75, 1.0, 1.7, 3.0, 10.0] {
            let want = partial_first_moment(&law, x);
            if want < 1e-200 {
                assert!(law.partial_first_moment(x) < 1e-200);
                continue;
            }
            assert_close(&format!("G({x}) for {law}"), law.partial_first_moment(x), want, 1e-7);
        }
    }
}

#[test]
fn condition_integral_matches_quadrature() {
    for law in laws() {
        for d in 1..=3 {
            let df = d as f64;
            let divergent = match law {
                RadiusLaw::Pareto { beta, .. } => beta <= df + 1.0,
                RadiusLaw::LogPareto { beta, kappa, .. } => {
                    let s = (beta - 1.0) / df - 1.0;
                    s < 0.0 || (s == 0.0 && kappa <= df)
                }
                _ => false,
            };
            let value = law.condition_integral(d).unwrap();
            if divergent {
                assert!(value.is_infinite(), "condition integral d={d} for {law} should diverge");
                continue;
            }
            let got = finite(value);
            assert_close(&format!("condition integral d={d} for {law}"), got, condition_integral(&law, d), 1e-6);
        }
    }
}

#[test]
fn tail_root_integral_matches_quadrature() {
    for law in laws() {
        for d in 1..=3 {
            let got = finite(law.tail_root_integral(d).unwrap());
            assert_close(&format!("tail-root integral d={d} for {law}"), got, tail_root_integral(&law, d), 1e-6);
        }
    }
}

#[test]
fn divergent_cases_are_infinite() {
    let pareto = RadiusLaw::pareto(3.0, 1.0).unwrap();
    assert!(pareto.moment(3.0).is_infinite());
    assert!(pareto.condition_integral(2).unwrap().is_infinite());
    assert!(pareto.tail_root_integral(3).unwrap().is_infinite());
    let logpareto = RadiusLaw::logpareto(2.0, 1.0, 1.0).unwrap();
    assert!(logpareto.moment(2.0).is_infinite());
}
