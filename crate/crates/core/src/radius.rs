//! Radius laws of the outbursts, the weight measures derived from them, and
//! the moment conditions that separate linear from superlinear growth.
//!
//! Every family has a closed-form tail `P(R >= x)`, so convergence and
//! divergence of the moment integrals are decided from exact tail exponents.
//! Quadrature only supplies the *value* of an integral already known to be
//! finite, and its truncation error is bounded analytically.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};
use statrs::function::gamma::{gamma, gamma_ur};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadiusError {
    #[error("invalid radius law: {0}")]
    InvalidLaw(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
    #[error("quadrature inconclusive: error estimate {error:e} above tolerance {tolerance:e}")]
    QuadratureInconclusive { error: f64, tolerance: f64 },
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("the law has an infinite mean")]
    InfiniteMean,
}

/// A value of `[0, +inf]`, or the admission that it could not be pinned down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
    Inconclusive,
}

impl ExtendedReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    fn scale(self, c: f64) -> ExtendedReal {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::Finite(v * c),
            other => other,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => f.write_str("inf"),
            ExtendedReal::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::Infinite => s.serialize_str("inf"),
            ExtendedReal::Inconclusive => s.serialize_str("inconclusive"),
        }
    }
}

/// Parametric distribution of the outburst radii.
///
/// Tail conventions: `pareto` has `P(R >= x) = (rmin/x)^beta` for `x >= rmin`;
/// `logpareto` has `P(R >= x) = (rmin/x)^beta (1 + ln(x/rmin))^(-kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum RadiusLaw {
    Dirac { r0: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Pareto { beta: f64, rmin: f64 },
    LogPareto { beta: f64, kappa: f64, rmin: f64 },
}

fn positive(name: &str, v: f64) -> Result<(), RadiusError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(RadiusError::InvalidLaw(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl RadiusLaw {
    pub fn dirac(r0: f64) -> Result<Self, RadiusError> {
        RadiusLaw::Dirac { r0 }.validated()
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self, RadiusError> {
        RadiusLaw::Uniform { a, b }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self, RadiusError> {
        RadiusLaw::Exponential { rate }.validated()
    }

    pub fn pareto(beta: f64, rmin: f64) -> Result<Self, RadiusError> {
        RadiusLaw::Pareto { beta, rmin }.validated()
    }

    pub fn logpareto(beta: f64, kappa: f64, rmin: f64) -> Result<Self, RadiusError> {
        RadiusLaw::LogPareto { beta, kappa, rmin }.validated()
    }

    /// Checks parameter constraints, returning the law unchanged when valid.
    pub fn validated(self) -> Result<Self, RadiusError> {
        match self {
            RadiusLaw::Dirac { r0 } => positive("r0", r0)?,
            RadiusLaw::Uniform { a, b } => {
                positive("a", a)?;
                positive("b", b)?;
                if a >= b {
                    return Err(RadiusError::InvalidLaw(format!("uniform needs a < b, got a={a}, b={b}")));
                }
            }
            RadiusLaw::Exponential { rate } => positive("rate", rate)?,
            RadiusLaw::Pareto { beta, rmin } => {
                positive("beta", beta)?;
                positive("rmin", rmin)?;
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                positive("beta", beta)?;
                positive("kappa", kappa)?;
                positive("rmin", rmin)?;
            }
        }
        Ok(self)
    }

    /// The same family with every radius multiplied by `c`.
    pub fn scaled(&self, c: f64) -> RadiusLaw {
        match *self {
            RadiusLaw::Dirac { r0 } => RadiusLaw::Dirac { r0: r0 * c },
            RadiusLaw::Uniform { a, b } => RadiusLaw::Uniform { a: a * c, b: b * c },
            RadiusLaw::Exponential { rate } => RadiusLaw::Exponential { rate: rate / c },
            RadiusLaw::Pareto { beta, rmin } => RadiusLaw::Pareto { beta, rmin: rmin * c },
            RadiusLaw::LogPareto { beta, kappa, rmin } => RadiusLaw::LogPareto { beta, kappa, rmin: rmin * c },
        }
    }

    /// Essential infimum of the support.
    pub fn essential_inf(&self) -> f64 {
        match *self {
            RadiusLaw::Dirac { r0 } => r0,
            RadiusLaw::Uniform { a, .. } => a,
            RadiusLaw::Exponential { .. } => 0.0,
            RadiusLaw::Pareto { rmin, .. } | RadiusLaw::LogPareto { rmin, .. } => rmin,
        }
    }

    /// Essential supremum of the support (`inf` for unbounded families).
    pub fn essential_sup(&self) -> f64 {
        match *self {
            RadiusLaw::Dirac { r0 } => r0,
            RadiusLaw::Uniform { b, .. } => b,
            _ => f64::INFINITY,
        }
    }

    /// `mu([x, inf))`.
    pub fn tail_mass(&self, x: f64) -> f64 {
        match *self {
            RadiusLaw::Dirac { r0 } => {
                if x <= r0 {
                    1.0
                } else {
                    0.0
                }
            }
            RadiusLaw::Uniform { a, b } => {
                if x <= a {
                    1.0
                } else if x >= b {
                    0.0
                } else {
                    (b - x) / (b - a)
                }
            }
            RadiusLaw::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            RadiusLaw::Pareto { beta, rmin } => {
                if x <= rmin {
                    1.0
                } else {
                    (rmin / x).powf(beta)
                }
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                if x <= rmin {
                    1.0
                } else {
                    let u = (x / rmin).ln();
                    (-beta * u - kappa * u.ln_1p()).exp()
                }
            }
        }
    }

    /// Inverse of the distribution function at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        // y = -ln(1 - u) >= 0
        let y = -(-u).ln_1p();
        match *self {
            RadiusLaw::Dirac { r0 } => r0,
            RadiusLaw::Uniform { a, b } => a + u * (b - a),
            RadiusLaw::Exponential { rate } => y / rate,
            RadiusLaw::Pareto { beta, rmin } => rmin * (y / beta).exp(),
            RadiusLaw::LogPareto { beta, kappa, rmin } => rmin * logpareto_log_quantile(beta, kappa, y).exp(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// Draws from the size-biased law `r mu(dr) / E R`.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, RadiusError> {
        Ok(match *self {
            RadiusLaw::Dirac { r0 } => r0,
            RadiusLaw::Uniform { a, b } => (a * a + rng.random::<f64>() * (b * b - a * a)).sqrt(),
            RadiusLaw::Exponential { rate } => {
                let y1 = -(-rng.random::<f64>()).ln_1p();
                let y2 = -(-rng.random::<f64>()).ln_1p();
                (y1 + y2) / rate
            }
            RadiusLaw::Pareto { beta, rmin } => {
                if beta <= 1.0 {
                    return Err(RadiusError::InfiniteMean);
                }
                RadiusLaw::Pareto { beta: beta - 1.0, rmin }.sample(rng)
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                if beta <= 1.0 {
                    return Err(RadiusError::InfiniteMean);
                }
                // Rejection from Pareto(beta - 1); the acceptance ratio is bounded by 1.
                let proposal = RadiusLaw::Pareto { beta: beta - 1.0, rmin };
                loop {
                    let x = proposal.sample(rng);
                    let l = 1.0 + (x / rmin).ln();
                    let accept = l.powf(-kappa) * (beta + kappa / l) / (beta + kappa);
                    if rng.random::<f64>() < accept {
                        break x;
                    }
                }
            }
        })
    }

    /// `E R^k`, or `Infinite` when it diverges.
    pub fn moment(&self, k: f64) -> ExtendedReal {
        assert!(k > 0.0, "moment order must be positive");
        match *self {
            RadiusLaw::Dirac { r0 } => ExtendedReal::Finite(r0.powf(k)),
            RadiusLaw::Uniform { a, b } => {
                ExtendedReal::Finite((b.powf(k + 1.0) - a.powf(k + 1.0)) / ((k + 1.0) * (b - a)))
            }
            RadiusLaw::Exponential { rate } => ExtendedReal::Finite(gamma(k + 1.0) / rate.powf(k)),
            RadiusLaw::Pareto { beta, rmin } => {
                if k < beta {
                    ExtendedReal::Finite(beta * rmin.powf(k) / (beta - k))
                } else {
                    ExtendedReal::Infinite
                }
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                // E R^k = rmin^k (1 + k int_0^inf e^{(k-beta)u} (1+u)^{-kappa} du)
                if k < beta {
                    ExtendedReal::Finite(rmin.powf(k) * (1.0 + k * exp_power_integral(beta - k, kappa)))
                } else if k == beta && kappa > 1.0 {
                    ExtendedReal::Finite(rmin.powf(k) * (1.0 + k / (kappa - 1.0)))
                } else {
                    ExtendedReal::Infinite
                }
            }
        }
    }

    /// `E R`, as a plain number when finite.
    pub fn mean(&self) -> Option<f64> {
        self.moment(1.0).value()
    }

    /// `G(x) = int_[x, inf) r mu(dr)`, the tail of the size-biased measure.
    pub fn partial_first_moment(&self, x: f64) -> f64 {
        match *self {
            RadiusLaw::Dirac { r0 } => {
                if x <= r0 {
                    r0
                } else {
                    0.0
                }
            }
            RadiusLaw::Uniform { a, b } => {
                if x <= a {
                    0.5 * (a + b)
                } else if x >= b {
                    0.0
                } else {
                    (b * b - x * x) / (2.0 * (b - a))
                }
            }
            RadiusLaw::Exponential { rate } => {
                let x = x.max(0.0);
                (-rate * x).exp() * (x + 1.0 / rate)
            }
            RadiusLaw::Pareto { beta, rmin } => {
                if beta <= 1.0 {
                    f64::INFINITY
                } else if x <= rmin {
                    beta * rmin / (beta - 1.0)
                } else {
                    beta / (beta - 1.0) * rmin.powf(beta) * x.powf(1.0 - beta)
                }
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                if beta <= 1.0 {
                    f64::INFINITY
                } else if x <= rmin {
                    rmin * (1.0 + exp_power_integral(beta - 1.0, kappa))
                } else {
                    let u = (x / rmin).ln();
                    let one_plus_u = 1.0 + u;
                    rmin * ((1.0 - beta) * u - kappa * one_plus_u.ln()).exp()
                        * (1.0 + logpareto_relative_tail(beta, kappa, one_plus_u))
                }
            }
        }
    }

    /// `int_0^inf mu([x, inf))^{1/d} dx`: the integrability condition for the
    /// greedy functional when the weight measure is `mu` itself.
    pub fn tail_root_integral(&self, d: usize) -> Result<ExtendedReal, RadiusError> {
        if d == 0 {
            return Err(RadiusError::InvalidDimension);
        }
        let df = d as f64;
        Ok(match *self {
            RadiusLaw::Dirac { r0 } => ExtendedReal::Finite(r0),
            RadiusLaw::Uniform { a, b } => ExtendedReal::Finite(a + (b - a) * df / (df + 1.0)),
            RadiusLaw::Exponential { rate } => ExtendedReal::Finite(df / rate),
            RadiusLaw::Pareto { beta, rmin } => {
                if beta > df {
                    ExtendedReal::Finite(rmin * (1.0 + df / (beta - df)))
                } else {
                    ExtendedReal::Infinite
                }
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                if beta > df {
                    ExtendedReal::Finite(rmin * (1.0 + exp_power_integral(beta / df - 1.0, kappa / df)))
                } else if beta == df && kappa > df {
                    ExtendedReal::Finite(rmin * (1.0 + 1.0 / (kappa / df - 1.0)))
                } else {
                    ExtendedReal::Infinite
                }
            }
        })
    }

    /// `int_0^inf (int_x^inf r mu(dr))^{1/d} dx`, the sufficient condition for
    /// linear growth in dimension `d`.
    pub fn condition_integral(&self, d: usize) -> Result<ExtendedReal, RadiusError> {
        if d == 0 {
            return Err(RadiusError::InvalidDimension);
        }
        let df = d as f64;
        let p = 1.0 / df;
        match *self {
            RadiusLaw::Dirac { r0 } => Ok(ExtendedReal::Finite(r0.powf(1.0 + p))),
            RadiusLaw::Uniform { a, b } => {
                let m = 0.5 * (a + b);
                if d == 1 {
                    // Fubini: the integral equals E R^2.
                    return Ok(self.moment(2.0));
                }
                let f = |x: f64| ((b * b - x * x).max(0.0) / (2.0 * (b - a))).powf(p);
                let scale = b * m.powf(p);
                let out = quadrature::integrate(f, a, b, 1e-13 * scale);
                let tol = 1e-9 * scale;
                if out.error_estimate > tol {
                    return Err(RadiusError::QuadratureInconclusive { error: out.error_estimate, tolerance: tol });
                }
                Ok(ExtendedReal::Finite(a * m.powf(p) + out.integral))
            }
            RadiusLaw::Exponential { rate } => {
                // Substituting u = x + 1/rate gives an upper incomplete gamma function.
                let s = 1.0 + p;
                let value = p.exp() * (df / rate).powf(s) * gamma(s) * gamma_ur(s, p);
                Ok(ExtendedReal::Finite(value))
            }
            RadiusLaw::Pareto { beta, rmin } => {
                if beta > df + 1.0 {
                    let head = (beta * rmin / (beta - 1.0)).powf(p) * rmin;
                    Ok(ExtendedReal::Finite(head * (1.0 + df / (beta - 1.0 - df))))
                } else {
                    Ok(ExtendedReal::Infinite)
                }
            }
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                let s = (beta - 1.0) / df - 1.0;
                let q = kappa / df;
                let finite = beta > 1.0 && (s > 0.0 || (s == 0.0 && q > 1.0));
                if !finite {
                    return Ok(ExtendedReal::Infinite);
                }
                logpareto_condition_integral(beta, kappa, rmin, d).map(ExtendedReal::Finite)
            }
        }
    }

    /// Whether `int_1^inf r^{d+1} (ln r)^{d+eps} mu(dr)` is finite.
    pub fn log_moment_finite(&self, d: usize, epsilon: f64) -> bool {
        let df = d as f64;
        match *self {
            RadiusLaw::Dirac { .. } | RadiusLaw::Uniform { .. } | RadiusLaw::Exponential { .. } => true,
            RadiusLaw::Pareto { beta, .. } => beta > df + 1.0,
            RadiusLaw::LogPareto { beta, kappa, .. } => {
                beta > df + 1.0 || (beta == df + 1.0 && kappa > df + 1.0 + epsilon)
            }
        }
    }

    /// Classifies the growth regime in dimension `d`.
    pub fn classify_growth(&self, d: usize, epsilon: f64) -> Result<GrowthClassification, RadiusError> {
        if d == 0 {
            return Err(RadiusError::InvalidDimension);
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(RadiusError::InvalidLaw(format!("epsilon must be positive, got {epsilon}")));
        }
        let (condition1_value, inconclusive) = match self.condition_integral(d) {
            Ok(v) => (v, false),
            Err(RadiusError::QuadratureInconclusive { .. }) => (ExtendedReal::Inconclusive, true),
            Err(e) => return Err(e),
        };
        let condition2_value = self.moment(d as f64 + 1.0);
        let verdict = if condition1_value.is_finite() {
            Verdict::Linear
        } else if condition2_value.is_infinite() {
            Verdict::Superlinear
        } else {
            Verdict::Indeterminate
        };
        Ok(GrowthClassification {
            law: *self,
            dim: d,
            verdict,
            condition1_value,
            condition2_value,
            log_moment_finite: self.log_moment_finite(d, epsilon),
            epsilon,
            quadrature_inconclusive: inconclusive,
        })
    }

    /// Radius above which a point of a field with `expected_points` points
    /// occurs with probability below `1e-12`.
    pub fn radius_cap(&self, expected_points: f64) -> f64 {
        let p = 1e-12 / expected_points.max(1.0);
        match *self {
            RadiusLaw::Dirac { r0 } => r0,
            RadiusLaw::Uniform { b, .. } => b,
            _ => self.quantile(1.0 - p),
        }
        .max(self.essential_inf())
    }
}

/// Solves `beta s + kappa ln(1+s) = y` for `s >= 0`. Newton from the left is
/// monotone for this concave increasing function.
fn logpareto_log_quantile(beta: f64, kappa: f64, y: f64) -> f64 {
    let mut s = 0.0f64;
    for _ in 0..200 {
        let f = beta * s + kappa * s.ln_1p() - y;
        let step = f / (beta + kappa / (1.0 + s));
        let next = s - step;
        if (next - s).abs() <= 1e-15 * next.abs().max(1e-300) {
            return next;
        }
        s = next;
    }
    s
}

/// `int_0^inf e^{-s u} (1+u)^{-q} du` for `s > 0`, `q >= 0`.
///
/// With `u = -ln(v)/s` this becomes a bounded integrand on `(0, 1)`.
pub(crate) fn exp_power_integral(s: f64, q: f64) -> f64 {
    debug_assert!(s > 0.0);
    let f = |v: f64| {
        if v <= 0.0 {
            if q > 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            (1.0 - v.ln() / s).powf(-q)
        }
    };
    quadrature::integrate(f, 0.0, 1.0, 1e-15).integral / s
}

/// `int_u^inf e^{(1-beta)v}(1+v)^{-kappa} dv` divided by `e^{(1-beta)u}(1+u)^{-kappa}`.
fn logpareto_relative_tail(beta: f64, kappa: f64, one_plus_u: f64) -> f64 {
    let s = beta - 1.0;
    let f = |w: f64| {
        if w <= 0.0 {
            0.0
        } else {
            (1.0 - w.ln() / (s * one_plus_u)).powf(-kappa)
        }
    };
    quadrature::integrate(f, 0.0, 1.0, 1e-15).integral / s
}

/// Value of the linear-growth integral for a log-Pareto law known to converge.
///
/// The part `x > rmin` is integrated in the variable `w = ln(1 + ln(x/rmin))`,
/// where the integrand decays at least exponentially; the remainder beyond the
/// truncation point is bounded with `G(x) <= beta/(beta-1) x mu([x, inf))`.
fn logpareto_condition_integral(beta: f64, kappa: f64, rmin: f64, d: usize) -> Result<f64, RadiusError> {
    let df = d as f64;
    let p = 1.0 / df;
    let s = (beta - 1.0) / df - 1.0;
    let q = kappa / df;
    let mean = rmin * (1.0 + exp_power_integral(beta - 1.0, kappa));
    let head = rmin * mean.powf(p);
    let k = rmin * (beta * rmin / (beta - 1.0)).powf(p);
    let tail_bound = |w: f64| {
        let one_plus_u = w.exp();
        let u = one_plus_u - 1.0;
        if s > 0.0 {
            k * one_plus_u.powf(-q) * (-s * u).exp() / s
        } else {
            k * one_plus_u.powf(1.0 - q) / (q - 1.0)
        }
    };
    let tol = 1e-10 * head;
    let mut w_max = 1.0;
    while tail_bound(w_max) > tol {
        w_max *= 1.5;
        if w_max > 5000.0 {
            return Err(RadiusError::QuadratureInconclusive { error: tail_bound(w_max), tolerance: tol });
        }
    }
    let log_rmin = rmin.ln();
    let integrand = |w: f64| {
        let one_plus_u = w.exp();
        let u = one_plus_u - 1.0;
        let decay = if s == 0.0 { 0.0 } else { -s * u };
        let rel = logpareto_relative_tail(beta, kappa, one_plus_u);
        let log_val = log_rmin * (1.0 + p) + decay - q * w + p * rel.ln_1p();
        log_val.exp() * one_plus_u
    };
    let out = quadrature::integrate(integrand, 0.0, w_max, 1e-3 * tol);
    if out.error_estimate > tol * 1e3 {
        return Err(RadiusError::QuadratureInconclusive { error: out.error_estimate, tolerance: tol * 1e3 });
    }
    Ok(head + out.integral)
}

impl fmt::Display for RadiusLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusLaw::Dirac { r0 } => write!(f, "dirac:r0={r0}"),
            RadiusLaw::Uniform { a, b } => write!(f, "uniform:a={a},b={b}"),
            RadiusLaw::Exponential { rate } => write!(f, "exponential:rate={rate}"),
            RadiusLaw::Pareto { beta, rmin } => write!(f, "pareto:beta={beta},rmin={rmin}"),
            RadiusLaw::LogPareto { beta, kappa, rmin } => {
                write!(f, "logpareto:beta={beta},kappa={kappa},rmin={rmin}")
            }
        }
    }
}

/// Parses `key=value,...` into values for exactly the given keys.
fn parse_params(input: &str, body: &str, keys: &[&str]) -> Result<Vec<f64>, RadiusError> {
    let err = |reason: String| RadiusError::Parse { input: input.to_string(), reason };
    let mut values: Vec<Option<f64>> = vec![None; keys.len()];
    if !body.trim().is_empty() {
        for pair in body.split(',') {
            let (k, v) = pair.split_once('=').ok_or_else(|| err(format!("expected key=value, got `{pair}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let slot = keys.iter().position(|&x| x == k).ok_or_else(|| err(format!("unknown parameter `{k}`")))?;
            if values[slot].is_some() {
                return Err(err(format!("parameter `{k}` given twice")));
            }
            let parsed: f64 = v.parse().map_err(|_| err(format!("`{v}` is not a number")))?;
            values[slot] = Some(parsed);
        }
    }
    values
        .into_iter()
        .zip(keys)
        .map(|(v, k)| v.ok_or_else(|| err(format!("missing parameter `{k}`"))))
        .collect()
}

impl FromStr for RadiusLaw {
    type Err = RadiusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, body) = s.split_once(':').unwrap_or((s, ""));
        let law = match family.trim() {
            "dirac" => {
                let v = parse_params(s, body, &["r0"])?;
                RadiusLaw::Dirac { r0: v[0] }
            }
            "uniform" => {
                let v = parse_params(s, body, &["a", "b"])?;
                RadiusLaw::Uniform { a: v[0], b: v[1] }
            }
            "exponential" => {
                let v = parse_params(s, body, &["rate"])?;
                RadiusLaw::Exponential { rate: v[0] }
            }
            "pareto" => {
                let v = parse_params(s, body, &["beta", "rmin"])?;
                RadiusLaw::Pareto { beta: v[0], rmin: v[1] }
            }
            "logpareto" => {
                let v = parse_params(s, body, &["beta", "kappa", "rmin"])?;
                RadiusLaw::LogPareto { beta: v[0], kappa: v[1], rmin: v[2] }
            }
            other => {
                return Err(RadiusError::Parse { input: s.to_string(), reason: format!("unknown family `{other}`") })
            }
        };
        law.validated()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Linear,
    Superlinear,
    Indeterminate,
}

/// Outcome of [`RadiusLaw::classify_growth`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthClassification {
    pub law: RadiusLaw,
    pub dim: usize,
    pub verdict: Verdict,
    /// `int_0^inf (int_x^inf r mu(dr))^{1/d} dx`
    pub condition1_value: ExtendedReal,
    /// `int r^{d+1} mu(dr)`
    pub condition2_value: ExtendedReal,
    pub log_moment_finite: bool,
    pub epsilon: f64,
    pub quadrature_inconclusive: bool,
}

/// How a weight measure is derived from the radius law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transform {
    /// The probability law itself.
    Identity,
    /// `r mu(dr)`.
    SizeBiased,
    /// Fast balls: `alpha r mu(dr)`.
    FastBall { alpha: f64 },
    /// `mass` times the unit point mass at radius 1.
    UnitDirac { mass: f64 },
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => f.write_str("identity"),
            Transform::SizeBiased => f.write_str("size-biased"),
            Transform::FastBall { alpha } => write!(f, "fast:alpha={alpha}"),
            Transform::UnitDirac { mass } => write!(f, "unit:mass={mass}"),
        }
    }
}

impl FromStr for Transform {
    type Err = RadiusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(RadiusError::Parse { input: s.to_string(), reason: format!("{name} must be >= 0") })
            }
        };
        match kind.trim() {
            "identity" => Ok(Transform::Identity),
            "size-biased" => Ok(Transform::SizeBiased),
            "fast" => Ok(Transform::FastBall { alpha: nonneg("alpha", parse_params(s, body, &["alpha"])?[0])? }),
            "unit" => Ok(Transform::UnitDirac { mass: nonneg("mass", parse_params(s, body, &["mass"])?[0])? }),
            other => Err(RadiusError::Parse { input: s.to_string(), reason: format!("unknown measure `{other}`") }),
        }
    }
}

/// Integrability of the greedy supremum for a weight measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GreedyVerdict {
    /// `E S < inf` (d >= 2 and the tail-root integral converges).
    FiniteMean,
    /// d = 1 with positive mass: the first point alone has infinite mean ratio.
    InfiniteMean,
    /// `int r^d nu(dr) = inf`: `S = inf` almost surely.
    AlmostSurelyInfinite,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreedyClassification {
    pub verdict: GreedyVerdict,
    /// `int_0^inf nu([r, inf))^{1/d} dr`
    pub tail_root_integral: ExtendedReal,
    /// `int r^d nu(dr)`
    pub weight_moment: ExtendedReal,
}

/// A finite measure on `(0, inf)` used as the weight intensity of a point field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightMeasure {
    pub base: RadiusLaw,
    pub transform: Transform,
}

impl WeightMeasure {
    pub fn new(base: RadiusLaw, transform: Transform) -> Self {
        WeightMeasure { base, transform }
    }

    /// Unit point mass with the given total mass; the base law is irrelevant.
    pub fn unit(mass: f64) -> Self {
        WeightMeasure { base: RadiusLaw::Dirac { r0: 1.0 }, transform: Transform::UnitDirac { mass } }
    }

    pub fn fast_ball(base: RadiusLaw, alpha: f64) -> Self {
        WeightMeasure { base, transform: Transform::FastBall { alpha } }
    }

    pub fn total_mass(&self) -> ExtendedReal {
        match self.transform {
            Transform::Identity => ExtendedReal::Finite(1.0),
            Transform::SizeBiased => self.base.moment(1.0),
            Transform::FastBall { alpha } => self.base.moment(1.0).scale(alpha),
            Transform::UnitDirac { mass } => ExtendedReal::Finite(mass),
        }
    }

    /// `nu([x, inf))`.
    pub fn tail(&self, x: f64) -> f64 {
        match self.transform {
            Transform::Identity => self.base.tail_mass(x),
            Transform::SizeBiased => self.base.partial_first_moment(x),
            Transform::FastBall { alpha } => alpha * self.base.partial_first_moment(x),
            Transform::UnitDirac { mass } => {
                if x <= 1.0 {
                    mass
                } else {
                    0.0
                }
            }
        }
    }

    /// Draws a weight from the normalized measure `nu / nu((0, inf))`.
    pub fn sample_weight<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64, RadiusError> {
        match self.transform {
            Transform::Identity => Ok(self.base.sample(rng)),
            Transform::SizeBiased | Transform::FastBall { .. } => self.base.sample_size_biased(rng),
            Transform::UnitDirac { .. } => Ok(1.0),
        }
    }

    /// Moment conditions for the integrability of the greedy supremum.
    pub fn greedy_classification(&self, d: usize) -> Result<GreedyClassification, RadiusError> {
        if d == 0 {
            return Err(RadiusError::InvalidDimension);
        }
        let df = d as f64;
        let (tail_root_integral, weight_moment) = match self.transform {
            Transform::Identity => (self.base.tail_root_integral(d)?, self.base.moment(df)),
            Transform::SizeBiased => (self.base.condition_integral(d)?, self.base.moment(df + 1.0)),
            Transform::FastBall { alpha } => (
                self.base.condition_integral(d)?.scale(alpha.powf(1.0 / df)),
                self.base.moment(df + 1.0).scale(alpha),
            ),
            Transform::UnitDirac { mass } => (ExtendedReal::Finite(mass.powf(1.0 / df)), ExtendedReal::Finite(mass)),
        };
        let positive_mass = self.total_mass().value().is_none_or(|m| m > 0.0);
        let verdict = if weight_moment.is_infinite() {
            GreedyVerdict::AlmostSurelyInfinite
        } else if d == 1 && positive_mass {
            GreedyVerdict::InfiniteMean
        } else if tail_root_integral.is_finite() {
            GreedyVerdict::FiniteMean
        } else {
            GreedyVerdict::Indeterminate
        };
        Ok(GreedyClassification { verdict, tail_root_integral, weight_moment })
    }
}
