//! Double-exponential quadrature.
//!
//! Two families are provided. [`ln_integrate_unimodal`] integrates
//! `exp(phi(u))` over the real line for a log-concave-like exponent with a
//! single mode, returning the logarithm of the integral. [`tanh_sinh`] and
//! [`exp_sinh`] are general-purpose integrators on finite and half-infinite
//! intervals.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Stopping rule shared by the integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_level: 14 }
    }
}

/// Result of a linear-scale integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub levels: u32,
    pub evaluations: usize,
}

/// Exponent of an integrand `exp(phi(u))` on the real line with a unique
/// maximum: `phi'` is positive to the left of the mode and negative to the
/// right.
pub trait LogIntegrand {
    fn phi(&self, u: f64) -> f64;
    fn dphi(&self, u: f64) -> f64;
    fn d2phi(&self, u: f64) -> f64;
}

/// Logarithm of an integral together with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnQuadResult {
    pub ln_value: f64,
    pub rel_change: f64,
    pub levels: u32,
    pub evaluations: usize,
}

const V_MAX: f64 = 9.0;

fn locate_mode<F: LogIntegrand + ?Sized>(f: &F) -> Result<f64> {
    let mut lo = -1.0;
    while f.dphi(lo) <= 0.0 {
        lo *= 2.0;
        if lo < -1e5 {
            return Err(Error::Quadrature("mode bracket failed on the left".into()));
        }
    }
    let mut hi = 1.0;
    while f.dphi(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e5 {
            return Err(Error::Quadrature("mode bracket failed on the right".into()));
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = f.dphi(u);
        if g > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let h = f.d2phi(u);
        let newton = if h < 0.0 { u - g / h } else { f64::NAN };
        u = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo) <= 1e-14 * (1.0 + u.abs()) || g == 0.0 {
            break;
        }
    }
    Ok(u)
}

/// ln of the integral of `exp(phi(u))` over the real line.
///
/// The substitution `u = u* + s sinh(v)` centres the nodes on the mode `u*`
/// with `s = 1/sqrt(-phi''(u*))`, then the trapezoid rule in `v` is refined
/// by halving the step until two levels agree to `rel_tol`.
pub fn ln_integrate_unimodal<F: LogIntegrand + ?Sized>(f: &F, opts: QuadOptions) -> Result<LnQuadResult> {
    let mode = locate_mode(f)?;
    let peak = f.phi(mode);
    let curv = f.d2phi(mode);
    let scale = if curv < 0.0 { (1.0 / (-curv).sqrt()).clamp(1e-6, 50.0) } else { 1.0 };
    let weight = |v: f64| -> f64 {
        let w = scale * v.cosh() * (f.phi(mode + scale * v.sinh()) - peak).exp();
        if w.is_finite() {
            w
        } else {
            0.0
        }
    };

    let mut evals = 0usize;
    let mut h = 0.5;
    let kmax = (V_MAX / h) as i64;
    let mut sum = weight(0.0);
    evals += 1;
    for dir in [-1.0, 1.0] {
        for k in 1..=kmax {
            let w = weight(dir * k as f64 * h);
            evals += 1;
            sum += w;
            if w < 1e-18 * sum && k > 2 {
                break;
            }
        }
    }
    let mut estimate = h * sum;
    let mut rel_change = f64::INFINITY;
    let mut level = 0;
    while level < opts.max_level {
        level += 1;
        h *= 0.5;
        let kmax = (V_MAX / h) as i64;
        let mut added = 0.0;
        for dir in [-1.0, 1.0] {
            let mut k = 1;
            while k <= kmax {
                let w = weight(dir * k as f64 * h);
                evals += 1;
                added += w;
                if w < 1e-18 * sum && k as f64 * h > 1.0 {
                    break;
                }
                k += 2;
            }
        }
        sum += added;
        let next = h * sum;
        rel_change = ((next - estimate) / next).abs();
        estimate = next;
        if level >= 2 && rel_change <= opts.rel_tol {
            break;
        }
    }
    if !(estimate > 0.0) {
        return Err(Error::Quadrature("non-positive integral estimate".into()));
    }
    Ok(LnQuadResult { ln_value: peak + estimate.ln(), rel_change, levels: level, evaluations: evals })
}

fn refine<G: Fn(f64) -> f64>(g: G, t_max: f64, opts: QuadOptions) -> QuadResult {
    let mut h = 0.5;
    let mut evals = 1usize;
    let mut sum = g(0.0);
    let n0 = (t_max / h) as i64;
    for k in 1..=n0 {
        let t = k as f64 * h;
        sum += g(t) + g(-t);
        evals += 2;
    }
    let mut est = h * sum;
    let mut err = f64::INFINITY;
    let mut level = 0;
    while level < opts.max_level {
        level += 1;
        h *= 0.5;
        let n = (t_max / h) as i64;
        let mut k = 1;
        while k <= n {
            let t = k as f64 * h;
            sum += g(t) + g(-t);
            evals += 2;
            k += 2;
        }
        let next = h * sum;
        err = (next - est).abs();
        est = next;
        if level >= 3 && err <= opts.rel_tol * est.abs() {
            break;
        }
    }
    QuadResult { value: est, error_estimate: err, levels: level, evaluations: evals }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Tanh-sinh integration of `f` over `[a, b]`.
///
/// Nodes near either endpoint are formed from the distance to that endpoint,
/// so integrable endpoint singularities at `a = 0` are resolved.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    let half = 0.5 * (b - a);
    let g = |t: f64| -> f64 {
        let q = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * q.abs()).exp();
        let gap = 2.0 * half * e / (1.0 + e);
        let x = if t < 0.0 { a + gap } else { b - gap };
        if gap <= 0.0 || x <= a || x >= b {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        finite_or_zero(half * w * f(x))
    };
    refine(g, 4.0, opts)
}

/// Exp-sinh integration of `f` over `[a, +inf)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, opts: QuadOptions) -> QuadResult {
    let g = |t: f64| -> f64 {
        let q = FRAC_PI_2 * t.sinh();
        if q > 700.0 {
            return 0.0;
        }
        let r = q.exp();
        let x = a + r;
        if r == 0.0 || x == a {
            return 0.0;
        }
        finite_or_zero(FRAC_PI_2 * t.cosh() * r * f(x))
    };
    refine(g, 5.0, opts)
}
