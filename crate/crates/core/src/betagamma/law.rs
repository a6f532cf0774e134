use super::density::density_t;
use super::expr::{sample, Atom, DistributionExpr, Factor};
use crate::error::{Error, Result};
use crate::quad::{tanh_sinh, QuadOptions};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawMethod {
    MellinGrid,
    Ks,
}

/// Asymptotic Kolmogorov-Smirnov critical value at level 0.01.
pub const KS_CRITICAL_001: f64 = 1.628;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawParams {
    pub s_grid: Vec<f64>,
    pub rel_tol: f64,
    pub samples: usize,
    pub ks_critical: f64,
    pub seed: u64,
}

impl Default for LawParams {
    fn default() -> Self {
        Self {
            s_grid: (1..=12).map(|k| 0.25 * k as f64).collect(),
            rel_tol: 1e-10,
            samples: 100_000,
            ks_critical: KS_CRITICAL_001,
            seed: 0,
        }
    }
}

/// One comparison point: an s value for the Mellin grid, a sample point for KS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawDiagnostic {
    pub at: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawTestReport {
    pub method: LawMethod,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub details: Vec<LawDiagnostic>,
}

impl LawTestReport {
    fn new(method: LawMethod, statistic: f64, threshold: f64, details: Vec<LawDiagnostic>) -> Self {
        Self { method, statistic, threshold, pass: statistic <= threshold, details }
    }
}

pub fn verify_law(lhs: &DistributionExpr, rhs: &DistributionExpr, method: LawMethod, params: &LawParams) -> Result<LawTestReport> {
    lhs.validate()?;
    rhs.validate()?;
    match method {
        LawMethod::MellinGrid => mellin_grid(lhs, rhs, &params.s_grid, params.rel_tol),
        LawMethod::Ks => ks_two_sample(lhs, rhs, params),
    }
}

/// max_s |M_lhs(s) - M_rhs(s)| / |M_rhs(s)| over the grid.
pub fn mellin_grid(lhs: &DistributionExpr, rhs: &DistributionExpr, s_grid: &[f64], rel_tol: f64) -> Result<LawTestReport> {
    let mut details = Vec::with_capacity(s_grid.len());
    let mut worst = 0.0f64;
    for &s in s_grid {
        let (l, r) = (lhs.mellin(s)?, rhs.mellin(s)?);
        worst = worst.max((l - r).abs() / r.abs());
        details.push(LawDiagnostic { at: s, lhs: l, rhs: r });
    }
    Ok(LawTestReport::new(LawMethod::MellinGrid, worst, rel_tol, details))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample statistic sup |F_n - G_m| and where it is attained.
fn ks_distance(x: &[f64], y: &[f64]) -> (f64, LawDiagnostic) {
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = (0.0, LawDiagnostic { at: f64::NAN, lhs: 0.0, rhs: 0.0 });
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        let (fx, fy) = (i as f64 / n, j as f64 / m);
        if (fx - fy).abs() > best.0 {
            best = ((fx - fy).abs(), LawDiagnostic { at: t, lhs: fx, rhs: fy });
        }
    }
    best
}

fn ks_two_sample(lhs: &DistributionExpr, rhs: &DistributionExpr, params: &LawParams) -> Result<LawTestReport> {
    let x = sorted(sample(lhs, params.samples, params.seed)?);
    let y = sorted(sample(rhs, params.samples, params.seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?);
    let (d, at) = ks_distance(&x, &y);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let threshold = params.ks_critical * ((n + m) / (n * m)).sqrt();
    Ok(LawTestReport::new(LawMethod::Ks, d, threshold, vec![at]))
}

/// One-sample KS of draws of `e` against the CDF of T(a, b, c) obtained by
/// integrating `density_t`, checked at `checkpoints` sample quantiles.
pub fn ks_against_density_t(e: &DistributionExpr, a: f64, b: f64, c: f64, checkpoints: usize, params: &LawParams) -> Result<LawTestReport> {
    if checkpoints < 2 {
        return Err(Error::Domain("need at least two checkpoints".into()));
    }
    let xs = sorted(sample(e, params.samples, params.seed)?);
    let n = xs.len();
    let opts = QuadOptions::default();
    let density = |x: f64| if x > 0.0 { density_t(a, b, c, x).unwrap_or(f64::NAN) } else { 0.0 };
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut worst = 0.0f64;
    let mut details = Vec::with_capacity(checkpoints);
    for k in 0..checkpoints {
        let idx = ((k as f64 + 0.5) / checkpoints as f64 * n as f64) as usize;
        let x = xs[idx.min(n - 1)];
        cdf += tanh_sinh(density, prev, x, opts).value;
        prev = x;
        if !cdf.is_finite() {
            return Err(Error::Quadrature(format!("CDF of T({a}, {b}, {c}) at {x}")));
        }
        let upper = xs.partition_point(|&v| v <= x) as f64 / n as f64;
        let lower = xs.partition_point(|&v| v < x) as f64 / n as f64;
        worst = worst.max((upper - cdf).abs()).max((lower - cdf).abs());
        details.push(LawDiagnostic { at: x, lhs: upper, rhs: cdf });
    }
    let threshold = params.ks_critical / (n as f64).sqrt();
    Ok(LawTestReport::new(LawMethod::Ks, worst, threshold, details))
}

/// A named equality in law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawIdentity {
    pub name: String,
    pub lhs: DistributionExpr,
    pub rhs: DistributionExpr,
}

fn u_pow(theta: f64) -> Factor {
    Factor::new(Atom::UniformPower { theta })
}

fn t_factors(a: f64, b: f64, c: f64) -> Vec<Factor> {
    vec![Factor::new(Atom::Beta { a, b }), Factor::new(Atom::Gamma { c })]
}

fn identity(name: String, lhs: Vec<Factor>, rhs: Vec<Factor>) -> Result<LawIdentity> {
    Ok(LawIdentity { name, lhs: DistributionExpr::new(lhs)?, rhs: DistributionExpr::new(rhs)? })
}

/// Beta(a, n+1) = U^{1/a} * ... * U^{1/(a+n)}.
pub fn beta_uniform_identity(a: f64, n: usize) -> Result<LawIdentity> {
    let rhs = (0..=n).map(|k| u_pow(a + k as f64)).collect();
    identity(format!("beta_uniform(a={a},n={n})"), vec![Factor::new(Atom::Beta { a, b: (n + 1) as f64 })], rhs)
}

/// Beta(a, b+1) = Beta(a, b) * U^{1/(a+b)}.
pub fn beta_shift_identity(a: f64, b: f64) -> Result<LawIdentity> {
    identity(
        format!("beta_shift(a={a},b={b})"),
        vec![Factor::new(Atom::Beta { a, b: b + 1.0 })],
        vec![Factor::new(Atom::Beta { a, b }), u_pow(a + b)],
    )
}

/// T(a, b, c) = U^{1/c} * T(a, b, c+1).
pub fn t_shift_identity(a: f64, b: f64, c: f64) -> Result<LawIdentity> {
    let mut rhs = vec![u_pow(c)];
    rhs.extend(t_factors(a, b, c + 1.0));
    identity(format!("t_shift(a={a},b={b},c={c})"), t_factors(a, b, c), rhs)
}

/// T(a, b, a+b-n) = Gamma(a) * U^{1/(a+b-n)} * ... * U^{1/(a+b-1)}, 0 <= n < a+b.
pub fn t_gamma_identity(a: f64, b: f64, n: usize) -> Result<LawIdentity> {
    let c = a + b - n as f64;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("need n < a+b, got a = {a}, b = {b}, n = {n}")));
    }
    let mut rhs = vec![Factor::new(Atom::Gamma { c: a })];
    rhs.extend((0..n).map(|k| u_pow(c + k as f64)));
    identity(format!("t_gamma(a={a},b={b},n={n})"), t_factors(a, b, c), rhs)
}

/// T(a, n, c) = U^{1/a} * ... * U^{1/(a+n-1)} * Gamma(c), n >= 1.
pub fn t_integer_b_identity(a: f64, n: usize, c: f64) -> Result<LawIdentity> {
    let mut rhs: Vec<Factor> = (0..n).map(|k| u_pow(a + k as f64)).collect();
    rhs.push(Factor::new(Atom::Gamma { c }));
    identity(format!("t_integer_b(a={a},n={n},c={c})"), t_factors(a, n as f64, c), rhs)
}

/// T(a, b, c) = T(c, d, a) with d = a+b-c > 0.
pub fn t_symmetry_identity(a: f64, b: f64, c: f64) -> Result<LawIdentity> {
    let d = a + b - c;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("T symmetry needs d = a+b-c > 0, got {d}")));
    }
    identity(format!("t_symmetry(a={a},b={b},c={c})"), t_factors(a, b, c), t_factors(c, d, a))
}

/// T(a, b, c) = U_rho^{1/c} * U^{1/(c+1)} * T(a, b+1, c+2), rho = c/(a+b) < 1.
pub fn t_factorization_identity(a: f64, b: f64, c: f64) -> Result<LawIdentity> {
    if !(c < a + b) {
        return Err(Error::Domain(format!("factorization needs c < a+b, got a = {a}, b = {b}, c = {c}")));
    }
    let mut rhs = vec![Factor::pow(Atom::BernoulliMixUniform { rho: c / (a + b) }, 1.0 / c), u_pow(c + 1.0)];
    rhs.extend(t_factors(a, b + 1.0, c + 2.0));
    identity(format!("t_factorization(a={a},b={b},c={c})"), t_factors(a, b, c), rhs)
}

/// The catalogue of equalities in law checked by default.
pub fn standard_identities() -> Result<Vec<LawIdentity>> {
    Ok(vec![
        beta_uniform_identity(0.7, 2)?,
        beta_shift_identity(0.6, 1.7)?,
        t_shift_identity(0.5, 0.5, 1.2)?,
        t_gamma_identity(1.3, 0.8, 0)?,
        t_gamma_identity(1.3, 0.8, 2)?,
        t_integer_b_identity(0.9, 3, 1.4)?,
        t_symmetry_identity(1.1, 0.9, 0.6)?,
        t_factorization_identity(1.1, 0.9, 0.6)?,
    ])
}
