//! The Tricomi function in the weighted parameterization
//!
//! f_{mu,nu}(z) = Psi(mu, mu+1-nu, z)
//!             = 1/Gamma(mu) * int_0^inf exp(-t z) t^(mu-1) (1+t)^(-nu) dt.

use super::gamma::{gamma_ratio, log_gamma, pochhammer};
use crate::error::{Error, Result};
use crate::quad::{ln_integrate_unimodal, LogIntegrand, QuadOptions};
use serde::{Deserialize, Serialize};

/// Parameters of `f_{mu,nu}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiArgs {
    pub mu: f64,
    pub nu: f64,
}

impl PsiArgs {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() || !nu.is_finite() {
            return Err(Error::Domain(format!("PsiArgs requires mu > 0, got mu = {mu}, nu = {nu}")));
        }
        Ok(Self { mu, nu })
    }

    /// Parameters for the standard form Psi(a, c, z).
    pub fn from_standard(a: f64, c: f64) -> Result<Self> {
        Self::new(a, a + 1.0 - c)
    }

    /// The second standard parameter c = mu + 1 - nu.
    pub fn c(&self) -> f64 {
        self.mu + 1.0 - self.nu
    }
}

/// Leading small-z behaviour `coefficient * z^power * (-ln z)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticForm {
    pub coefficient: f64,
    pub power: f64,
    pub log_power: u8,
}

impl AsymptoticForm {
    pub fn eval(&self, z: f64) -> f64 {
        let mut v = self.coefficient * z.powf(self.power);
        if self.log_power == 1 {
            v *= -z.ln();
        }
        v
    }
}

/// Whether `(args, z)` lies inside the box where the accuracy contract holds.
pub fn in_precision_box(args: PsiArgs, z: f64) -> bool {
    args.mu <= 20.0 && args.nu.abs() <= 40.0 && (1e-8..=1e8).contains(&z)
}

struct Exponent {
    mu: f64,
    nu: f64,
    z: f64,
}

fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

// t = e^u turns the integrand into exp(mu u - z e^u - nu ln(1+e^u)).
impl LogIntegrand for Exponent {
    fn phi(&self, u: f64) -> f64 {
        self.mu * u - self.z * u.exp() - self.nu * softplus(u)
    }
    fn dphi(&self, u: f64) -> f64 {
        self.mu - self.z * u.exp() - self.nu * logistic(u)
    }
    fn d2phi(&self, u: f64) -> f64 {
        let s = logistic(u);
        -self.z * u.exp() - self.nu * s * (1.0 - s)
    }
}

fn large_z_threshold(args: PsiArgs) -> f64 {
    1e4 * 1f64.max(args.mu).max(args.nu.abs())
}

/// Asymptotic series z^mu f = sum_k (mu)_k (nu)_k / k! (-1/z)^k, truncated
/// before the first increasing term.
fn ln_large_z(args: PsiArgs, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..200 {
        let kf = k as f64;
        let next = term * (args.mu + kf) * (args.nu + kf) / ((kf + 1.0) * -z);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        sum += next;
        term = next;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -args.mu * z.ln() + sum.ln()
}

/// Exact finite sum for nu = -m, m = 0, 1, 2, ...:
/// f = sum_k C(m,k) (mu)_k z^(-mu-k).
fn ln_polynomial_case(args: PsiArgs, z: f64, m: usize) -> f64 {
    let lz = z.ln();
    let mut logs = Vec::with_capacity(m + 1);
    let mut ln_term = 0.0;
    for k in 0..=m {
        logs.push(ln_term);
        let kf = k as f64;
        ln_term += ((m - k) as f64 / (kf + 1.0)).ln() + (args.mu + kf).ln() - lz;
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    -args.mu * lz + top + sum.ln()
}

/// ln f_{mu,nu}(z).
pub fn ln_tricomi_f(args: PsiArgs, z: f64) -> Result<f64> {
    if !(args.mu > 0.0) {
        return Err(Error::Domain(format!("tricomi_f requires mu > 0, got {}", args.mu)));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("tricomi_f requires z > 0, got {z}")));
    }
    if !in_precision_box(args, z) {
        log::warn!("tricomi_f outside the precision box: mu = {}, nu = {}, z = {z}", args.mu, args.nu);
    }
    if args.nu <= 0.0 && args.nu == args.nu.floor() && args.nu >= -64.0 {
        return Ok(ln_polynomial_case(args, z, (-args.nu) as usize));
    }
    if z > large_z_threshold(args) {
        return Ok(ln_large_z(args, z));
    }
    let integrand = Exponent { mu: args.mu, nu: args.nu, z };
    let r = ln_integrate_unimodal(&integrand, QuadOptions::default())?;
    if r.rel_change > 1e-10 {
        log::warn!(
            "tricomi_f quadrature stopped at relative change {:.2e} (mu = {}, nu = {}, z = {z})",
            r.rel_change,
            args.mu,
            args.nu
        );
    }
    let (lg, _) = log_gamma(args.mu)?;
    Ok(r.ln_value - lg)
}

/// f_{mu,nu}(z) = Psi(mu, mu+1-nu, z).
pub fn tricomi_f(args: PsiArgs, z: f64) -> Result<f64> {
    let v = ln_tricomi_f(args, z)?.exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("f_{{{},{}}}({z}) exceeds the floating range", args.mu, args.nu)));
    }
    if v == 0.0 {
        return Err(Error::Overflow(format!("f_{{{},{}}}({z}) underflows", args.mu, args.nu)));
    }
    Ok(v)
}

/// Psi(a, c, z) in the standard parameterization.
pub fn tricomi_psi(a: f64, c: f64, z: f64) -> Result<f64> {
    tricomi_f(PsiArgs::from_standard(a, c)?, z)
}

/// h(a, c, z) = Gamma(1+a-c) Psi(a, c, z).
pub fn tricomi_h(a: f64, c: f64, z: f64) -> Result<f64> {
    if !(c < 1.0 + a) {
        return Err(Error::Domain(format!("tricomi_h requires c < 1 + a, got a = {a}, c = {c}")));
    }
    let args = PsiArgs::from_standard(a, c)?;
    let (lg, _) = log_gamma(1.0 + a - c)?;
    let v = (lg + ln_tricomi_f(args, z)?).exp();
    if !v.is_finite() {
        return Err(Error::Overflow(format!("h({a}, {c}, {z})")));
    }
    Ok(v)
}

/// d^k/dz^k f_{mu,nu}(z) = (-1)^k (mu)_k f_{mu+k,nu}(z).
pub fn psi_derivative(args: PsiArgs, z: f64, order: usize) -> Result<f64> {
    if order > 8 {
        return Err(Error::Domain(format!("psi_derivative supports order <= 8, got {order}")));
    }
    let shifted = PsiArgs::new(args.mu + order as f64, args.nu)?;
    let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * pochhammer(args.mu, order) * tricomi_f(shifted, z)?)
}

/// Leading behaviour of f_{mu,nu}(z) as z -> 0+.
pub fn psi_small_z(args: PsiArgs) -> Result<AsymptoticForm> {
    let PsiArgs { mu, nu } = args;
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("psi_small_z requires mu > 0, got {mu}")));
    }
    let undefined = |e: Error| Error::UndefinedForm(format!("mu = {mu}, nu = {nu}: {e}"));
    if mu < nu {
        let c = gamma_ratio(nu - mu, nu).map_err(undefined)?;
        Ok(AsymptoticForm { coefficient: c, power: 0.0, log_power: 0 })
    } else if mu > nu {
        let c = gamma_ratio(mu - nu, mu).map_err(undefined)?;
        Ok(AsymptoticForm { coefficient: c, power: nu - mu, log_power: 0 })
    } else {
        let (lg, _) = log_gamma(mu)?;
        Ok(AsymptoticForm { coefficient: (-lg).exp(), power: 0.0, log_power: 1 })
    }
}
