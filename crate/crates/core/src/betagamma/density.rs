use crate::error::{Error, Result};
use crate::quad::{exp_sinh, tanh_sinh, QuadOptions};
use crate::specialfn::{ln_tricomi_f, log_gamma, recip_gamma, PsiArgs};
use serde::{Deserialize, Serialize};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// ln of the density of T(a, b, c) = Beta(a, b) * Gamma(c) at x > 0.
pub fn ln_density_t(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("x", x)] {
        positive(name, v)?;
    }
    let d = a + b - c;
    let lg = |v: f64| log_gamma(v).map(|r| r.0);
    Ok(lg(a + b)? - lg(a)? - lg(c)? + (c - 1.0) * x.ln() - x + ln_tricomi_f(PsiArgs::new(b, d)?, x)?)
}

/// Gamma(a+b) x^{c-1} e^{-x} Psi(b, b+1-d, x) / (Gamma(a) Gamma(c)) with d = a+b-c.
pub fn density_t(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    Ok(ln_density_t(a, b, c, x)?.exp())
}

/// Density of U_rho^{1/c} * U^{1/(c+1)} with rho = c/(c+d):
/// rho (c+1) x^{c-1} (d + (1-d) x) on (0, 1).
pub fn u_rho_product_density(c: f64, d: f64, x: f64) -> Result<f64> {
    positive("c", c)?;
    positive("d", d)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x must lie in (0, 1), got {x}")));
    }
    let rho = c / (c + d);
    Ok(rho * (c + 1.0) * x.powf(c - 1.0) * (d + (1.0 - d) * x))
}

/// E[exp(-lambda K)] for K with density proportional to
/// x^{a-1} (1+x)^{-(a+b)} e^{-cx}, equal to Psi(a, 1-b, c+lambda) / Psi(a, 1-b, c).
pub fn kummer2_laplace(a: f64, b: f64, c: f64, lambda: f64) -> Result<f64> {
    positive("a", a)?;
    positive("c", c)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
    }
    if !b.is_finite() {
        return Err(Error::Domain(format!("b must be finite, got {b}")));
    }
    let args = PsiArgs::from_standard(a, 1.0 - b)?;
    Ok((ln_tricomi_f(args, c + lambda)? - ln_tricomi_f(args, c)?).exp())
}

/// The same transform by direct quadrature of the density.
pub fn kummer2_laplace_quadrature(a: f64, b: f64, c: f64, lambda: f64) -> Result<f64> {
    positive("a", a)?;
    positive("c", c)?;
    let opts = QuadOptions::default();
    let integral = |rate: f64| {
        let g = |x: f64| x.powf(a - 1.0) * (1.0 + x).powf(-(a + b)) * (-rate * x).exp();
        tanh_sinh(g, 0.0, 1.0, opts).value + exp_sinh(g, 1.0, opts).value
    };
    let v = integral(c + lambda) / integral(c);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!("Kummer type 2 transform at a = {a}, b = {b}, c = {c}")))
    }
}

/// 1/E[T(a,b,c)^s] continued to all real s:
/// Gamma(a) Gamma(c) Gamma(a+b+s) / (Gamma(a+b) Gamma(a+s) Gamma(c+s)).
pub fn reciprocal_mellin_t(a: f64, b: f64, c: f64, s: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        positive(name, v)?;
    }
    let lg = |v: f64| log_gamma(v).map(|r| r.0);
    let (ln_top, sign_top) = log_gamma(a + b + s)?;
    let front = (lg(a)? + lg(c)? - lg(a + b)? + ln_top).exp() * sign_top;
    Ok(front * recip_gamma(a + s) * recip_gamma(c + s))
}

/// |1/E[T^s]| along s = -(a+b) + 10^{-k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyWitness {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    /// |values| strictly increasing with a total growth above 1e3.
    pub divergent: bool,
}

pub fn holomorphy_witness(a: f64, b: f64, c: f64) -> Result<HolomorphyWitness> {
    let offsets: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
    let values = offsets.iter().map(|&h| reciprocal_mellin_t(a, b, c, -(a + b) + h)).collect::<Result<Vec<_>>>()?;
    let mags: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let divergent = mags.windows(2).all(|w| w[1] > w[0]) && mags[mags.len() - 1] > 1e3 * mags[0];
    Ok(HolomorphyWitness { a, b, c, offsets, values, divergent })
}
