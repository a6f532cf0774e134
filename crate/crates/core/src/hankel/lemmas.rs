//! Closed-form determinants and the block asymptotics of x^{(delta-i-j)_+}
//! weighted matrices.

use super::factorial_product;
use crate::error::{Error, Result};
use crate::linalg::{det_equilibrated, det_equilibrated_log, det_twofloat, div_twofloat, pochhammer_twofloat, Matrix};
use crate::specialfn::{gamma, log_gamma, log_gamma_ratio, pochhammer};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

pub fn lemma1_closed(n: usize) -> f64 {
    factorial_product(n)
}

fn twofloat_rows(n: usize, entry: impl Fn(usize, usize) -> TwoFloat) -> Vec<Vec<TwoFloat>> {
    (0..=n).map(|i| (0..=n).map(|j| entry(i, j)).collect()).collect()
}

/// det_n[(d-n+j)_i]
pub fn lemma1_matrix(n: usize, d: f64) -> f64 {
    let base = TwoFloat::from(d) - n as f64;
    det_twofloat(twofloat_rows(n, |i, j| pochhammer_twofloat(base + j as f64, i))).into()
}

fn check_lemma2(q: usize, mu: f64, nu: f64) -> Result<()> {
    if !(mu > nu + q as f64) {
        return Err(Error::Domain(format!("lemma 2 requires mu > nu + q, got mu = {mu}, nu = {nu}, q = {q}")));
    }
    Ok(())
}

/// prod_{k=0}^q k! Gamma(mu-nu-k) (mu-k-1)^{q-k}
pub fn lemma2_closed(q: usize, mu: f64, nu: f64) -> Result<f64> {
    check_lemma2(q, mu, nu)?;
    let mut v = factorial_product(q);
    for k in 0..=q {
        let kf = k as f64;
        v *= gamma(mu - nu - kf)? * (mu - kf - 1.0).powi((q - k) as i32);
    }
    Ok(v)
}

/// det_q[(nu-q+j)_i Gamma(mu-nu+q-i-j)]
pub fn lemma2_matrix(q: usize, mu: f64, nu: f64) -> Result<f64> {
    check_lemma2(q, mu, nu)?;
    // Gamma(mu-nu+q-i-j) = Gamma(mu-nu-j) (mu-nu-j)_{q-i}
    let gap = TwoFloat::from(mu) - nu;
    let low = TwoFloat::from(nu) - q as f64;
    let rows = twofloat_rows(q, |i, j| pochhammer_twofloat(low + j as f64, i) * pochhammer_twofloat(gap - j as f64, q - i));
    let scale = (0..=q).map(|j| log_gamma(mu - nu - j as f64)).collect::<Result<Vec<_>>>()?;
    Ok(scaled(det_twofloat(rows).into(), &scale))
}

/// `v` times the product of the signed exp(ln) factors.
fn scaled(v: f64, factors: &[(f64, f64)]) -> f64 {
    let sign: f64 = factors.iter().map(|f| f.1).product();
    let ln: f64 = factors.iter().map(|f| f.0).sum();
    sign * v.signum() * (v.abs().ln() + ln).exp()
}

/// F_q(rho) = det_q[Gamma(rho+i+j)], required to be positive.
pub fn f_q(rho: f64, q: usize) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("F_q requires rho > 0, got {rho}")));
    }
    // Gamma(rho+i+j) = Gamma(rho) (rho)_{i+j}
    let r = TwoFloat::from(rho);
    let h = det_twofloat(twofloat_rows(q, |i, j| pochhammer_twofloat(r, i + j)));
    let v = scaled(h.into(), &vec![log_gamma(rho)?; q + 1]);
    if !(v > 0.0) {
        return Err(Error::Conditioning(format!("F_{q}({rho}) evaluated to {v}")));
    }
    Ok(v)
}

/// prod_{k=0}^q k! Gamma(rho+k), the moment-Hankel value of F_q.
pub fn f_q_closed(rho: f64, q: usize) -> Result<f64> {
    let mut v = factorial_product(q);
    for k in 0..=q {
        v *= gamma(rho + k as f64)?;
    }
    Ok(v)
}

fn lemma3_rho(n: usize, q: usize, mu: f64, nu: f64) -> Result<f64> {
    if q > n {
        return Err(Error::Domain(format!("lemma 3 requires q <= n, got q = {q}, n = {n}")));
    }
    let rho = nu + n as f64 - mu - 2.0 * q as f64;
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("lemma 3 requires rho = nu + n - mu - 2q > 0, got {rho}")));
    }
    Ok(rho)
}

/// F_q(rho) prod_{k=0}^q (nu-k)_{n-q} / Gamma(nu+n-k-q), rho = nu+n-mu-2q.
pub fn lemma3_closed(n: usize, q: usize, mu: f64, nu: f64) -> Result<f64> {
    let rho = lemma3_rho(n, q, mu, nu)?;
    let mut v = f_q(rho, q)?;
    for k in 0..=q {
        let kf = k as f64;
        let (lg, sg) = log_gamma(nu + (n - q) as f64 - kf)?;
        v *= pochhammer(nu - kf, n - q) * sg * (-lg).exp();
    }
    Ok(v)
}

/// det_q[(Gamma(rho+i+j)/Gamma(rho+mu+i+j)) (nu-q+j)_{n-q+i}]
pub fn lemma3_matrix(n: usize, q: usize, mu: f64, nu: f64) -> Result<f64> {
    lemma3_rho(n, q, mu, nu)?;
    // Gamma(rho+s)/Gamma(rho+mu+s) = Gamma(rho)/Gamma(rho+mu) (rho)_s/(rho+mu)_s
    let top = TwoFloat::from(nu) + (n as f64 - 2.0 * q as f64);
    let rho = top - mu;
    let low = TwoFloat::from(nu) - q as f64;
    let rows = twofloat_rows(q, |i, j| {
        div_twofloat(pochhammer_twofloat(rho, i + j), pochhammer_twofloat(top, i + j)) * pochhammer_twofloat(low + j as f64, n - q + i)
    });
    let ratio = log_gamma_ratio(rho.into(), top.into())?;
    Ok(scaled(det_twofloat(rows).into(), &vec![ratio; q + 1]))
}

/// A matrix with nonzero entries and the exponent parameter delta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMatrixSpec {
    pub a: Vec<Vec<f64>>,
    pub delta: f64,
}

impl BlockMatrixSpec {
    pub fn n(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    pub fn rho(&self) -> usize {
        (self.delta / 2.0).floor() as usize
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.a.is_empty() || self.a.iter().any(|r| r.len() != n + 1) {
            return Err(Error::Domain("block matrix must be square and nonempty".into()));
        }
        if !(self.delta > 0.0 && self.delta < 2.0 * n as f64) {
            return Err(Error::Domain(format!("delta must lie in (0, 2n), got {}", self.delta)));
        }
        if self.a.iter().flatten().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::Domain("block matrix entries must be nonzero".into()));
        }
        Ok(())
    }
}

/// det A^delta(x) where A^delta(x)_{ij} = a_ij x^{(delta-i-j)_+}.
pub fn block_matrix_det(spec: &BlockMatrixSpec, x: f64) -> f64 {
    let a = Matrix::from_rows(&spec.a);
    let m = Matrix::from_fn(a.dim(), |i, j| a.get(i, j) * x.powf((spec.delta - (i + j) as f64).max(0.0)));
    det_equilibrated(&m).value
}

/// det A^delta(x) / (det A11 det A22 x^{(rho+1)(delta-rho)}), evaluated in logs.
pub fn block_leading_ratio(spec: &BlockMatrixSpec, x: f64) -> Result<f64> {
    let (coefficient, exponent) = block_asymptotic(spec)?;
    let a = Matrix::from_rows(&spec.a);
    let lx = x.ln();
    let ln = Matrix::from_fn(a.dim(), |i, j| a.get(i, j).abs().ln() + (spec.delta - (i + j) as f64).max(0.0) * lx);
    let signs = Matrix::from_fn(a.dim(), |i, j| a.get(i, j).signum());
    let d = det_equilibrated_log(&ln, &signs);
    let ln_ratio = d.ln_abs_equilibrated + d.ln_scale - coefficient.abs().ln() - exponent * lx;
    Ok(d.sign * coefficient.signum() * ln_ratio.exp())
}

/// Tolerance on the equilibrated sub-block determinants.
const BLOCK_TOL: f64 = 1e-12;

/// `(det A11 det A22, (rho+1)(delta-rho))` with rho = floor(delta/2),
/// A11 on indices 0..=rho and A22 on rho+1..=n.
pub fn block_asymptotic(spec: &BlockMatrixSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let a = Matrix::from_rows(&spec.a);
    let rho = spec.rho();
    let n = spec.n();
    let lead: Vec<usize> = (0..=rho).collect();
    let tail: Vec<usize> = (rho + 1..=n).collect();
    let d11 = det_equilibrated(&a.submatrix(&lead));
    let d22 = det_equilibrated(&a.submatrix(&tail));
    if d11.sign_with_floor(BLOCK_TOL) == 0 || d22.sign_with_floor(BLOCK_TOL) == 0 {
        return Err(Error::SingularBlock(format!("det A11 = {}, det A22 = {}", d11.value, d22.value)));
    }
    let rf = rho as f64;
    Ok((d11.value * d22.value, (rf + 1.0) * (spec.delta - rf)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lemma1_examples() {
        assert_eq!(lemma1_closed(0), 1.0);
        assert_relative_eq!(lemma1_matrix(2, -3.7), 2.0, max_relative = 1e-12);
        assert_relative_eq!(lemma1_matrix(3, 0.123), 12.0, max_relative = 1e-12);
    }

    #[test]
    fn lemma2_examples() {
        assert_relative_eq!(lemma2_closed(0, 3.2, 1.1).unwrap(), gamma(2.1).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(lemma2_closed(1, 5.0, 2.0).unwrap(), 8.0, max_relative = 1e-14);
        assert_relative_eq!(lemma2_matrix(1, 5.0, 2.0).unwrap(), 8.0, max_relative = 1e-14);
        let (c, m) = (lemma2_closed(2, 9.5, 3.1).unwrap(), lemma2_matrix(2, 9.5, 3.1).unwrap());
        assert_relative_eq!(c, m, max_relative = 1e-9);
        assert!(lemma2_closed(2, 3.0, 1.0).is_err());
    }

    #[test]
    fn lemma3_examples() {
        assert_relative_eq!(f_q(2.5, 0).unwrap(), gamma(2.5).unwrap(), max_relative = 1e-14);
        assert_relative_eq!(f_q(1.0, 1).unwrap(), 1.0, max_relative = 1e-14);
        let c = lemma3_closed(3, 1, 0.5, 2.7).unwrap();
        let m = lemma3_matrix(3, 1, 0.5, 2.7).unwrap();
        assert_relative_eq!(c, m, max_relative = 1e-9);
        assert_relative_eq!(c, 13.395_885_504, max_relative = 1e-9);
        assert!(lemma3_closed(1, 1, 2.0, 0.5).is_err());
    }

    #[test]
    fn block_examples() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 2.0]];
        let s = BlockMatrixSpec { a: a.clone(), delta: 0.5 };
        assert_eq!(block_asymptotic(&s).unwrap(), (2.0, 0.5));
        let s = BlockMatrixSpec { a, delta: 1.5 };
        assert_eq!(block_asymptotic(&s).unwrap(), (2.0, 1.5));
        let x: f64 = 1e6;
        assert_relative_eq!(block_matrix_det(&s, x) / (2.0 * x.powf(1.5)), 1.0, max_relative = 1e-2);
        let id = BlockMatrixSpec { a: vec![vec![1.0, 1e-300], vec![1e-300, 1.0]], delta: 1.2 };
        assert_relative_eq!(block_asymptotic(&id).unwrap().0, 1.0);
        let bad = BlockMatrixSpec { a: vec![vec![1.0, 0.0], vec![1.0, 1.0]], delta: 1.0 };
        assert!(block_asymptotic(&bad).is_err());
    }
}
