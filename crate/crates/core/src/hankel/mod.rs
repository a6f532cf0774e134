//! Weighted Hankel determinants of the Tricomi function
//!
//! D^n_{b,d}(z) = det_n[(d-n+j)_i f_{b, d-n+i+j}(z)],  0 <= i, j <= n,
//!
//! together with their Wronskian form, the Sylvester recursion in `d` and the
//! small-z sign analysis.

mod lemmas;
mod scan;
mod small_z;

pub use lemmas::{
    block_asymptotic, block_leading_ratio, block_matrix_det, f_q, f_q_closed, lemma1_closed, lemma1_matrix, lemma2_closed, lemma2_matrix,
    lemma3_closed, lemma3_matrix, BlockMatrixSpec,
};
pub use scan::{empirical_order, log_grid, sign_scan, sign_scan_on, SignScan, DEFAULT_SCAN_POINTS, EPS_SIGN};
pub use small_z::{locate_region, small_z_prediction, SmallZPrediction, SubRegion, ZRegion};

use crate::error::{Error, Result};
use crate::linalg::{det_equilibrated, Matrix, ScaledDet};
use crate::specialfn::{pochhammer, psi_derivative, tricomi_f, PsiArgs};
use serde::{Deserialize, Serialize};

/// The triple indexing D^n_{b,d}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetParams {
    pub n: usize,
    pub b: f64,
    pub d: f64,
}

impl DetParams {
    pub fn new(n: usize, b: f64, d: f64) -> Result<Self> {
        if !(b > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("DetParams requires b > 0, got b = {b}, d = {d}")));
        }
        if n > 8 {
            return Err(Error::Domain(format!("DetParams supports n <= 8, got {n}")));
        }
        Ok(Self { n, b, d })
    }

    fn with(&self, n: usize, d: f64) -> Self {
        Self { n, b: self.b, d }
    }
}

fn f(b: f64, nu: f64, z: f64) -> Result<f64> {
    tricomi_f(PsiArgs::new(b, nu)?, z)
}

/// Matrix of D^n_{b,d}(z).
pub fn d_matrix(p: DetParams, z: f64) -> Result<Matrix> {
    let n = p.n;
    let nf = n as f64;
    Matrix::try_from_fn(n + 1, |i, j| {
        let w = pochhammer(p.d - nf + j as f64, i);
        Ok(w * f(p.b, p.d - nf + (i + j) as f64, z)?)
    })
}

/// Matrix of D~^n_{b,d}(z): the last column is built from d+1.
pub fn d_tilde_matrix(p: DetParams, z: f64) -> Result<Matrix> {
    let mut m = d_matrix(p, z)?;
    let n = p.n;
    for i in 0..=n {
        m.set(i, n, pochhammer(p.d + 1.0, i) * f(p.b, p.d + 1.0 + i as f64, z)?);
    }
    Ok(m)
}

/// D^n_{b,d}(z) with its equilibration scale.
pub fn det_d_scaled(p: DetParams, z: f64) -> Result<ScaledDet> {
    Ok(det_equilibrated(&d_matrix(p, z)?))
}

pub fn det_d(p: DetParams, z: f64) -> Result<f64> {
    Ok(det_d_scaled(p, z)?.value)
}

pub fn det_d_tilde(p: DetParams, z: f64) -> Result<f64> {
    Ok(det_equilibrated(&d_tilde_matrix(p, z)?).value)
}

/// det_n[Psi(b, b+1-d+n-i-j, z)] without the Pochhammer weights.
pub fn det_unweighted(p: DetParams, z: f64) -> Result<ScaledDet> {
    let nf = p.n as f64;
    let m = Matrix::try_from_fn(p.n + 1, |i, j| f(p.b, p.d - nf + (i + j) as f64, z))?;
    Ok(det_equilibrated(&m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WronskianMethod {
    /// W = z^{(n+1)(b-d)} D.
    Scaling,
    /// det_n[d^i/dz^i f_{d-j, b}(z)].
    Direct,
}

fn wronskian_matrix(p: DetParams, z: f64, extra_order: usize) -> Result<Matrix> {
    if !(p.d > p.n as f64) {
        return Err(Error::Domain(format!("direct Wronskian requires d > n, got d = {}, n = {}", p.d, p.n)));
    }
    Matrix::try_from_fn(p.n + 1, |i, j| {
        let order = if i == p.n { i + extra_order } else { i };
        psi_derivative(PsiArgs::new(p.d - j as f64, p.b)?, z, order)
    })
}

pub fn wronskian_w(p: DetParams, z: f64, method: WronskianMethod) -> Result<f64> {
    match method {
        WronskianMethod::Scaling => {
            let s = det_d_scaled(p, z)?;
            let lexp = (p.n as f64 + 1.0) * (p.b - p.d) * z.ln();
            Ok(s.sign * (s.ln_abs_equilibrated + s.ln_scale + lexp).exp())
        }
        WronskianMethod::Direct => Ok(det_equilibrated(&wronskian_matrix(p, z, 0)?).value),
    }
}

/// dW/dz from the direct form: only the last row contributes.
pub fn wronskian_derivative(p: DetParams, z: f64) -> Result<f64> {
    Ok(det_equilibrated(&wronskian_matrix(p, z, 1)?).value)
}

/// |dW/dz + d z^{(n+1)(b-d)-1} D~| relative to the larger side.
pub fn derivative_relation_residual(p: DetParams, z: f64) -> Result<f64> {
    let lhs = wronskian_derivative(p, z)?;
    let t = det_equilibrated(&d_tilde_matrix(p, z)?);
    let lexp = ((p.n as f64 + 1.0) * (p.b - p.d) - 1.0) * z.ln();
    let rhs = -p.d * t.sign * (t.ln_abs_equilibrated + t.ln_scale + lexp).exp();
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE))
}

/// Both sides of the Sylvester recursion in `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SylvesterCheck {
    pub direct: f64,
    pub recursion: f64,
    pub residual: f64,
    /// (|d A B| + |(n-d) C^2|) / |d A B + (n-d) C^2|
    pub cancellation: f64,
    /// First-order bound on `residual` from entry errors of size `SYLVESTER_ENTRY_ERR`.
    pub error_bound: f64,
}

/// Tolerance on the equilibrated pivot D^{n-2} below which the recursion is
/// rejected as ill-conditioned.
pub const SYLVESTER_PIVOT_TOL: f64 = 1e-12;

/// Target accuracy of the recursion check.
pub const SYLVESTER_TOL: f64 = 1e-8;

/// Relative error assumed for each computed entry f_{b,nu}(z).
pub const SYLVESTER_ENTRY_ERR: f64 = 4.0 * f64::EPSILON;

/// D^n = (d D^{n-1}_{d-1} D^{n-1}_{d+1} + (n-d) (D^{n-1}_d)^2) / D^{n-2}_d,
/// where D^0_{b,d} = f_{b,d}.
pub fn sylvester_check(p: DetParams, z: f64) -> Result<SylvesterCheck> {
    if p.n < 2 {
        return Err(Error::Domain("the Sylvester recursion needs n >= 2".into()));
    }
    let n = p.n;
    let pivot = det_d_scaled(p.with(n - 2, p.d), z)?;
    if pivot.sign_with_floor(SYLVESTER_PIVOT_TOL) == 0 {
        return Err(Error::Conditioning(format!("D^{}_{{b,d}} pivot is numerically zero at z = {z}", n - 2)));
    }
    let a = det_d_scaled(p.with(n - 1, p.d - 1.0), z)?;
    let b = det_d_scaled(p.with(n - 1, p.d + 1.0), z)?;
    let c = det_d_scaled(p.with(n - 1, p.d), z)?;
    let t1 = p.d * a.value * b.value;
    let t2 = (n as f64 - p.d) * c.value * c.value;
    let num = t1 + t2;
    let recursion = num / pivot.value;
    let d = det_d_scaled(p, z)?;
    let direct = d.value;
    let residual = (direct - recursion).abs() / direct.abs().max(recursion.abs()).max(f64::MIN_POSITIVE);
    let cancellation = (t1.abs() + t2.abs()) / num.abs();
    let err = |s: &ScaledDet| SYLVESTER_ENTRY_ERR / s.relative_magnitude();
    let error_bound = err(&d) + cancellation * (err(&a) + err(&b)).max(2.0 * err(&c)) + err(&pivot);
    if !(error_bound <= SYLVESTER_TOL) {
        return Err(Error::Conditioning(format!("Sylvester check at z = {z} is ill-conditioned: error bound {error_bound:.2e}")));
    }
    Ok(SylvesterCheck { direct, recursion, residual, cancellation, error_bound })
}

pub fn sylvester_residual(p: DetParams, z: f64) -> Result<f64> {
    Ok(sylvester_check(p, z)?.residual)
}

/// prod_{k=0}^n k!
pub fn factorial_product(n: usize) -> f64 {
    let mut prod = 1.0;
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
        prod *= fact;
    }
    prod
}
