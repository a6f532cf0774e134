//! The kernels
//!
//! T_{b,d}(x, y) = exp(-x/y) f_{b,d}(x/y),
//! K_{b,d}(x, y) = 1/Gamma(b) int_0^inf exp(-x(t+y)) t^(b-1) (t+y)^(-d) dt,
//!
//! random minor probing for TP_m / SR_m, and the sign relation between the
//! derivative determinant Delta^n of K and D^n.

use crate::error::{Error, Result};
use crate::hankel::{det_d_scaled, sign_scan, DetParams, DEFAULT_SCAN_POINTS, EPS_SIGN};
use crate::linalg::{det_equilibrated, det_equilibrated_log, Matrix, ScaledDet};
use crate::quad::{ln_integrate_unimodal, LogIntegrand, QuadOptions};
use crate::specialfn::{ln_tricomi_f, log_gamma, PsiArgs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub b: f64,
    pub d: f64,
}

impl KernelParams {
    pub fn new(b: f64, d: f64) -> Result<Self> {
        if !(b > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("kernel requires b > 0, got b = {b}, d = {d}")));
        }
        Ok(Self { b, d })
    }

    fn psi_args(&self) -> Result<PsiArgs> {
        PsiArgs::new(self.b, self.d)
    }
}

fn check_xy(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("kernel arguments must be positive, got x = {x}, y = {y}")));
    }
    Ok(())
}

pub fn ln_kernel_t(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    let z = x / y;
    Ok(ln_tricomi_f(kp.psi_args()?, z)? - z)
}

pub fn kernel_t(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    Ok(ln_kernel_t(kp, x, y)?.exp())
}

struct KExponent {
    b: f64,
    d: f64,
    x: f64,
    y: f64,
    ln_y: f64,
}

// t = e^u; phi = b u - x e^u - d ln(y + e^u)
impl LogIntegrand for KExponent {
    fn phi(&self, u: f64) -> f64 {
        let w = u - self.ln_y;
        let sp = if w > 0.0 { w + (-w).exp().ln_1p() } else { w.exp().ln_1p() };
        self.b * u - self.x * u.exp() - self.d * (self.ln_y + sp)
    }
    fn dphi(&self, u: f64) -> f64 {
        let e = u.exp();
        self.b - self.x * e - self.d * share(e, self.y)
    }
    fn d2phi(&self, u: f64) -> f64 {
        let e = u.exp();
        let s = share(e, self.y);
        -self.x * e - self.d * s * (1.0 - s)
    }
}

fn share(e: f64, y: f64) -> f64 {
    if e.is_infinite() {
        1.0
    } else {
        e / (y + e)
    }
}

/// ln K_{b,d}(x, y) from the defining integral.
pub fn ln_kernel_k(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    let g = KExponent { b: kp.b, d: kp.d, x, y, ln_y: y.ln() };
    let r = ln_integrate_unimodal(&g, QuadOptions::default())?;
    let (lg, _) = log_gamma(kp.b)?;
    Ok(r.ln_value - lg - x * y)
}

pub fn kernel_k(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    Ok(ln_kernel_k(kp, x, y)?.exp())
}

/// ln of exp(-xy) y^(b-d) f_{b,d}(xy), the Tricomi form of K.
pub fn ln_kernel_k_via_psi(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    check_xy(x, y)?;
    let z = x * y;
    Ok(ln_tricomi_f(kp.psi_args()?, z)? - z + (kp.b - kp.d) * y.ln())
}

pub fn kernel_k_via_psi(kp: KernelParams, x: f64, y: f64) -> Result<f64> {
    Ok(ln_kernel_k_via_psi(kp, x, y)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    T,
    K,
}

impl KernelKind {
    /// Sign expected of every m x m minor on increasing grids.
    pub fn expected_sign(&self, m: usize) -> i8 {
        match self {
            Self::T => 1,
            Self::K => {
                if (m * (m - 1) / 2) % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    fn ln_eval(&self, kp: KernelParams, x: f64, y: f64) -> Result<f64> {
        match self {
            Self::T => ln_kernel_t(kp, x, y),
            Self::K => ln_kernel_k_via_psi(kp, x, y),
        }
    }
}

/// Relative noise floor for kernel minors.
pub const EPS_MINOR: f64 = 1e-11;

/// Grids at which a minor was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorReport {
    pub kernel: KernelKind,
    pub params: KernelParams,
    pub m: usize,
    pub trials: usize,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    pub expected_sign: i8,
    /// A grid whose minor has sign `-expected_sign`, present iff both strict
    /// signs were observed.
    pub witness: Option<Witness>,
}

impl MinorReport {
    pub fn violations(&self) -> usize {
        if self.expected_sign > 0 {
            self.negative
        } else {
            self.positive
        }
    }

    pub fn sign_conflict(&self) -> bool {
        self.negative > 0 && self.positive > 0
    }
}

/// How trial grids are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbeStrategy {
    /// Both grids log-uniform on [1e-3, 1e3].
    Uniform,
    /// Odd trials uniform; even trials cluster the grids so that x/y (for T)
    /// or xy (for K) stays near a target drawn log-uniformly from [z_lo, z_hi].
    Guided { z_lo: f64, z_hi: f64 },
}

const CLUSTER_WIDTH: (f64, f64) = (2.0, 16.0);
const GRID_LO: f64 = -3.0 * std::f64::consts::LN_10;
const GRID_HI: f64 = 3.0 * std::f64::consts::LN_10;

fn sorted_distinct(mut v: Vec<f64>) -> Option<Vec<f64>> {
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[0] < w[1]).then_some(v)
}

fn uniform_grid(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    loop {
        let v = (0..m).map(|_| rng.random_range(GRID_LO..GRID_HI).exp()).collect();
        if let Some(v) = sorted_distinct(v) {
            return v;
        }
    }
}

fn cluster(rng: &mut ChaCha8Rng, centre: f64, width: f64, m: usize) -> Vec<f64> {
    loop {
        let v = (0..m).map(|_| centre * (width * rng.random_range(-0.5..0.5)).exp()).collect();
        if let Some(v) = sorted_distinct(v) {
            return v;
        }
    }
}

fn trial_grids(kind: KernelKind, strategy: ProbeStrategy, m: usize, rng: &mut ChaCha8Rng, trial: usize) -> (Vec<f64>, Vec<f64>) {
    match strategy {
        ProbeStrategy::Guided { z_lo, z_hi } if trial % 2 == 0 => {
            let x0 = rng.random_range(-2.0 * std::f64::consts::LN_10..2.0 * std::f64::consts::LN_10).exp();
            let z = if z_hi > z_lo { rng.random_range(z_lo.ln()..z_hi.ln()).exp() } else { z_lo };
            let y0 = match kind {
                KernelKind::T => x0 / z,
                KernelKind::K => z / x0,
            };
            let width = rng.random_range(CLUSTER_WIDTH.0.ln()..CLUSTER_WIDTH.1.ln()).exp();
            (cluster(rng, x0, width, m), cluster(rng, y0, width, m))
        }
        _ => (uniform_grid(rng, m), uniform_grid(rng, m)),
    }
}

/// Guided strategy for order-m minors: targets the z-interval on which
/// D^{m-1}_{b,d} is negative over [1e-6, 1e6].
pub fn guided_strategy(kp: KernelParams, m: usize) -> Result<ProbeStrategy> {
    if m < 2 {
        return Err(Error::Domain(format!("guided search needs m >= 2, got {m}")));
    }
    let scan = sign_scan(DetParams::new(m - 1, kp.b, kp.d)?, 1e-6, 1e6, DEFAULT_SCAN_POINTS)?;
    let mut neg = scan.z_values.iter().zip(&scan.signs).filter(|(_, &s)| s < 0).map(|(z, _)| *z);
    let z_lo = neg.next().ok_or_else(|| Error::Region(format!("D^{} has no negative value on the scan grid", m - 1)))?;
    let z_hi = neg.last().unwrap_or(z_lo);
    Ok(ProbeStrategy::Guided { z_lo, z_hi })
}

/// Random stream for one trial of a seeded probe.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Equilibrated m x m minor of the kernel on the grids `x`, `y`.
pub fn kernel_minor(kind: KernelKind, kp: KernelParams, x: &[f64], y: &[f64]) -> Result<ScaledDet> {
    let ln = Matrix::try_from_fn(x.len(), |i, j| kind.ln_eval(kp, x[i], y[j]))?;
    Ok(det_equilibrated_log(&ln, &Matrix::from_fn(x.len(), |_, _| 1.0)))
}

fn minor_sign(kind: KernelKind, kp: KernelParams, x: &[f64], y: &[f64]) -> Result<(i8, f64)> {
    let s = kernel_minor(kind, kp, x, y)?;
    Ok((s.sign_with_floor(EPS_MINOR), s.value))
}

pub fn minor_probe(kind: KernelKind, kp: KernelParams, m: usize, trials: usize, seed: u64) -> Result<MinorReport> {
    minor_probe_with(kind, kp, m, trials, seed, ProbeStrategy::Uniform)
}

pub fn minor_probe_with(
    kind: KernelKind,
    kp: KernelParams,
    m: usize,
    trials: usize,
    seed: u64,
    strategy: ProbeStrategy,
) -> Result<MinorReport> {
    if !(1..=6).contains(&m) || trials == 0 {
        return Err(Error::Domain(format!("minor_probe needs 1 <= m <= 6 and trials >= 1, got m = {m}, trials = {trials}")));
    }
    let outcomes: Vec<(i8, f64, Vec<f64>, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let (x, y) = trial_grids(kind, strategy, m, &mut rng, t);
            let (s, v) = minor_sign(kind, kp, &x, &y)?;
            Ok((s, v, x, y))
        })
        .collect::<Result<_>>()?;
    let count = |s: i8| outcomes.iter().filter(|o| o.0 == s).count();
    let (negative, zero, positive) = (count(-1), count(0), count(1));
    let expected_sign = kind.expected_sign(m);
    let witness = if negative > 0 && positive > 0 {
        outcomes.iter().enumerate().find(|(_, o)| o.0 == -expected_sign).map(|(trial, o)| Witness {
            trial,
            x: o.2.clone(),
            y: o.3.clone(),
            value: o.1,
        })
    } else {
        None
    };
    Ok(MinorReport { kernel: kind, params: kp, m, trials, negative, zero, positive, expected_sign, witness })
}

/// Polynomial in x (ascending coefficients) for each shift e of K_{b,d+e}.
type Ladder = BTreeMap<i32, Vec<f64>>;

fn add_poly(target: &mut Vec<f64>, p: &[f64], scale: f64, shift_x: usize) {
    if target.len() < p.len() + shift_x {
        target.resize(p.len() + shift_x, 0.0);
    }
    for (k, c) in p.iter().enumerate() {
        target[k + shift_x] += scale * c;
    }
}

// d/dy K_{b,d+e} = -x K_{b,d+e} - (d+e) K_{b,d+e+1}
fn ladder_dy(l: &Ladder, d: f64) -> Ladder {
    let mut out = Ladder::new();
    for (&e, p) in l {
        add_poly(out.entry(e).or_default(), p, -1.0, 1);
        add_poly(out.entry(e + 1).or_default(), p, -(d + e as f64), 0);
    }
    out
}

// d/dx K_{b,d+e} = -K_{b,d+e-1}
fn ladder_dx(l: &Ladder) -> Ladder {
    let mut out = Ladder::new();
    for (&e, p) in l {
        if p.len() > 1 {
            let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
            add_poly(out.entry(e).or_default(), &dp, 1.0, 0);
        }
        add_poly(out.entry(e - 1).or_default(), p, -1.0, 0);
    }
    out
}

fn eval_poly(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Matrix [d^{i+j} K / dx^i dy^j], 0 <= i, j <= n, from the contiguous
/// relations in d.
pub fn delta_matrix(kp: KernelParams, n: usize, x: f64, y: f64) -> Result<Matrix> {
    let mut kvals = BTreeMap::new();
    for e in -(n as i32)..=(n as i32) {
        kvals.insert(e, kernel_k(KernelParams { b: kp.b, d: kp.d + e as f64 }, x, y)?);
    }
    let mut cols: Vec<Ladder> = Vec::with_capacity(n + 1);
    let mut l: Ladder = BTreeMap::from([(0, vec![1.0])]);
    for _ in 0..=n {
        cols.push(l.clone());
        l = ladder_dy(&l, kp.d);
    }
    let mut rows = vec![cols];
    for i in 1..=n {
        let next: Vec<Ladder> = rows[i - 1].iter().map(ladder_dx).collect();
        rows.push(next);
    }
    Ok(Matrix::from_fn(n + 1, |i, j| {
        rows[i][j].iter().map(|(e, p)| eval_poly(p, x) * kvals[e]).sum()
    }))
}

/// det_n[(d-j)_i K_{b,d+i-j}(x, y)], the reduced form of Delta^n.
pub fn delta_reduced_matrix(kp: KernelParams, n: usize, x: f64, y: f64) -> Result<Matrix> {
    Matrix::try_from_fn(n + 1, |i, j| {
        let shift = i as f64 - j as f64;
        Ok::<_, Error>(crate::specialfn::pochhammer(kp.d - j as f64, i) * kernel_k(KernelParams { b: kp.b, d: kp.d + shift }, x, y)?)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSignCheck {
    /// (-1)^{n(n+1)/2} Delta^n(x, y)
    pub lhs_value: f64,
    /// D^n(xy)
    pub rhs_value: f64,
    pub lhs_sign: i8,
    pub rhs_sign: i8,
    pub agree: bool,
    /// Delta^1 from central differences of K with the supplied step, n <= 1.
    pub finite_difference: Option<f64>,
}

/// Noise floor used for the derivative determinant.
pub const EPS_DELTA: f64 = 1e-8;

fn delta_fd(kp: KernelParams, n: usize, x: f64, y: f64, h: f64) -> Result<Option<f64>> {
    let k = |a: f64, b: f64| kernel_k(kp, a, b);
    match n {
        0 => Ok(Some(k(x, y)?)),
        1 => {
            let kx = (k(x + h, y)? - k(x - h, y)?) / (2.0 * h);
            let ky = (k(x, y + h)? - k(x, y - h)?) / (2.0 * h);
            let kxy = (k(x + h, y + h)? - k(x + h, y - h)? - k(x - h, y + h)? + k(x - h, y - h)?) / (4.0 * h * h);
            Ok(Some(k(x, y)? * kxy - kx * ky))
        }
        _ => Ok(None),
    }
}

pub fn delta_sign_check(kp: KernelParams, n: usize, x: f64, y: f64, h: Option<f64>) -> Result<DeltaSignCheck> {
    check_xy(x, y)?;
    let delta = det_equilibrated(&delta_matrix(kp, n, x, y)?);
    let parity = if (n * (n + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let lhs_sign = delta.sign_with_floor(EPS_DELTA) * parity as i8;
    let rhs = det_d_scaled(DetParams::new(n, kp.b, kp.d)?, x * y)?;
    let rhs_sign = rhs.sign_with_floor(EPS_SIGN);
    if lhs_sign == 0 || rhs_sign == 0 {
        return Err(Error::Indeterminate(format!(
            "Delta^{n} = {:e}, D^{n} = {:e} at (x, y) = ({x}, {y})",
            delta.value, rhs.value
        )));
    }
    let step = h.unwrap_or(1e-4 * x.min(y));
    Ok(DeltaSignCheck {
        lhs_value: parity * delta.value,
        rhs_value: rhs.value,
        lhs_sign,
        rhs_sign,
        agree: lhs_sign == rhs_sign,
        finite_difference: delta_fd(kp, n, x, y, step)?,
    })
}
