//! Turán-type inequalities for Psi(a, c, x): the Hölder baseline, the two
//! corollaries of the TP_2 classification, the cited comparison bounds and
//! a counterexample search.

use crate::error::{Error, Result};
use crate::report::{csv_line, fmt_real};
use crate::specialfn::{psi_derivative, tricomi_psi, PsiArgs};
use crate::tpkernel::trial_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative tolerance on inequality margins.
pub const EPS_SIGN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub name: String,
    pub a: f64,
    pub c: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs
    pub margin: f64,
    pub holds: bool,
}

impl InequalityRecord {
    pub fn new(name: &str, (a, c, x): (f64, f64, f64), lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let holds = margin >= -EPS_SIGN * lhs.abs().max(rhs.abs());
        Self { name: name.to_string(), a, c, x, lhs, rhs, margin, holds }
    }

    /// margin / max(|lhs|, |rhs|)
    pub fn relative_margin(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs());
        if scale > 0.0 {
            self.margin / scale
        } else {
            0.0
        }
    }

    pub fn csv_header() -> &'static str {
        "name,a,c,x,lhs,rhs,margin,holds\n"
    }

    pub fn csv_row(&self) -> String {
        csv_line([
            self.name.clone(),
            fmt_real(self.a),
            fmt_real(self.c),
            fmt_real(self.x),
            fmt_real(self.lhs),
            fmt_real(self.rhs),
            fmt_real(self.margin),
            self.holds.to_string(),
        ])
    }
}

pub fn records_csv(records: &[InequalityRecord]) -> String {
    let mut out = InequalityRecord::csv_header().to_string();
    for r in records {
        out.push_str(&r.csv_row());
    }
    out
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be positive, got {x}")))
    }
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("a must be positive, got {a}")))
    }
}

/// Psi(a,c)^2 <= Psi(a,c-1) Psi(a,c+1), valid for a > 0 and all real c.
pub fn holder_turan(a: f64, c: f64, x: f64) -> Result<InequalityRecord> {
    check_a(a)?;
    check_x(x)?;
    let p = tricomi_psi(a, c, x)?;
    let rhs = tricomi_psi(a, c - 1.0, x)? * tricomi_psi(a, c + 1.0, x)?;
    Ok(InequalityRecord::new("holder", (a, c, x), p * p, rhs))
}

/// Psi(a,c-1) Psi(a,c+1) - Psi(a,c)^2 <= Psi(a,c) Psi(a,c-1) / x at any a > 0, c,
/// without checking the validity region.
pub fn turan_bound(a: f64, c: f64, x: f64) -> Result<InequalityRecord> {
    check_a(a)?;
    check_x(x)?;
    let (lo, mid, hi) = (tricomi_psi(a, c - 1.0, x)?, tricomi_psi(a, c, x)?, tricomi_psi(a, c + 1.0, x)?);
    Ok(InequalityRecord::new("turan", (a, c, x), lo * hi - mid * mid, mid * lo / x))
}

/// a >= 1, or a > 0 and c <= a + 2.
pub fn corollary1_region(a: f64, c: f64) -> bool {
    a >= 1.0 || (a > 0.0 && c <= a + 2.0)
}

/// The Turán bound on its validity region.
pub fn corollary1(a: f64, c: f64, x: f64) -> Result<InequalityRecord> {
    if !corollary1_region(a, c) {
        return Err(Error::Region(format!("corollary 1 needs a >= 1 or c <= a + 2, got a = {a}, c = {c}")));
    }
    let mut r = turan_bound(a, c, x)?;
    r.name = "corollary1".into();
    Ok(r)
}

/// a > 1 and c < 1 + a.
pub fn corollary2_region(a: f64, c: f64) -> bool {
    a > 1.0 && c < 1.0 + a
}

/// Bound on the contiguous-in-(a, c) Turanian and the inequality it refines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corollary2 {
    /// Psi(a-1,c-1) Psi(a+1,c+1) - Psi(a,c)^2 <= Psi(a,c) Psi(a+1,c+1).
    pub bound: InequalityRecord,
    /// Psi(a,c)^2 <= Psi(a-1,c-1) Psi(a+1,c+1).
    pub baseline: InequalityRecord,
}

impl Corollary2 {
    pub fn holds(&self) -> bool {
        self.bound.holds && self.baseline.holds
    }
}

/// The Kummer transform of the Turán bound: with a' = 1+a-c and c' = 2-c it
/// becomes the bound below, on a > 1, c < 1+a.
pub fn corollary2(a: f64, c: f64, x: f64) -> Result<Corollary2> {
    if !corollary2_region(a, c) {
        return Err(Error::Region(format!("corollary 2 needs a > 1 and c < 1 + a, got a = {a}, c = {c}")));
    }
    check_x(x)?;
    let p = tricomi_psi(a, c, x)?;
    let lo = tricomi_psi(a - 1.0, c - 1.0, x)?;
    let hi = tricomi_psi(a + 1.0, c + 1.0, x)?;
    Ok(Corollary2 {
        bound: InequalityRecord::new("corollary2", (a, c, x), lo * hi - p * p, p * hi),
        baseline: InequalityRecord::new("tric1", (a, c, x), p * p, lo * hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitedBound {
    /// a / (c (c-a-1)) Psi(a,c)^2 on a > 0 > c.
    NegativeC,
    /// Psi(a,c)^2 / (c-2) on a > c-1 > 1.
    LargeC,
}

impl CitedBound {
    pub fn applies(self, a: f64, c: f64) -> bool {
        match self {
            CitedBound::NegativeC => a > 0.0 && c < 0.0,
            CitedBound::LargeC => a > c - 1.0 && c - 1.0 > 1.0,
        }
    }

    fn coefficient(self, a: f64, c: f64) -> f64 {
        match self {
            CitedBound::NegativeC => a / (c * (c - a - 1.0)),
            CitedBound::LargeC => 1.0 / (c - 2.0),
        }
    }

    /// x beyond which the Turán bound is provably the smaller one.
    pub fn threshold(self, a: f64, c: f64) -> f64 {
        match self {
            CitedBound::NegativeC => c * (c - a - 1.0) / a,
            CitedBound::LargeC => c - 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub which: CitedBound,
    pub corollary: InequalityRecord,
    pub cited: InequalityRecord,
    pub threshold: f64,
    /// corollary rhs < cited rhs
    pub corollary_tighter: bool,
}

/// Evaluates each cited bound that applies at (a, c) next to the Turán bound.
pub fn comparison_bounds(a: f64, c: f64, x: f64) -> Result<Vec<Comparison>> {
    let kinds: Vec<CitedBound> = [CitedBound::NegativeC, CitedBound::LargeC].into_iter().filter(|k| k.applies(a, c)).collect();
    if kinds.is_empty() {
        return Err(Error::Region(format!("no cited bound applies at a = {a}, c = {c}")));
    }
    let corollary = corollary1(a, c, x)?;
    let p = tricomi_psi(a, c, x)?;
    Ok(kinds
        .into_iter()
        .map(|which| {
            let name = match which {
                CitedBound::NegativeC => "cited_negative_c",
                CitedBound::LargeC => "cited_large_c",
            };
            let cited = InequalityRecord::new(name, (a, c, x), corollary.lhs, which.coefficient(a, c) * p * p);
            Comparison {
                which,
                threshold: which.threshold(a, c),
                corollary_tighter: corollary.rhs < cited.rhs,
                corollary: corollary.clone(),
                cited,
            }
        })
        .collect())
}

/// g(x) = e^{-x} Psi(a, c-1, x) and its first two derivatives, obtained from
/// the contiguous relations g' = -g_{a,c+1}, g'' = g_{a,c+2} and, independently,
/// from z-derivatives of Psi. All values carry the common factor e^{x}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GDerivation {
    pub a: f64,
    pub c: f64,
    pub x: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub g1_direct: f64,
    pub g2_direct: f64,
    /// g (x^2 g'' + x g')
    pub lhs: f64,
    /// (x g')^2
    pub rhs: f64,
}

impl GDerivation {
    pub fn derivative_residual(&self) -> f64 {
        ((self.g1 - self.g1_direct).abs() / self.g1.abs()).max((self.g2 - self.g2_direct).abs() / self.g2.abs())
    }

    pub fn holds(&self) -> bool {
        self.rhs - self.lhs >= -EPS_SIGN * self.lhs.abs().max(self.rhs.abs())
    }
}

pub fn g_derivation(a: f64, c: f64, x: f64) -> Result<GDerivation> {
    check_a(a)?;
    check_x(x)?;
    let g = tricomi_psi(a, c - 1.0, x)?;
    let g1 = -tricomi_psi(a, c, x)?;
    let g2 = tricomi_psi(a, c + 1.0, x)?;
    let args = PsiArgs::from_standard(a, c - 1.0)?;
    let d1 = psi_derivative(args, x, 1)?;
    let d2 = psi_derivative(args, x, 2)?;
    Ok(GDerivation {
        a,
        c,
        x,
        g,
        g1,
        g2,
        g1_direct: d1 - g,
        g2_direct: d2 - 2.0 * d1 + g,
        lhs: g * (x * x * g2 + x * g1),
        rhs: (x * g1).powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    Holder,
    Corollary1,
    Corollary2,
    Tric1,
}

impl Inequality {
    pub fn region_contains(self, a: f64, c: f64) -> bool {
        match self {
            Inequality::Holder => a > 0.0,
            Inequality::Corollary1 => corollary1_region(a, c),
            Inequality::Corollary2 | Inequality::Tric1 => corollary2_region(a, c),
        }
    }

    pub fn evaluate(self, a: f64, c: f64, x: f64) -> Result<InequalityRecord> {
        match self {
            Inequality::Holder => holder_turan(a, c, x),
            Inequality::Corollary1 => corollary1(a, c, x),
            Inequality::Corollary2 => corollary2(a, c, x).map(|r| r.bound),
            Inequality::Tric1 => corollary2(a, c, x).map(|r| r.baseline),
        }
    }

    /// Parameter box sampled around the region: a, c and log10 x ranges.
    fn sampling_box(self) -> ((f64, f64), (f64, f64)) {
        match self {
            Inequality::Holder | Inequality::Corollary1 => ((0.0, 10.0), (-10.0, 12.0)),
            Inequality::Corollary2 | Inequality::Tric1 => ((1.0, 10.0), (-10.0, 11.0)),
        }
    }
}

/// Points (a, c, x) on a 5 x 5 x 7 grid of the region with x in [1e-3, 1e3].
pub fn default_grid(kind: Inequality) -> Vec<(f64, f64, f64)> {
    let ((a0, a1), (c0, c1)) = kind.sampling_box();
    let lin = |lo: f64, hi: f64, k: usize, n: usize| lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
    let mut out = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let (a, c) = (lin(a0, a1, i, 5), lin(c0, c1, j, 5));
            if !kind.region_contains(a, c) {
                continue;
            }
            out.extend((0..7).map(|k| (a, c, 10f64.powi(k as i32 - 3))));
        }
    }
    out
}

/// `n` points drawn uniformly from the region intersected with the sampling
/// box, x log-uniform on [1e-3, 1e3].
pub fn sample_region(kind: Inequality, n: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let ((a0, a1), (c0, c1)) = kind.sampling_box();
    let mut rng = trial_rng(seed, 0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = a0 + (a1 - a0) * rng.random::<f64>();
        let c = c0 + (c1 - c0) * rng.random::<f64>();
        let x = 10f64.powf(-3.0 + 6.0 * rng.random::<f64>());
        if a > a0 && kind.region_contains(a, c) {
            out.push((a, c, x));
        }
    }
    out
}

/// Evaluates `kind` at every point, in order.
pub fn check_points(kind: Inequality, points: &[(f64, f64, f64)]) -> Result<Vec<InequalityRecord>> {
    points.par_iter().map(|&(a, c, x)| kind.evaluate(a, c, x)).collect()
}

/// (a, c - a, x) box searched for violations of the Turán bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub a: (f64, f64),
    /// range of c - a
    pub c_offset: (f64, f64),
    pub x: (f64, f64),
}

impl SearchRegion {
    const X_RANGE: (f64, f64) = (1e-3, 1e3);

    /// a < 1 and c > a + 1.
    pub fn falsity() -> Self {
        Self { a: (0.05, 0.95), c_offset: (1.05, 5.0), x: Self::X_RANGE }
    }

    /// a >= 1, a subset of the validity region of the bound.
    pub fn validity() -> Self {
        Self { a: (1.0, 5.0), c_offset: (-3.0, 5.0), x: Self::X_RANGE }
    }

    /// The single parameter point (a, c).
    pub fn point(a: f64, c: f64) -> Self {
        Self { a: (a, a), c_offset: (c - a, c - a), x: Self::X_RANGE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub evaluations: usize,
    /// Point of smallest relative margin.
    pub worst: Option<InequalityRecord>,
    /// The worst point, if it violates the bound.
    pub violation: Option<InequalityRecord>,
}

const GRID_MAX: usize = 50;
const REFINE_STEPS: usize = 40;

fn axis(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    if n == 1 || lo == hi {
        return vec![if log { (lo * hi).sqrt() } else { 0.5 * (lo + hi) }];
    }
    let (l, h) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    (0..n)
        .map(|i| {
            let t = l + (h - l) * i as f64 / (n - 1) as f64;
            if log {
                t.exp()
            } else {
                t
            }
        })
        .collect()
}

fn better(r: &InequalityRecord, best: &Option<InequalityRecord>) -> bool {
    best.as_ref().is_none_or(|b| r.relative_margin() < b.relative_margin())
}

/// Grid over the region, at most 50 points per axis within the budget, then
/// golden-section refinement in log x around the worst grid point.
pub fn counterexample_search(region: SearchRegion, budget: usize) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(Error::Domain("search budget must be at least 1".into()));
    }
    let (xl, xh) = region.x;
    if !(xl > 0.0 && xh >= xl && region.a.0 > 0.0 && region.a.1 >= region.a.0 && region.c_offset.1 >= region.c_offset.0) {
        return Err(Error::Domain(format!("invalid search region {region:?}")));
    }
    let free = [region.a.0 < region.a.1, region.c_offset.0 < region.c_offset.1, xl < xh].iter().filter(|&&f| f).count();
    let grid_budget = budget.saturating_sub(REFINE_STEPS).max(1);
    let per_axis = if free == 0 { 1 } else { ((grid_budget as f64).powf(1.0 / free as f64).floor() as usize).clamp(1, GRID_MAX) };
    let a_axis = axis(region.a.0, region.a.1, per_axis, false);
    let t_axis = axis(region.c_offset.0, region.c_offset.1, per_axis, false);
    let x_axis = axis(xl, xh, per_axis, true);
    let mut points = Vec::with_capacity(a_axis.len() * t_axis.len() * x_axis.len());
    for &a in &a_axis {
        for &t in &t_axis {
            for (k, &x) in x_axis.iter().enumerate() {
                points.push((a, a + t, x, k));
            }
        }
    }
    points.truncate(budget);
    let records: Vec<Option<InequalityRecord>> = points.par_iter().map(|&(a, c, x, _)| turan_bound(a, c, x).ok()).collect();
    let mut evaluations = points.len();
    let mut worst: Option<InequalityRecord> = None;
    let mut worst_k = 0;
    for (r, p) in records.into_iter().zip(&points) {
        if let Some(r) = r {
            if better(&r, &worst) {
                worst = Some(r);
                worst_k = p.3;
            }
        }
    }
    if let Some(w) = worst.clone() {
        let lo = x_axis[worst_k.saturating_sub(1)].ln();
        let hi = x_axis[(worst_k + 1).min(x_axis.len() - 1)].ln();
        let steps = budget.saturating_sub(evaluations).min(REFINE_STEPS);
        if hi > lo && steps >= 2 {
            let eval = |lx: f64| turan_bound(w.a, w.c, lx.exp()).ok();
            let score = |r: &Option<InequalityRecord>| r.as_ref().map_or(f64::INFINITY, InequalityRecord::relative_margin);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let (mut l, mut h) = (lo, hi);
            let (mut m1, mut m2) = (h - phi * (h - l), l + phi * (h - l));
            let (mut r1, mut r2) = (eval(m1), eval(m2));
            evaluations += 2;
            for _ in 2..steps {
                if score(&r1) < score(&r2) {
                    h = m2;
                    m2 = m1;
                    r2 = r1.take();
                    m1 = h - phi * (h - l);
                    r1 = eval(m1);
                } else {
                    l = m1;
                    m1 = m2;
                    r1 = r2.take();
                    m2 = l + phi * (h - l);
                    r2 = eval(m2);
                }
                evaluations += 1;
            }
            for r in [r1, r2].into_iter().flatten() {
                if better(&r, &worst) {
                    worst = Some(r);
                }
            }
        }
    }
    let violation = worst.clone().filter(|w| !w.holds);
    Ok(SearchOutcome { evaluations, worst, violation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_tolerance() {
        assert!(InequalityRecord::new("t", (1.0, 1.0, 1.0), 1.0, 1.0 - 1e-11).holds);
        assert!(!InequalityRecord::new("t", (1.0, 1.0, 1.0), 1.0, 1.0 - 1e-9).holds);
        let r = InequalityRecord::new("t", (1.0, 2.0, 3.0), 0.5, 0.25);
        assert_eq!(r.margin, -0.25);
        assert_eq!(r.relative_margin(), -0.5);
    }

    #[test]
    fn csv_format() {
        let r = InequalityRecord::new("holder", (2.0, 3.0, 5.0), 0.0016, 0.002);
        let csv = records_csv(&[r]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("name,a,c,x,lhs,rhs,margin,holds"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 8);
        assert_eq!(row[0], "holder");
        assert_eq!(row[1].parse::<f64>().unwrap(), 2.0);
        assert_eq!(row[7], "true");
    }

    #[test]
    fn regions() {
        assert!(corollary1_region(2.0, 10.0) && corollary1_region(0.5, 2.5) && !corollary1_region(0.5, 2.6));
        assert!(corollary2_region(1.5, 2.4) && !corollary2_region(1.0, 0.0) && !corollary2_region(2.0, 3.0));
        assert!(matches!(corollary1(0.5, 3.0, 1.0), Err(Error::Region(_))));
        assert!(matches!(corollary2(0.5, 0.0, 1.0), Err(Error::Region(_))));
        assert!(matches!(comparison_bounds(1.0, 1.0, 1.0), Err(Error::Region(_))));
    }

    #[test]
    fn axes() {
        assert_eq!(axis(2.0, 2.0, 10, false), vec![2.0]);
        let x = axis(1e-3, 1e3, 7, true);
        assert_eq!(x.len(), 7);
        assert!((x[3] - 1.0).abs() < 1e-12);
    }
}
