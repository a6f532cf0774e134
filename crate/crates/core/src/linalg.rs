//! Small dense determinants.
//!
//! LU factorization with full pivoting where every Schur-complement entry is
//! recomputed from the original matrix by a compensated dot product, so the
//! rounding error does not accumulate across elimination steps.

use twofloat::TwoFloat;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn try_from_fn<E, F: FnMut(usize, usize) -> Result<f64, E>>(n: usize, mut f: F) -> Result<Self, E> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j)?;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.concat() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// Principal-index submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dot product evaluated as if in twice the working precision.
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (a, b) in x.iter().zip(y) {
        let p = a * b;
        let pe = a.mul_add(*b, -p);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

/// Outcome of a determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    /// ln |det|, `-inf` when a pivot is exactly zero.
    pub ln_abs: f64,
    /// Sign in {-1, 0, 1}.
    pub sign: f64,
    /// A pivot fell below `1e-14` times the norm of its row.
    pub near_singular: bool,
    product: f64,
}

impl DetResult {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else if self.product.is_normal() {
            self.product
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// Determinant by full-pivoting LU.
pub fn det_lu(m: &Matrix) -> DetResult {
    let n = m.n;
    if n == 0 {
        return DetResult { ln_abs: 0.0, sign: 1.0, near_singular: false, product: 1.0 };
    }
    let row_norm: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m.get(i, j).abs()).fold(0.0, f64::max)).collect();
    let mut rperm: Vec<usize> = (0..n).collect();
    let mut cperm: Vec<usize> = (0..n).collect();
    // l[i][p] for the original row index, u[p][j] for the original column index
    let mut l = vec![vec![0.0; n]; n];
    let mut u = vec![vec![0.0; n]; n];
    let mut sign = 1.0;
    let mut ln_abs = 0.0;
    let mut near_singular = false;
    let mut product = 1.0;
    let mut lbuf = vec![0.0; n];
    let mut ubuf = vec![0.0; n];
    let schur = |i: usize, j: usize, k: usize, rperm: &[usize], cperm: &[usize], l: &[Vec<f64>], u: &[Vec<f64>], lb: &mut [f64], ub: &mut [f64]| {
        let (ri, cj) = (rperm[i], cperm[j]);
        for p in 0..k {
            lb[p] = l[ri][p];
            ub[p] = -u[p][cj];
        }
        lb[k] = m.get(ri, cj);
        ub[k] = 1.0;
        dot2(&lb[..=k], &ub[..=k])
    };
    for k in 0..n {
        let mut best = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = schur(i, j, k, &rperm, &cperm, &l, &u, &mut lbuf, &mut ubuf).abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.0 != k {
            rperm.swap(k, best.0);
            sign = -sign;
        }
        if best.1 != k {
            cperm.swap(k, best.1);
            sign = -sign;
        }
        let pivot = schur(k, k, k, &rperm, &cperm, &l, &u, &mut lbuf, &mut ubuf);
        if pivot == 0.0 {
            return DetResult { ln_abs: f64::NEG_INFINITY, sign: 0.0, near_singular: true, product: 0.0 };
        }
        if pivot.abs() < 1e-14 * row_norm[rperm[k]] {
            near_singular = true;
        }
        sign *= pivot.signum();
        product *= pivot;
        ln_abs += pivot.abs().ln();
        for j in k..n {
            u[k][cperm[j]] = schur(k, j, k, &rperm, &cperm, &l, &u, &mut lbuf, &mut ubuf);
        }
        for i in (k + 1)..n {
            let v = schur(i, k, k, &rperm, &cperm, &l, &u, &mut lbuf, &mut ubuf);
            l[rperm[i]][k] = v / pivot;
        }
    }
    let product = if (product > 0.0) == (sign > 0.0) { product } else { -product };
    DetResult { ln_abs, sign, near_singular, product }
}

pub fn det(m: &Matrix) -> f64 {
    det_lu(m).value()
}

/// Determinant together with a first-order bound on its sensitivity to
/// relative perturbations of the entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDet {
    pub value: f64,
    /// ln |det| of the row- and column-equilibrated matrix.
    pub ln_abs_equilibrated: f64,
    /// ln of the product of the equilibration scales.
    pub ln_scale: f64,
    /// ln of sum_ij |a_ij C_ij| for the equilibrated matrix, C the cofactors.
    pub ln_sensitivity: f64,
    pub sign: f64,
    pub near_singular: bool,
}

impl ScaledDet {
    /// Sign, or 0 when |det| is at most `eps` times the sensitivity, i.e. when
    /// relative entry errors of size `eps` could flip it.
    pub fn sign_with_floor(&self, eps: f64) -> i8 {
        if self.sign == 0.0 || self.ln_abs_equilibrated <= eps.ln() + self.ln_sensitivity {
            0
        } else if self.sign > 0.0 {
            1
        } else {
            -1
        }
    }

    /// The noise floor in absolute terms.
    pub fn floor(&self, eps: f64) -> f64 {
        eps * (self.ln_sensitivity + self.ln_scale).exp()
    }

    /// |det| divided by the sensitivity.
    pub fn relative_magnitude(&self) -> f64 {
        (self.ln_abs_equilibrated - self.ln_sensitivity).exp()
    }
}

/// sum_ij |a_ij C_ij| where C_ij are the cofactors of `m`.
pub fn cofactor_sensitivity(m: &Matrix) -> f64 {
    let n = m.n;
    if n <= 1 {
        return m.data.first().map_or(1.0, |v| v.abs());
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = m.get(i, j);
            if a == 0.0 {
                continue;
            }
            let minor = Matrix::from_fn(n - 1, |r, c| {
                let rr = if r < i { r } else { r + 1 };
                let cc = if c < j { c } else { c + 1 };
                m.get(rr, cc)
            });
            total += (a * det(&minor)).abs();
        }
    }
    total
}

/// Determinant after scaling every row, then every column, to unit max-norm.
pub fn det_equilibrated(m: &Matrix) -> ScaledDet {
    let ln_abs = Matrix::from_fn(m.n, |i, j| m.get(i, j).abs().ln());
    let signs = Matrix::from_fn(m.n, |i, j| m.get(i, j).signum());
    det_equilibrated_log(&ln_abs, &signs)
}

/// Potentials `(u, v)` of the minimum-cost assignment for `cost`, satisfying
/// `u_i + v_j <= cost_ij` with equality on the optimal matching, and the
/// matched column of every row.
fn assignment_potentials(cost: &Matrix) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let n = cost.n;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[matched[j] - 1] = j - 1;
    }
    (u[1..].to_vec(), v[1..].to_vec(), col_of_row)
}

/// Cost assigned to exact zeros in the assignment problem.
const ZERO_COST: f64 = 1e12;

/// [`det_equilibrated`] for a matrix given entrywise as `sign * exp(ln_abs)`,
/// so that entries beyond the floating range can still be combined.
///
/// Rows and columns are scaled by the dual potentials of the maximum-product
/// assignment, which makes the matched entries 1 and every other entry at
/// most 1 in modulus before the LU factorization.
pub fn det_equilibrated_log(ln_abs: &Matrix, signs: &Matrix) -> ScaledDet {
    let n = ln_abs.n;
    if n == 0 {
        return ScaledDet { value: 1.0, ln_abs_equilibrated: 0.0, ln_scale: 0.0, ln_sensitivity: 0.0, sign: 1.0, near_singular: false };
    }
    let cost = Matrix::from_fn(n, |i, j| {
        let l = ln_abs.get(i, j);
        if signs.get(i, j) == 0.0 || l == f64::NEG_INFINITY {
            ZERO_COST
        } else {
            -l
        }
    });
    let (u, v, col_of_row) = assignment_potentials(&cost);
    let ln_scale = -(u.iter().sum::<f64>() + v.iter().sum::<f64>());
    let a = Matrix::from_fn(n, |i, j| {
        let s = signs.get(i, j);
        if s == 0.0 || cost.get(i, j) >= ZERO_COST {
            0.0
        } else {
            s * (u[i] + v[j] - cost.get(i, j)).min(0.0).exp()
        }
    });
    let structurally_singular = (0..n).any(|i| cost.get(i, col_of_row[i]) >= ZERO_COST);
    let r = det_lu(&a);
    if structurally_singular || r.sign == 0.0 {
        return ScaledDet { value: 0.0, ln_abs_equilibrated: f64::NEG_INFINITY, ln_scale, ln_sensitivity: 0.0, sign: 0.0, near_singular: true };
    }
    let value = r.sign * (r.ln_abs + ln_scale).exp();
    let ln_sensitivity = cofactor_sensitivity(&a).ln();
    ScaledDet { value, ln_abs_equilibrated: r.ln_abs, ln_scale, ln_sensitivity, sign: r.sign, near_singular: r.near_singular }
}

/// Determinant in double-double arithmetic by Gaussian elimination with
/// partial pivoting. `rows` must be square.
pub fn det_twofloat(mut rows: Vec<Vec<TwoFloat>>) -> TwoFloat {
    let n = rows.len();
    let mut det = TwoFloat::from(1.0);
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| rows[a][k].abs().hi().total_cmp(&rows[b][k].abs().hi())).unwrap_or(k);
        if rows[p][k].hi() == 0.0 {
            return TwoFloat::from(0.0);
        }
        if p != k {
            rows.swap(p, k);
            det = -det;
        }
        let pivot = rows[k][k];
        det *= pivot;
        for i in k + 1..n {
            let factor = div_twofloat(rows[i][k], pivot);
            for j in k + 1..n {
                let t = rows[k][j] * factor;
                rows[i][j] -= t;
            }
        }
    }
    det
}

/// a / b to double-double accuracy; the crate's quotient of two
/// double-doubles is only accurate to about one ulp of f64.
pub fn div_twofloat(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

/// Rising factorial (x)_k in double-double arithmetic.
pub fn pochhammer_twofloat(x: TwoFloat, k: usize) -> TwoFloat {
    (0..k).fold(TwoFloat::from(1.0), |acc, i| acc * (x + i as f64))
}
