//! Sign scans of D^n_{b,d} over logarithmic z-grids.

use super::{det_d_scaled, DetParams};
use crate::error::Result;
use crate::report::{csv_line, fmt_real};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Relative noise floor on the equilibrated determinant.
pub const EPS_SIGN: f64 = 1e-9;
pub const DEFAULT_SCAN_POINTS: usize = 121;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignScan {
    pub params: DetParams,
    pub z_values: Vec<f64>,
    pub det_values: Vec<f64>,
    /// Absolute magnitude below which a value is treated as zero.
    pub noise_floor: Vec<f64>,
    pub signs: Vec<i8>,
    /// Pairs (i, j) of consecutive nonzero signs that differ.
    pub sign_changes: Vec<(usize, usize)>,
}

impl SignScan {
    pub fn has_negative(&self) -> bool {
        self.signs.contains(&-1)
    }

    pub fn all_positive(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// Changes from - to +.
    pub fn rising_changes(&self) -> usize {
        self.sign_changes.iter().filter(|&&(i, _)| self.signs[i] < 0).count()
    }

    pub fn csv_header() -> &'static str {
        "z,value,sign\n"
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for ((z, v), s) in self.z_values.iter().zip(&self.det_values).zip(&self.signs) {
            out.push_str(&csv_line([fmt_real(*z), fmt_real(*v), s.to_string()]));
        }
        out
    }
}

/// `points` logarithmically spaced values from `z_min` to `z_max`.
pub fn log_grid(z_min: f64, z_max: f64, points: usize) -> Vec<f64> {
    assert!(z_min > 0.0 && z_max > z_min && points >= 2, "invalid grid");
    let (l0, l1) = (z_min.log10(), z_max.log10());
    (0..points)
        .map(|i| {
            if i == 0 {
                z_min
            } else if i == points - 1 {
                z_max
            } else {
                10f64.powf(l0 + (l1 - l0) * i as f64 / (points - 1) as f64)
            }
        })
        .collect()
}

pub fn sign_scan(p: DetParams, z_min: f64, z_max: f64, points: usize) -> Result<SignScan> {
    sign_scan_on(p, &log_grid(z_min, z_max, points))
}

pub fn sign_scan_on(p: DetParams, z_values: &[f64]) -> Result<SignScan> {
    let evals: Vec<_> = z_values.par_iter().map(|&z| det_d_scaled(p, z)).collect::<Result<_>>()?;
    let det_values = evals.iter().map(|e| e.value).collect();
    let noise_floor = evals.iter().map(|e| e.floor(EPS_SIGN)).collect();
    let signs: Vec<i8> = evals.iter().map(|e| e.sign_with_floor(EPS_SIGN)).collect();
    let mut sign_changes = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &s) in signs.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if let Some(j) = last {
            if signs[j] != s {
                sign_changes.push((j, i));
            }
        }
        last = Some(i);
    }
    Ok(SignScan { params: p, z_values: z_values.to_vec(), det_values, noise_floor, signs, sign_changes })
}

/// Largest n <= n_max such that D^1, ..., D^n show no strictly negative value
/// on the grid.
pub fn empirical_order(b: f64, d: f64, n_max: usize, z_values: &[f64]) -> Result<usize> {
    for m in 1..=n_max {
        if sign_scan_on(DetParams::new(m, b, d)?, z_values)?.has_negative() {
            return Ok(m - 1);
        }
    }
    Ok(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(n: usize, d: f64, b: f64) -> SignScan {
        sign_scan(DetParams::new(n, b, d).unwrap(), 1e-6, 1e6, DEFAULT_SCAN_POINTS).unwrap()
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-6, 1e6, 121);
        assert_eq!(g.len(), 121);
        assert_eq!((g[0], g[120]), (1e-6, 1e6));
        assert!((g[60] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn documented_scans() {
        assert!(scan(1, 0.5, 0.5).all_positive());
        let s = scan(1, -0.5, 0.5);
        assert_eq!(s.sign_changes.len(), 1);
        assert_eq!(s.rising_changes(), 1);
        assert!(scan(2, 1.5, 0.5).all_positive());
    }
}
