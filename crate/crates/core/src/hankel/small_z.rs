//! Leading behaviour of D^n_{b,d}(z) as z -> 0+ on the squares E_n^- and
//! E_n^+.
//!
//! On E_{n,p}^- = {p-2 < d < p-1, n-p < b < n+1-p} write delta = b+n-d and
//! q = n+1-p. The diagonal d = b + 2(p-1) - n splits the square into an upper
//! triangle (d below the diagonal) and a lower one.

use super::lemmas::{lemma2_closed, lemma3_closed};
use super::DetParams;
use crate::error::{Error, Result};
use crate::specialfn::{gamma, log_gamma};
use crate::staircase::{e_minus_square, e_plus_square, PlanePoint};
use serde::{Deserialize, Serialize};

/// Distance from integer lines and from the diagonal required for a
/// prediction.
pub const REGION_MARGIN: f64 = 1e-3;
const DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubRegion {
    Upper,
    Lower,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZRegion {
    Minus { p: u32, sub: SubRegion },
    Plus { k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallZPrediction {
    pub region: ZRegion,
    pub sign: i8,
    pub divergent: bool,
    /// Power of z in the leading term.
    pub exponent: Option<f64>,
    /// Multiplicity of (-ln z) in the leading term.
    pub log_flag: u8,
    pub coefficient: Option<f64>,
}

impl SmallZPrediction {
    /// coefficient z^exponent (-ln z)^log_flag, when fully determined.
    pub fn leading(&self, z: f64) -> Option<f64> {
        let mut v = self.coefficient? * z.powf(self.exponent?);
        if self.log_flag == 1 {
            v *= -z.ln();
        }
        Some(v)
    }
}

fn off_integer(x: f64) -> bool {
    (x - x.round()).abs() >= REGION_MARGIN
}

pub fn locate_region(n: usize, d: f64, b: f64) -> Result<ZRegion> {
    if !off_integer(d) || !off_integer(b) {
        return Err(Error::Region(format!("(d, b) = ({d}, {b}) is within {REGION_MARGIN} of an integer line")));
    }
    let pt = PlanePoint::new(d, b);
    if let Some(p) = e_minus_square(pt, n as u32) {
        let diag = b + 2.0 * (p as f64 - 1.0) - n as f64;
        let gap = d - diag;
        let sub = if gap.abs() <= DIAGONAL_TOL {
            SubRegion::Diagonal
        } else if gap.abs() < REGION_MARGIN {
            return Err(Error::Region(format!("(d, b) = ({d}, {b}) is within {REGION_MARGIN} of the diagonal")));
        } else if gap < 0.0 {
            SubRegion::Upper
        } else {
            SubRegion::Lower
        };
        return Ok(ZRegion::Minus { p, sub });
    }
    if let Some(k) = e_plus_square(pt, n as u32) {
        return Ok(ZRegion::Plus { k });
    }
    Err(Error::Region(format!("(d, b) = ({d}, {b}) lies in neither E_{n}^- nor E_{n}^+")))
}

fn recip_gamma_pow(b: f64, k: usize) -> Result<f64> {
    let (lg, _) = log_gamma(b)?;
    Ok((-(k as f64) * lg).exp())
}

pub fn small_z_prediction(p: DetParams) -> Result<SmallZPrediction> {
    let DetParams { n, b, d } = p;
    let region = locate_region(n, d, b)?;
    let ZRegion::Minus { p: pi, sub } = region else {
        return Ok(SmallZPrediction { region, sign: 1, divergent: true, exponent: None, log_flag: 0, coefficient: None });
    };
    let pi = pi as usize;
    let q = n + 1 - pi;
    let qf = q as f64;
    let delta = b + n as f64 - d;
    let (exponent, log_flag, coefficient) = match sub {
        SubRegion::Upper => {
            let mut c = lemma2_closed(q, b, d + 1.0 - pi as f64)? * recip_gamma_pow(b, q + 1)?;
            if pi > 1 {
                c *= lemma3_closed(n, pi - 2, b, d)?;
            }
            ((qf + 1.0) * (qf - delta), 0, Some(c))
        }
        SubRegion::Lower => {
            let c = if n == 1 {
                Some(d * gamma(b - d + 1.0)? * gamma(d + 1.0 - b)? / (gamma(b)? * gamma(d + 1.0)?))
            } else {
                None
            };
            (qf * (qf - 1.0 - delta), 0, c)
        }
        SubRegion::Diagonal => {
            let c = if n == 1 { Some(d * gamma(b - d + 1.0)? * recip_gamma_pow(b, 2)?) } else { None };
            (-qf * (qf + 1.0), 1, c)
        }
    };
    Ok(SmallZPrediction { region, sign: -1, divergent: true, exponent: Some(exponent), log_flag, coefficient })
}
