//! Staircases E_n in the (d, b) half-plane, the lattice R and the
//! total-positivity classification they induce.

use crate::error::{Error, Result};
use crate::report::{csv_line, fmt_real};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point `(d, b)` of the half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub d: f64,
    pub b: f64,
}

impl PlanePoint {
    pub fn new(d: f64, b: f64) -> Self {
        Self { d, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A closed axis-aligned segment; infinite ends carry `-inf` or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub orientation: Orientation,
    pub infinite: bool,
}

impl Segment {
    fn horizontal(y: f64, x0: f64, x1: f64) -> Self {
        let infinite = x0.is_infinite() || x1.is_infinite();
        Self { x0, y0: y, x1, y1: y, orientation: Orientation::Horizontal, infinite }
    }

    fn vertical(x: f64, y0: f64, y1: f64) -> Self {
        Self { x0: x, y0, x1: x, y1, orientation: Orientation::Vertical, infinite: false }
    }

    fn x_max(&self) -> f64 {
        self.x0.max(self.x1)
    }

    fn y_max(&self) -> f64 {
        self.y0.max(self.y1)
    }
}

/// The polyline E_n, ordered from `(-inf, n)` down to `(+inf, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Staircase {
    pub n: u32,
    pub segments: Vec<Segment>,
}

impl Staircase {
    pub fn finite_steps(&self) -> usize {
        self.segments.iter().filter(|s| s.orientation == Orientation::Horizontal && !s.infinite).count()
    }

    pub fn risers(&self) -> usize {
        self.segments.iter().filter(|s| s.orientation == Orientation::Vertical).count()
    }

    pub fn csv_header() -> &'static str {
        "n,segment_index,x0,y0,x1,y1,infinite_flag\n"
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.segments.iter().enumerate() {
            out.push_str(&csv_line([
                self.n.to_string(),
                i.to_string(),
                fmt_real(s.x0),
                fmt_real(s.y0),
                fmt_real(s.x1),
                fmt_real(s.y1),
                u8::from(s.infinite).to_string(),
            ]));
        }
        out
    }
}

/// Segment list of E_n.
pub fn staircase(n: u32) -> Staircase {
    assert!(n >= 1, "staircase order must be positive");
    let nf = n as f64;
    let mut segments = vec![Segment::horizontal(nf, f64::NEG_INFINITY, 0.0)];
    for x in 0..n {
        let xf = x as f64;
        segments.push(Segment::vertical(xf, nf - xf, nf - xf - 1.0));
        if x + 1 < n {
            segments.push(Segment::horizontal(nf - xf - 1.0, xf, xf + 1.0));
        }
    }
    segments.push(Segment::horizontal(0.0, nf - 1.0, f64::INFINITY));
    Staircase { n, segments }
}

/// `(d, b) >= E_n`: every point `(z, t)` of E_n has `d >= z` or `b >= t`.
///
/// Along each segment the relation fails first at its upper-right corner, so
/// only the riser tops `(k, n-k)` and the lower infinite step matter.
pub fn succeeds(p: PlanePoint, n: u32) -> bool {
    if p.b < 0.0 {
        return false;
    }
    (0..n).all(|k| p.d >= k as f64 || p.b >= (n - k) as f64)
}

/// Some point of E_n dominates `(d, b)` strictly in both coordinates.
pub fn precedes(p: PlanePoint, n: u32) -> bool {
    staircase(n).segments.iter().any(|s| s.x_max() > p.d && s.y_max() > p.b)
}

/// Membership in R = {d in N} u {b in N*}.
pub fn in_lattice(p: PlanePoint) -> bool {
    (p.d >= 0.0 && p.d == p.d.floor()) || (p.b >= 1.0 && p.b == p.b.floor())
}

/// Total-positivity verdict for the kernel with parameters `(d, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "order")]
pub enum TpClassification {
    TpInfinity,
    TpFinite(u32),
    TpOneOnly,
}

impl TpClassification {
    /// Largest m with TP_m, `None` for TP_infinity.
    pub fn order(&self) -> Option<u32> {
        match self {
            Self::TpInfinity => None,
            Self::TpFinite(k) => Some(*k),
            Self::TpOneOnly => Some(1),
        }
    }
}

impl fmt::Display for TpClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TpInfinity => write!(f, "TP_infinity"),
            Self::TpFinite(k) => write!(f, "TP_{k} (finite)"),
            Self::TpOneOnly => write!(f, "TP_1 only"),
        }
    }
}

/// max{n >= 1 : (d, b) >= E_n}, zero when no such n exists.
pub fn max_succeeding_order(p: PlanePoint) -> u32 {
    let mut n = 0;
    while succeeds(p, n + 1) {
        n += 1;
        if n > 1_000_000 {
            break;
        }
    }
    n
}

/// Closed form floor(b) + max(floor(d) + 1, 0) of [`max_succeeding_order`].
pub fn closed_form_order(p: PlanePoint) -> i64 {
    p.b.floor() as i64 + (p.d.floor() as i64 + 1).max(0)
}

pub fn classify(p: PlanePoint) -> Result<TpClassification> {
    if !(p.b > 0.0) {
        return Err(Error::Domain(format!("classify requires b > 0, got {}", p.b)));
    }
    if in_lattice(p) {
        return Ok(TpClassification::TpInfinity);
    }
    Ok(match max_succeeding_order(p) {
        0 => TpClassification::TpOneOnly,
        n => TpClassification::TpFinite(n + 1),
    })
}

/// Index k of the open square of E_n^+ = U_k {k-1 < d < k, n-k < b < n-k+1}
/// containing `p`.
pub fn e_plus_square(p: PlanePoint, n: u32) -> Option<u32> {
    (1..=n).find(|&k| {
        let (k, nf) = (k as f64, n as f64);
        k - 1.0 < p.d && p.d < k && nf - k < p.b && p.b < nf - k + 1.0
    })
}

/// Index q of the open square of E_n^- = U_q {q-2 < d < q-1, n-q < b < n+1-q}
/// containing `p`.
pub fn e_minus_square(p: PlanePoint, n: u32) -> Option<u32> {
    (1..=n).find(|&q| {
        let (q, nf) = (q as f64, n as f64);
        q - 2.0 < p.d && p.d < q - 1.0 && nf - q < p.b && p.b < nf + 1.0 - q
    })
}
