use crate::error::{Error, Result};
use crate::specialfn::log_gamma_ratio;
use rand::distr::Open01;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::tpkernel::trial_rng;

/// Independent positive random variable used as a building block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "atom")]
pub enum Atom {
    Beta { a: f64, b: f64 },
    Gamma { c: f64 },
    /// U^{1/theta} with U uniform on (0, 1).
    UniformPower { theta: f64 },
    /// U_rho = eps_rho + (1 - eps_rho) U with eps_rho ~ Bernoulli(rho).
    BernoulliMixUniform { rho: f64 },
    /// The constant k.
    Scale { k: f64 },
}

impl Atom {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Atom::Beta { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            Atom::Gamma { c } => c > 0.0 && c.is_finite(),
            Atom::UniformPower { theta } => theta > 0.0 && theta.is_finite(),
            Atom::BernoulliMixUniform { rho } => rho > 0.0 && rho < 1.0,
            Atom::Scale { k } => k > 0.0 && k.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("parameter out of range in {self}")))
        }
    }

    /// Infimum of the s for which E[X^s] is finite, negated.
    fn abscissa(&self) -> f64 {
        match *self {
            Atom::Beta { a, .. } => a,
            Atom::Gamma { c } => c,
            Atom::UniformPower { theta } => theta,
            Atom::BernoulliMixUniform { .. } => 1.0,
            Atom::Scale { .. } => f64::INFINITY,
        }
    }

    fn ln_mellin(&self, s: f64) -> Result<f64> {
        Ok(match *self {
            Atom::Beta { a, b } => log_gamma_ratio(a + s, a)?.0 - log_gamma_ratio(a + b + s, a + b)?.0,
            Atom::Gamma { c } => log_gamma_ratio(c + s, c)?.0,
            Atom::UniformPower { theta } => (theta / (theta + s)).ln(),
            Atom::BernoulliMixUniform { rho } => (rho + (1.0 - rho) / (1.0 + s)).ln(),
            Atom::Scale { k } => s * k.ln(),
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let gamma = |shape: f64, rng: &mut ChaCha8Rng| Gamma::new(shape, 1.0).expect("validated shape").sample(rng);
        match *self {
            Atom::Beta { a, b } => {
                let x = gamma(a, rng);
                let y = gamma(b, rng);
                x / (x + y)
            }
            Atom::Gamma { c } => gamma(c, rng),
            Atom::UniformPower { theta } => {
                let u: f64 = Open01.sample(rng);
                u.powf(1.0 / theta)
            }
            Atom::BernoulliMixUniform { rho } => {
                if rng.random_bool(rho) {
                    1.0
                } else {
                    Open01.sample(rng)
                }
            }
            Atom::Scale { k } => k,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Beta { a, b } => write!(f, "Beta({a},{b})"),
            Atom::Gamma { c } => write!(f, "Gamma({c})"),
            Atom::UniformPower { theta } if theta == 1.0 => write!(f, "U"),
            Atom::UniformPower { theta } => write!(f, "U^(1/{theta})"),
            Atom::BernoulliMixUniform { rho } => write!(f, "Urho({rho})"),
            Atom::Scale { k } => write!(f, "Scale({k})"),
        }
    }
}

/// X^exponent for an atom X, exponent > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    #[serde(flatten)]
    pub atom: Atom,
    pub exponent: f64,
}

impl Factor {
    pub fn new(atom: Atom) -> Self {
        Self { atom, exponent: 1.0 }
    }

    pub fn pow(atom: Atom, exponent: f64) -> Self {
        Self { atom, exponent }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inv = 1.0 / self.exponent;
        if self.exponent == 1.0 {
            write!(f, "{}", self.atom)
        } else if self.atom == (Atom::UniformPower { theta: 1.0 }) {
            write!(f, "U^(1/1)^({})", self.exponent)
        } else if 1.0 / inv == self.exponent {
            write!(f, "{}^(1/{inv})", self.atom)
        } else {
            write!(f, "{}^({})", self.atom, self.exponent)
        }
    }
}

/// Independent product of factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionExpr {
    pub factors: Vec<Factor>,
}

impl DistributionExpr {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let e = Self { factors };
        e.validate()?;
        Ok(e)
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        Self::new(atoms.into_iter().map(Factor::new).collect())
    }

    /// T(a, b, c) = Beta(a, b) * Gamma(c).
    pub fn t(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::from_atoms([Atom::Beta { a, b }, Atom::Gamma { c }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::Domain("empty distribution expression".into()));
        }
        for fac in &self.factors {
            fac.atom.validate()?;
            if !(fac.exponent > 0.0 && fac.exponent.is_finite()) {
                return Err(Error::Domain(format!("exponent must be positive, got {}", fac.exponent)));
            }
        }
        Ok(())
    }

    /// E[X^s] is finite exactly for s > -abscissa.
    pub fn abscissa(&self) -> f64 {
        self.factors.iter().map(|f| f.atom.abscissa() / f.exponent).fold(f64::INFINITY, f64::min)
    }

    /// Independent product of `self` and `other`.
    pub fn times(&self, other: &Self) -> Self {
        Self { factors: self.factors.iter().chain(&other.factors).copied().collect() }
    }

    pub fn ln_mellin(&self, s: f64) -> Result<f64> {
        self.validate()?;
        let abscissa = self.abscissa();
        if !(s > -abscissa) {
            return Err(Error::Abscissa(format!("E[X^s] of {self} requires s > {}, got {s}", -abscissa)));
        }
        self.factors.iter().map(|f| f.atom.ln_mellin(f.exponent * s)).sum()
    }

    /// E[X^s] as the product of the factor transforms.
    pub fn mellin(&self, s: f64) -> Result<f64> {
        Ok(self.ln_mellin(s)?.exp())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.factors.iter().map(|f| f.atom.sample(rng).powf(f.exponent)).product()
    }
}

/// Draws per independent RNG stream.
const SAMPLE_CHUNK: usize = 1 << 14;

/// `n` independent draws; chunk `k` uses stream `k` of `seed`.
pub fn sample(e: &DistributionExpr, n: usize, seed: u64) -> Result<Vec<f64>> {
    e.validate()?;
    if n == 0 {
        return Err(Error::Domain("sample size must be at least 1".into()));
    }
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let out: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k);
            let len = SAMPLE_CHUNK.min(n - k * SAMPLE_CHUNK);
            (0..len).map(|_| e.draw(&mut rng)).collect()
        })
        .collect();
    Ok(out.concat())
}

/// Sample mean of X^s with its standard error against the exact E[X^s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub s: f64,
    pub exact: f64,
    pub sample_mean: f64,
    pub standard_error: f64,
    /// |sample_mean - exact| / standard_error
    pub z_score: f64,
}

pub fn moment_check(e: &DistributionExpr, s: f64, n: usize, seed: u64) -> Result<MomentCheck> {
    let exact = e.mellin(s)?;
    let xs = sample(e, n, seed)?;
    let nf = xs.len() as f64;
    let mean = xs.iter().map(|x| x.powf(s)).sum::<f64>() / nf;
    let var = xs.iter().map(|x| (x.powf(s) - mean).powi(2)).sum::<f64>() / (nf - 1.0).max(1.0);
    let standard_error = (var / nf).sqrt();
    Ok(MomentCheck { s, exact, sample_mean: mean, standard_error, z_score: (mean - exact).abs() / standard_error })
}

impl fmt::Display for DistributionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{fac}")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(0, char::len_utf8);
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {token:?}")))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let len = self.rest().find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.err("expected a distribution name"));
        }
        let id = &self.rest()[..len];
        self.pos += len;
        Ok(id)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')))
            .unwrap_or(self.rest().len());
        let text = &self.rest()[..len];
        let v = text.parse::<f64>().map_err(|_| self.err("expected a number"))?;
        self.pos += len;
        Ok(v)
    }

    /// `x` or `x/y` as (numerator, denominator).
    fn exponent_value(&mut self) -> Result<(f64, f64)> {
        let v = self.number()?;
        if self.eat("/") {
            Ok((v, self.number()?))
        } else {
            Ok((v, 1.0))
        }
    }

    fn args(&mut self, count: usize) -> Result<Vec<f64>> {
        self.expect("(")?;
        let mut out = vec![self.number()?];
        while self.eat(",") {
            out.push(self.number()?);
        }
        self.expect(")")?;
        if out.len() != count {
            return Err(self.err(&format!("expected {count} argument(s), got {}", out.len())));
        }
        Ok(out)
    }

    fn factors(&mut self) -> Result<Vec<Factor>> {
        let name = self.ident()?;
        let atoms = match name {
            "Beta" | "B" => {
                let v = self.args(2)?;
                vec![Atom::Beta { a: v[0], b: v[1] }]
            }
            "Gamma" | "G" => vec![Atom::Gamma { c: self.args(1)?[0] }],
            "U" => vec![Atom::UniformPower { theta: 1.0 }],
            "Urho" => vec![Atom::BernoulliMixUniform { rho: self.args(1)?[0] }],
            "Scale" => vec![Atom::Scale { k: self.args(1)?[0] }],
            "T" => {
                let v = self.args(3)?;
                vec![Atom::Beta { a: v[0], b: v[1] }, Atom::Gamma { c: v[2] }]
            }
            other => return Err(self.err(&format!("unknown distribution {other:?}"))),
        };
        if atoms == [Atom::UniformPower { theta: 1.0 }] {
            if let Some((num, den)) = self.power()? {
                let theta = den / num;
                let exponent = self.power()?.map_or(1.0, |(n, d)| n / d);
                return Ok(vec![Factor::pow(Atom::UniformPower { theta }, exponent)]);
            }
        }
        Ok(match self.power()? {
            None => atoms.into_iter().map(Factor::new).collect(),
            Some((num, den)) => atoms.into_iter().map(|a| Factor::pow(a, num / den)).collect(),
        })
    }

    /// Optional `^x`, `^(x)` or `^(x/y)` with a positive value.
    fn power(&mut self) -> Result<Option<(f64, f64)>> {
        if !self.eat("^") {
            return Ok(None);
        }
        let (num, den) = if self.eat("(") {
            let v = self.exponent_value()?;
            self.expect(")")?;
            v
        } else {
            (self.number()?, 1.0)
        };
        if !(num > 0.0 && den > 0.0 && (num / den).is_finite()) {
            return Err(self.err("exponent must be positive"));
        }
        Ok(Some((num, den)))
    }
}

impl FromStr for DistributionExpr {
    type Err = Error;

    /// Parses products such as `Beta(0.5,0.5)*Gamma(1.2)`, `U^(1/0.7)`,
    /// `Urho(0.4)^(1/1.5)` or `T(1,2,3)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let mut factors = p.factors()?;
        while p.eat("*") || p.eat("×") {
            factors.extend(p.factors()?);
        }
        p.skip_ws();
        if !p.rest().is_empty() {
            return Err(p.err("unexpected trailing input"));
        }
        Self::new(factors)
    }
}

