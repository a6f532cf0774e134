use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tpbg::betagamma::{kummer2_laplace, kummer2_laplace_quadrature, moment_check, standard_identities, verify_law, DistributionExpr, LawMethod, LawParams};
use tpbg::hankel::*;
use tpbg::specialfn::{tricomi_f, PsiArgs};
use tpbg::staircase::{succeeds, PlanePoint};
use tpbg::tpkernel::{delta_sign_check, trial_rng, KernelParams};
use tpbg::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Kummer,
    Lemmas,
    Sylvester,
    Laws,
    Kummer2,
    Wronskian,
    Delta,
}

/// One aggregated check: passes when statistic <= threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub samples: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(check: impl Into<String>, samples: usize, statistic: f64, threshold: f64) -> Self {
        Self { check: check.into(), samples, statistic, threshold, pass: statistic <= threshold }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn run(suite: Suite, seed: u64, trials: Option<usize>) -> Result<Vec<Check>> {
    let mut rng = trial_rng(seed, suite as usize);
    match suite {
        Suite::Kummer => kummer(&mut rng, trials.unwrap_or(1000)),
        Suite::Lemmas => lemmas(&mut rng, trials.unwrap_or(200)),
        Suite::Sylvester => sylvester(&mut rng, trials.unwrap_or(100)),
        Suite::Laws => laws(seed, trials.unwrap_or(1_000_000)),
        Suite::Kummer2 => kummer2(),
        Suite::Wronskian => wronskian(&mut rng, trials.unwrap_or(50)),
        Suite::Delta => delta(&mut rng, trials.unwrap_or(100)),
    }
}

fn kummer(rng: &mut ChaCha8Rng, trials: usize) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (b, d) = (uniform(rng, 0.1, 10.0), uniform(rng, 0.1, 10.0));
        let x = 10f64.powf(uniform(rng, -2.0, 2.0));
        let lhs = tricomi_f(PsiArgs::new(b, d)?, x)?;
        let rhs = x.powf(d - b) * tricomi_f(PsiArgs::new(d, b)?, x)?;
        worst = worst.max(rel(lhs, rhs));
    }
    Ok(vec![Check::new("kummer_transformation", trials, worst, 1e-9)])
}

fn lemmas(rng: &mut ChaCha8Rng, trials: usize) -> Result<Vec<Check>> {
    let mut l1 = 0.0f64;
    for n in 0..=6 {
        for _ in 0..100 {
            l1 = l1.max(rel(lemma1_matrix(n, uniform(rng, -10.0, 10.0)), lemma1_closed(n)));
        }
    }
    let (mut l2, mut l3) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let q = rng.random_range(0..=4);
        let mu = uniform(rng, 0.1, 6.0);
        let nu = mu - q as f64 - uniform(rng, 0.1, 4.0);
        l2 = l2.max(rel(lemma2_closed(q, mu, nu)?, lemma2_matrix(q, mu, nu)?));
        let n = rng.random_range(q..=4);
        let nu3 = mu + (2 * q) as f64 - n as f64 + uniform(rng, 0.1, 4.0);
        l3 = l3.max(rel(lemma3_closed(n, q, mu, nu3)?, lemma3_matrix(n, q, mu, nu3)?));
    }
    let mut nonpositive = 0;
    let mut fq = 0.0f64;
    for q in 0..=4 {
        for k in 0..50 {
            let rho = 0.1 + 4.9 * (k as f64 + 0.5) / 50.0;
            let v = f_q(rho, q)?;
            if !(v > 0.0) {
                nonpositive += 1;
            }
            fq = fq.max(rel(v, f_q_closed(rho, q)?));
        }
    }
    Ok(vec![
        Check::new("lemma1", 700, l1, 1e-9),
        Check::new("lemma2", trials, l2, 1e-9),
        Check::new("lemma3", trials, l3, 1e-9),
        Check::new("f_q_closed_form", 250, fq, 1e-9),
        Check::new("f_q_nonpositive_count", 250, nonpositive as f64, 0.0),
    ])
}

fn sylvester(rng: &mut ChaCha8Rng, trials: usize) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    let mut used = 0;
    let mut attempts = 0;
    while used < trials && attempts < 20 * trials {
        attempts += 1;
        let n = rng.random_range(2..=4);
        let p = DetParams::new(n, uniform(rng, 0.1, 3.0), uniform(rng, -3.0, 3.0))?;
        match sylvester_residual(p, 10f64.powf(uniform(rng, -2.0, 2.0))) {
            Ok(r) => {
                worst = worst.max(r);
                used += 1;
            }
            Err(Error::Conditioning(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(vec![Check::new("sylvester_recursion", used, worst, 1e-8)])
}

fn laws(seed: u64, samples: usize) -> Result<Vec<Check>> {
    let params = LawParams { seed, ..LawParams::default() };
    let mut out = Vec::new();
    for id in standard_identities()? {
        let r = verify_law(&id.lhs, &id.rhs, LawMethod::MellinGrid, &params)?;
        out.push(Check::new(id.name, params.s_grid.len(), r.statistic, r.threshold));
    }
    for (i, text) in ["Beta(0.7,1.3)*Gamma(2.1)", "U^(1/0.8)*Urho(0.35)"].iter().enumerate() {
        let e: DistributionExpr = text.parse()?;
        let mut worst = 0.0f64;
        for s in [0.5, 1.0, 2.0] {
            worst = worst.max(moment_check(&e, s, samples, seed.wrapping_add(i as u64))?.z_score);
        }
        out.push(Check::new(format!("moments({text})"), samples, worst, 4.0));
    }
    Ok(out)
}

fn kummer2() -> Result<Vec<Check>> {
    let (a, b, c) = (1.3, 0.7, 2.0);
    let mut worst = 0.0f64;
    let lambdas = [0.5, 1.0, 2.0, 5.0, 10.0];
    for lambda in lambdas {
        let lhs = kummer2_laplace(a + b, -b, c, lambda)?;
        let rhs = kummer2_laplace(a, b, c, lambda)? * (c / (c + lambda)).powf(b);
        worst = worst.max((lhs - rhs).abs());
    }
    let quad = rel(kummer2_laplace(0.8, 1.1, 1.0, 2.0)?, kummer2_laplace_quadrature(0.8, 1.1, 1.0, 2.0)?);
    Ok(vec![Check::new("additive_identity", lambdas.len(), worst, 1e-8), Check::new("quadrature_cross_check", 1, quad, 1e-8)])
}

fn wronskian(rng: &mut ChaCha8Rng, trials: usize) -> Result<Vec<Check>> {
    let (mut scaling, mut derivative) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let n = rng.random_range(0..=3);
        let p = DetParams::new(n, uniform(rng, 0.1, 3.0), n as f64 + uniform(rng, 0.1, 3.0))?;
        let z = 10f64.powf(uniform(rng, -2.0, 2.0));
        scaling = scaling.max(rel(wronskian_w(p, z, WronskianMethod::Scaling)?, wronskian_w(p, z, WronskianMethod::Direct)?));
        derivative = derivative.max(derivative_relation_residual(p, z)?);
    }
    let mut increases = 0;
    let mut grids = 0;
    while grids < trials {
        let n = rng.random_range(1..=3);
        let (b, d) = (uniform(rng, 0.1, 3.0), uniform(rng, 0.1, 4.0));
        if !succeeds(PlanePoint::new(d, b), n as u32) {
            continue;
        }
        grids += 1;
        let p = DetParams::new(n, b, d)?;
        let w = log_grid(1e-2, 1e2, 17).iter().map(|&z| wronskian_w(p, z, WronskianMethod::Scaling)).collect::<Result<Vec<_>>>()?;
        increases += w.windows(2).filter(|v| v[1] >= v[0]).count();
    }
    Ok(vec![
        Check::new("scaling_vs_direct", trials, scaling, 1e-6),
        Check::new("derivative_relation", trials, derivative, 1e-6),
        Check::new("monotonicity_violations", grids, increases as f64, 0.0),
    ])
}

fn delta(rng: &mut ChaCha8Rng, trials: usize) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (b, d) in [(0.5, 0.5), (0.7, -0.6), (1.3, 1.4), (0.3, -1.6)] {
        let kp = KernelParams::new(b, d)?;
        for n in 0..=2 {
            let (mut disagree, mut used) = (0, 0);
            for _ in 0..trials {
                let x = 10f64.powf(uniform(rng, -2.0, 1.0));
                let y = 10f64.powf(uniform(rng, -2.0, 1.0));
                match delta_sign_check(kp, n, x, y, None) {
                    Ok(c) => {
                        used += 1;
                        if !c.agree {
                            disagree += 1;
                        }
                    }
                    Err(Error::Indeterminate(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            out.push(Check::new(format!("delta_sign(n={n},b={b},d={d})"), used, disagree as f64, 0.0));
        }
    }
    Ok(out)
}
