use approx::assert_relative_eq;
use proptest::prelude::*;
use tpbg::betagamma::*;
use tpbg::quad::{exp_sinh, tanh_sinh, QuadOptions};
use tpbg::Error;

fn expr(text: &str) -> DistributionExpr {
    text.parse().unwrap()
}

fn integral(f: impl Fn(f64) -> f64 + Copy) -> f64 {
    let opts = QuadOptions::default();
    tanh_sinh(f, 0.0, 1.0, opts).value + exp_sinh(f, 1.0, opts).value
}

#[test]
fn moments_match_samples() {
    let cases = [
        "Beta(0.7,1.3)",
        "Gamma(0.6)",
        "U^(1/0.8)",
        "Urho(0.35)",
        "Scale(2.5)*Gamma(1.4)",
        "Beta(0.7,1.3)*Gamma(2.1)",
    ];
    for (i, text) in cases.iter().enumerate() {
        let e = expr(text);
        for s in [0.5, 1.0, 2.0] {
            let m = moment_check(&e, s, 1_000_000, i as u64).unwrap();
            assert!(m.z_score <= 4.0, "{text} s={s}: {m:?}");
        }
    }
    let scaled = expr("Scale(2.5)*Gamma(1.4)");
    assert_relative_eq!(scaled.mellin(1.0).unwrap(), 3.5, max_relative = 1e-14);
}

#[test]
fn density_matches_convolution() {
    // Beta(1,1)*Gamma(1) has density E1(x).
    for (x, e1) in [(0.05, 2.4678984885099743696), (0.5, 0.55977359477616081175), (1.0, 0.21938393439552027368), (3.0, 0.013048381094197037413)] {
        assert_relative_eq!(density_t(1.0, 1.0, 1.0, x).unwrap(), e1, max_relative = 1e-10);
    }
    assert_relative_eq!(density_t(0.7, 1.3, 2.1, 0.3).unwrap(), 0.80388572609829444093, max_relative = 1e-10);
    assert_relative_eq!(density_t(0.7, 1.3, 2.1, 2.5).unwrap(), 0.052283167415794690615, max_relative = 1e-10);
}

#[test]
fn density_is_normalized() {
    let total = integral(|x| if x > 0.0 { density_t(0.7, 1.3, 2.1, x).unwrap() } else { 0.0 });
    assert!((total - 1.0).abs() <= 1e-8, "{total}");
    let mean = integral(|x| if x > 0.0 { x * density_t(0.7, 1.3, 2.1, x).unwrap() } else { 0.0 });
    assert_relative_eq!(mean, 0.7 * 2.1 / 2.0, max_relative = 1e-8);
    assert!(matches!(density_t(0.7, 1.3, 2.1, 0.0), Err(Error::Domain(_))));
}

#[test]
fn u_rho_density() {
    let (c, d) = (1.5, 0.4);
    let opts = QuadOptions::default();
    let f = |x: f64| if x > 0.0 && x < 1.0 { u_rho_product_density(c, d, x).unwrap() } else { 0.0 };
    assert!((tanh_sinh(f, 0.0, 1.0, opts).value - 1.0).abs() <= 1e-12);
    let rho = c / (c + d);
    let e = DistributionExpr::new(vec![
        Factor::pow(Atom::BernoulliMixUniform { rho }, 1.0 / c),
        Factor::new(Atom::UniformPower { theta: c + 1.0 }),
    ])
    .unwrap();
    for s in [0.25, 1.0, 2.5] {
        let m = tanh_sinh(|x| x.powf(s) * f(x), 0.0, 1.0, opts).value;
        assert_relative_eq!(m, e.mellin(s).unwrap(), max_relative = 1e-12);
    }
    for x in [0.1, 0.5, 0.9] {
        assert_relative_eq!(u_rho_product_density(c, 1.0, x).unwrap(), c * x.powf(c - 1.0), max_relative = 1e-14);
    }
}

#[test]
fn kummer2_transform() {
    let v = kummer2_laplace(0.8, 1.1, 1.0, 2.0).unwrap();
    assert_relative_eq!(v, 0.59959591277492925414, max_relative = 1e-10);
    assert_relative_eq!(kummer2_laplace_quadrature(0.8, 1.1, 1.0, 2.0).unwrap(), v, max_relative = 1e-9);
    let mut prev = 1.0;
    for lambda in [0.1, 1.0, 10.0, 100.0] {
        let v = kummer2_laplace(1.3, 0.7, 2.0, lambda).unwrap();
        assert!(v < prev && v > 0.0);
        prev = v;
    }
    assert!(kummer2_laplace(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(kummer2_laplace(1.0, 1.0, 1.0, -1.0).is_err());
}

#[test]
fn documented_laws_pass() {
    let params = LawParams::default();
    for id in [beta_uniform_identity(0.7, 2).unwrap(), t_shift_identity(0.5, 0.5, 1.2).unwrap(), t_symmetry_identity(1.1, 0.9, 0.6).unwrap()] {
        let r = verify_law(&id.lhs, &id.rhs, LawMethod::MellinGrid, &params).unwrap();
        assert!(r.pass, "{}: {r:?}", id.name);
        assert_eq!(r.details.len(), 12);
    }
    for id in standard_identities().unwrap() {
        let r = verify_law(&id.lhs, &id.rhs, LawMethod::MellinGrid, &params).unwrap();
        assert!(r.pass, "{}: {}", id.name, r.statistic);
    }
    assert!(t_symmetry_identity(1.0, 1.0, 2.5).is_err());
    assert!(t_factorization_identity(1.0, 1.0, 2.5).is_err());
}

#[test]
fn wrong_laws_fail() {
    let params = LawParams::default();
    let lhs = DistributionExpr::t(0.5, 0.5, 1.2).unwrap();
    let rhs = DistributionExpr::t(0.5, 0.5, 1.3).unwrap();
    assert!(!verify_law(&lhs, &rhs, LawMethod::MellinGrid, &params).unwrap().pass);
    let ks = LawParams { samples: 20_000, ..params };
    assert!(!verify_law(&lhs, &rhs.times(&expr("Scale(1.5)")), LawMethod::Ks, &ks).unwrap().pass);
}

#[test]
fn ks_method_accepts_identities() {
    let params = LawParams::default();
    for id in [t_symmetry_identity(1.1, 0.9, 0.6).unwrap(), t_factorization_identity(1.1, 0.9, 0.6).unwrap()] {
        let r = verify_law(&id.lhs, &id.rhs, LawMethod::Ks, &params).unwrap();
        assert!(r.pass, "{}: {r:?}", id.name);
        assert_relative_eq!(r.threshold, 1.628 * (2e-5f64).sqrt(), max_relative = 1e-12);
    }
}

#[test]
fn density_matches_gamma_uniform_products() {
    let (a, b) = (0.9, 1.6);
    let params = LawParams::default();
    for n in 1..=2usize {
        let id = t_gamma_identity(a, b, n).unwrap();
        let r = ks_against_density_t(&id.rhs, a, b, a + b - n as f64, 20, &params).unwrap();
        assert!(r.pass, "n={n}: {r:?}");
    }
    assert!(t_gamma_identity(0.4, 0.5, 1).is_err());
}

#[test]
fn gamma_uniform_product_is_not_t_above_a_plus_b() {
    // Gamma(a) * U^{1/a} * ... * U^{1/(a+n-1)} has mean below a, T(a,b,a+b+n) above.
    let (a, b, n) = (0.9, 0.6, 2usize);
    let mut factors = vec![Factor::new(Atom::Gamma { c: a })];
    factors.extend((0..n).map(|k| Factor::new(Atom::UniformPower { theta: a + k as f64 })));
    let product = DistributionExpr::new(factors).unwrap();
    let t = DistributionExpr::t(a, b, a + b + n as f64).unwrap();
    assert!(product.mellin(1.0).unwrap() < a && t.mellin(1.0).unwrap() > a);
    let r = ks_against_density_t(&product, a, b, a + b + n as f64, 20, &LawParams::default()).unwrap();
    assert!(!r.pass);
}

#[test]
fn non_holomorphy_witness() {
    let w = holomorphy_witness(0.8, 0.7, 1.1).unwrap();
    assert!(w.divergent);
    assert_eq!(w.offsets.len(), 5);
    // b integer: the pole cancels.
    assert!(!holomorphy_witness(0.8, 2.0, 1.1).unwrap().divergent);
    // d = a+b-c integer: the pole cancels against Gamma(c+s).
    assert!(!holomorphy_witness(0.8, 0.7, 0.5).unwrap().divergent);
}

#[test]
fn report_json() {
    let id = beta_shift_identity(0.6, 1.7).unwrap();
    let r = verify_law(&id.lhs, &id.rhs, LawMethod::MellinGrid, &LawParams::default()).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["method"], "mellin_grid");
    assert_eq!(json["pass"], true);
    let back: LawTestReport = serde_json::from_value(json).unwrap();
    assert_eq!(back, r);
    let e = serde_json::to_value(&id.rhs).unwrap();
    assert_eq!(serde_json::from_value::<DistributionExpr>(e).unwrap(), id.rhs);
}

fn atom() -> impl Strategy<Value = Atom> {
    let p = 0.05f64..5.0;
    prop_oneof![
        (p.clone(), p.clone()).prop_map(|(a, b)| Atom::Beta { a, b }),
        p.clone().prop_map(|c| Atom::Gamma { c }),
        p.clone().prop_map(|theta| Atom::UniformPower { theta }),
        (0.01f64..0.99).prop_map(|rho| Atom::BernoulliMixUniform { rho }),
        p.prop_map(|k| Atom::Scale { k }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_round_trip(atoms in prop::collection::vec((atom(), prop::option::of(0.1f64..3.0)), 1..5)) {
        let factors = atoms.into_iter().map(|(a, e)| match e {
            Some(e) => Factor::pow(a, e),
            None => Factor::new(a),
        }).collect();
        let e = DistributionExpr::new(factors).unwrap();
        let text = e.to_string();
        prop_assert_eq!(text.parse::<DistributionExpr>().unwrap(), e);
    }

    #[test]
    fn mellin_is_multiplicative(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 0.1f64..3.0, s in 0.0f64..3.0) {
        let t = DistributionExpr::t(a, b, c).unwrap();
        let u = expr("U^(1/0.9)");
        let both = t.times(&u);
        let lhs = both.mellin(s).unwrap();
        let rhs = t.mellin(s).unwrap() * u.mellin(s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn factorization_law(a in 0.1f64..3.0, b in 0.1f64..3.0, frac in 0.05f64..0.95) {
        let id = t_factorization_identity(a, b, frac * (a + b)).unwrap();
        let r = verify_law(&id.lhs, &id.rhs, LawMethod::MellinGrid, &LawParams::default()).unwrap();
        prop_assert!(r.pass, "{}", r.statistic);
    }
}
