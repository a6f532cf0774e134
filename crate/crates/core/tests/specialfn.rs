use approx::assert_relative_eq;
use proptest::prelude::*;
use tpbg::specialfn::*;
use tpbg::Error;

fn f(mu: f64, nu: f64, z: f64) -> f64 {
    tricomi_f(PsiArgs::new(mu, nu).unwrap(), z).unwrap()
}

#[test]
fn gamma_poles_are_errors() {
    for x in [0.0, -1.0, -7.0] {
        assert!(matches!(gamma(x), Err(Error::Pole(_))));
    }
}

#[test]
fn tricomi_examples() {
    // mpmath hyperu at 60 digits
    assert_relative_eq!(tricomi_psi(1.0, 1.0, 1.0).unwrap(), 0.596_347_362_323_194_1, max_relative = 1e-12);
    assert_relative_eq!(tricomi_psi(0.5, 0.5, 2.0).unwrap(), 0.595_906_078_825_865_0, max_relative = 1e-12);
    assert_relative_eq!(f(2.0, 0.0, 5.0), 0.04, max_relative = 1e-14);
}

#[test]
fn small_z_forms() {
    let a = psi_small_z(PsiArgs::new(3.0, 1.0).unwrap()).unwrap();
    assert_relative_eq!(a.coefficient, 0.5, max_relative = 1e-14);
    assert_eq!((a.power, a.log_power), (-2.0, 0));
    let a = psi_small_z(PsiArgs::new(2.0, 2.0).unwrap()).unwrap();
    assert_relative_eq!(a.coefficient, 1.0, max_relative = 1e-14);
    assert_eq!((a.power, a.log_power), (0.0, 1));
}

#[test]
fn h_requires_c_below_one_plus_a() {
    assert!(matches!(tricomi_h(1.0, 2.5, 1.0), Err(Error::Domain(_))));
    assert!(tricomi_h(1.0, 1.5, 1.0).unwrap() > 0.0);
}

#[test]
fn mu_must_be_positive() {
    assert!(PsiArgs::new(0.0, 1.0).is_err());
    assert!(PsiArgs::new(-1.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positivity(mu in 0.05f64..10.0, nu in -20.0f64..20.0, lz in -8.0f64..8.0) {
        prop_assert!(f(mu, nu, 10f64.powf(lz)) > 0.0);
    }

    #[test]
    fn kummer(b in 0.05f64..6.0, d in 0.05f64..6.0, lx in -4.0f64..4.0) {
        let x = 10f64.powf(lx);
        let lhs = f(b, d, x);
        let rhs = x.powf(d - b) * f(d, b, x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn large_z_law(b in 0.05f64..5.0, nu in -5.0f64..5.0) {
        let z = 1e6;
        prop_assert!((f(b, nu, z) * z.powf(b) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn small_z_law(mu in 0.1f64..5.0, nu in -5.0f64..5.0) {
        prop_assume!((mu - nu).abs() >= 0.5);
        let args = PsiArgs::new(mu, nu).unwrap();
        let z = 1e-6;
        let ratio = tricomi_f(args, z).unwrap() / psi_small_z(args).unwrap().eval(z);
        prop_assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn log_convex_in_nu(b in 0.05f64..8.0, nu in -10.0f64..10.0, lz in -6.0f64..6.0) {
        let z = 10f64.powf(lz);
        let [lm, l0, lp] = [nu - 1.0, nu, nu + 1.0].map(|v| ln_tricomi_f(PsiArgs::new(b, v).unwrap(), z).unwrap());
        prop_assert!(lm + lp - 2.0 * l0 >= -1e-11 * (1.0 + l0.abs()));
    }

    #[test]
    fn derivative_matches_finite_difference(mu in 0.1f64..6.0, nu in -6.0f64..6.0, lz in -2.0f64..2.0) {
        let args = PsiArgs::new(mu, nu).unwrap();
        let z = 10f64.powf(lz);
        let h = 1e-3 * z;
        let g = |k: f64| tricomi_f(args, z + k * h).unwrap();
        let fd = (g(-2.0) - 8.0 * g(-1.0) + 8.0 * g(1.0) - g(2.0)) / (12.0 * h);
        let exact = psi_derivative(args, z, 1).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs(), "{fd} vs {exact}");
    }

    #[test]
    fn gamma_recurrence(x in -8.0f64..30.0) {
        prop_assume!((x - x.round()).abs() > 1e-3);
        let g = gamma(x).unwrap();
        prop_assert!((gamma(x + 1.0).unwrap() - x * g).abs() <= 1e-12 * (x * g).abs());
    }
}
