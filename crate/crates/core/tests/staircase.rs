use proptest::prelude::*;
use tpbg::staircase::*;

fn off_lattice() -> impl Strategy<Value = PlanePoint> {
    (-6.0f64..6.0, 0.0f64..6.0)
        .prop_filter("off lattice lines", |(d, b)| (d - d.round()).abs() > 1e-6 && (b - b.round()).abs() > 1e-6)
        .prop_map(|(d, b)| PlanePoint::new(d, b))
}

#[test]
fn chain_shape() {
    for n in 1..=7u32 {
        let s = staircase(n);
        assert_eq!(s.finite_steps(), (n - 1) as usize);
        assert_eq!(s.risers(), n as usize);
        let infinite: Vec<_> = s.segments.iter().filter(|g| g.infinite).collect();
        assert_eq!(infinite.len(), 2);
        let first = s.segments.first().unwrap();
        let last = s.segments.last().unwrap();
        assert_eq!((first.x0, first.y0), (f64::NEG_INFINITY, n as f64));
        assert_eq!((last.x1, last.y1), (f64::INFINITY, 0.0));
        for w in s.segments.windows(2) {
            assert_eq!((w[0].x1, w[0].y1), (w[1].x0, w[1].y0));
            assert!(w[1].x1 >= w[1].x0 && w[1].y1 <= w[1].y0);
        }
    }
}

#[test]
fn csv_export() {
    let s = staircase(2);
    assert_eq!(Staircase::csv_header(), "n,segment_index,x0,y0,x1,y1,infinite_flag\n");
    let rows = s.csv_rows();
    assert_eq!(rows.lines().count(), s.segments.len());
    assert!(rows.lines().next().unwrap().starts_with("2,0,-inf,"));
}

#[test]
fn classification_examples() {
    assert_eq!(classify(PlanePoint::new(0.5, 0.5)).unwrap(), TpClassification::TpFinite(2));
    assert_eq!(classify(PlanePoint::new(-0.5, 0.5)).unwrap(), TpClassification::TpOneOnly);
    assert_eq!(classify(PlanePoint::new(3.0, 0.4)).unwrap(), TpClassification::TpInfinity);
    assert!(classify(PlanePoint::new(0.5, 0.0)).is_err());
    assert!(classify(PlanePoint::new(0.5, -1.0)).is_err());
}

#[test]
fn classification_json() {
    let v = serde_json::to_value(TpClassification::TpFinite(3)).unwrap();
    assert_eq!(v, serde_json::json!({"verdict": "TpFinite", "order": 3}));
    assert_eq!(TpClassification::TpFinite(3).to_string(), "TP_3 (finite)");
}

#[test]
fn boundary_points_succeed() {
    assert!(succeeds(PlanePoint::new(0.0, 0.5), 1));
    assert!(succeeds(PlanePoint::new(-0.5, 1.0), 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn complement(d in -8.0f64..8.0, b in 0.0f64..8.0, n in 1u32..10) {
        let p = PlanePoint::new(d, b);
        prop_assert!(precedes(p, n) ^ succeeds(p, n));
    }

    #[test]
    fn monotone_in_n(d in -8.0f64..8.0, b in 0.0f64..8.0, n in 1u32..10) {
        let p = PlanePoint::new(d, b);
        prop_assert!(!succeeds(p, n + 1) || succeeds(p, n));
    }

    #[test]
    fn closed_form_matches_geometry(p in off_lattice()) {
        prop_assert_eq!(max_succeeding_order(p) as i64, closed_form_order(p));
    }

    #[test]
    fn plus_squares_sit_between_staircases(n in 1u32..6, k_frac in 0.0f64..1.0, fd in 0.001f64..0.999, fb in 0.001f64..0.999) {
        let k = 1 + ((k_frac * n as f64) as u32).min(n - 1);
        let p = PlanePoint::new(k as f64 - 1.0 + fd, (n - k) as f64 + fb);
        prop_assert_eq!(e_plus_square(p, n), Some(k));
        prop_assert!(succeeds(p, n) && precedes(p, n + 1));
    }

    #[test]
    fn minus_squares_sit_between_staircases(n in 2u32..6, q_frac in 0.0f64..1.0, fd in 0.001f64..0.999, fb in 0.001f64..0.999) {
        let q = 1 + ((q_frac * n as f64) as u32).min(n - 1);
        let p = PlanePoint::new(q as f64 - 2.0 + fd, (n - q) as f64 + fb);
        prop_assert_eq!(e_minus_square(p, n), Some(q));
        prop_assert!(precedes(p, n) && succeeds(p, n - 1));
    }

    #[test]
    fn symmetric_in_b_and_d(d in 0.0f64..6.0, b in 0.0f64..6.0) {
        prop_assume!((d - d.round()).abs() > 1e-6 && (b - b.round()).abs() > 1e-6);
        prop_assert_eq!(classify(PlanePoint::new(d, b)).unwrap(), classify(PlanePoint::new(b, d)).unwrap());
    }
}
