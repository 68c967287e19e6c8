use hypbounds::collar::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn hexagon_gap_is_twice_the_wide_side(x in 1e-3f64..20.0) {
        let (w1, _) = generalized_width(x).unwrap();
        prop_assert!((hexagon_gap(x).unwrap() - 2.0 * w1).abs() < 1e-12);
    }

    #[test]
    fn wide_side_exceeds_symmetric_width(x in 1e-3f64..20.0) {
        let (w1, _) = generalized_width(x).unwrap();
        prop_assert!(w1 > collar_width(x).unwrap());
    }

    #[test]
    fn narrow_side_positive_on_short_cores(x in 1e-3f64..=SHORT_CORE_LIMIT) {
        let (_, narrow) = generalized_width(x).unwrap();
        prop_assert!(narrow > 0.0);
        let p = CollarProfile::new(x).unwrap();
        prop_assert!(!p.narrow_clamped);
    }

    #[test]
    fn widths_shrink_as_the_core_grows(x in 1e-3f64..19.0, dx in 1e-3f64..1.0) {
        prop_assert!(collar_width(x + dx).unwrap() < collar_width(x).unwrap());
        prop_assert!(generalized_width(x + dx).unwrap().0 < generalized_width(x).unwrap().0);
    }
}

#[test]
fn non_positive_lengths_rejected() {
    for x in [0.0, -1.0, f64::NAN] {
        assert!(collar_width(x).is_err());
        assert!(hexagon_gap(x).is_err());
        assert!(CollarProfile::new(x).is_err());
    }
}
