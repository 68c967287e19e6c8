use hypbounds::pants::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn formula_matches_holonomy_on_random_pants() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<(PantsBoundary, CurveClass)> = (0..200)
        .map(|_| {
            let p = PantsBoundary::new(
                rng.gen_range(0.0..=4.0),
                rng.gen_range(0.0..=4.0),
                rng.gen_range(0.0..=4.0),
            )
            .unwrap();
            (p, CurveClass::new(rng.gen_range(1..=5), rng.gen_range(1..=5)).unwrap())
        })
        .collect();
    let a = oracle_agreement(&cases).unwrap();
    assert_eq!(a.cases, 200);
    assert!(a.max_residual < 1e-9, "{a:?}");
}

#[test]
fn cusps_and_short_boundaries_meet() {
    // the formula is continuous as a boundary shrinks to a cusp
    let c = CurveClass::new(3, 2).unwrap();
    let cusp = gamma_mn_length(&PantsBoundary::new(0.0, 1.0, 2.0).unwrap(), &c);
    let near = gamma_mn_length(&PantsBoundary::new(1e-7, 1.0, 2.0).unwrap(), &c);
    assert!((cusp - near).abs() < 1e-9);
}

fn boundary() -> impl Strategy<Value = PantsBoundary> {
    (0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0)
        .prop_map(|(a, b, c)| PantsBoundary::new(a, b, c).unwrap())
}

proptest! {
    #[test]
    fn swapping_boundaries_swaps_windings(p in boundary(), m in 1i64..6, n in 1i64..6) {
        let here = gamma_mn_length(&p, &CurveClass { m, n });
        let there = gamma_mn_length(&p.swapped(), &CurveClass { m: n, n: m });
        prop_assert!((here - there).abs() < 1e-12 * here.max(1.0));
    }

    #[test]
    fn never_shorter_than_the_ideal_corkscrew(p in boundary(), m in 1i64..6, n in 1i64..6) {
        prop_assume!(m + n >= 3);
        let ch = gamma_mn_cosh_half(&p, &CurveClass { m, n });
        prop_assert!(ch >= (2 * m * n + 1) as f64 - 1e-12);
    }

    #[test]
    fn grows_with_the_third_boundary(p in boundary(), m in 1i64..6, n in 1i64..6, dl in 0.01f64..1.0) {
        let c = CurveClass { m, n };
        let longer = PantsBoundary { l3: p.l3 + dl, ..p };
        prop_assert!(gamma_mn_length(&longer, &c) > gamma_mn_length(&p, &c));
    }
}
