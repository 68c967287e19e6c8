use hypbounds::hyp2::{Isometry, PointUHP};
use proptest::prelude::*;

/// An element of SL(2, R) with moderate entries, `d` solved from the determinant.
fn sl2() -> impl Strategy<Value = Isometry> {
    (0.3f64..3.0, -2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(a, b, c)| Isometry::new(a, b, c, (1.0 + b * c) / a).unwrap())
}

fn point() -> impl Strategy<Value = PointUHP> {
    (-5.0f64..5.0, 0.05f64..5.0).prop_map(|(x, y)| PointUHP::new(x, y).unwrap())
}

proptest! {
    #[test]
    fn conjugation_keeps_translation_length(l in 0.05f64..6.0, h in sl2()) {
        let g = Isometry::diagonal(l).conjugate_by(&h);
        let got = g.translation_length().unwrap();
        prop_assert!((got - l).abs() < 1e-9 * l.max(1.0), "{got} vs {l}");
    }

    #[test]
    fn powers_multiply_length(l in 0.1f64..3.0, n in 1i64..7, h in sl2()) {
        let g = Isometry::diagonal(l).conjugate_by(&h);
        let got = g.pow(n).translation_length().unwrap();
        prop_assert!((got - n as f64 * l).abs() < 1e-8 * (n as f64 * l).max(1.0));
        let back = g.pow(-n).translation_length().unwrap();
        prop_assert!((back - got).abs() < 1e-8 * got.max(1.0));
    }

    #[test]
    fn triangle_inequality(p in point(), q in point(), r in point()) {
        prop_assert!(p.dist(&r) <= p.dist(&q) + q.dist(&r) + 1e-9);
    }

    #[test]
    fn isometries_preserve_distance(g in sl2(), p in point(), q in point()) {
        let d = p.dist(&q);
        let moved = g.apply(p).dist(&g.apply(q));
        prop_assert!((moved - d).abs() < 1e-8 * d.max(1.0), "{moved} vs {d}");
    }

    #[test]
    fn inverse_undoes(g in sl2(), p in point()) {
        let back = g.inverse().apply(g.apply(p));
        prop_assert!(back.dist(&p) < 1e-8);
    }
}
