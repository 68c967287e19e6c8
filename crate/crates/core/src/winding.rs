//! Length of a geodesic arc that enters a collar (or cusp neighbourhood),
//! winds around it and leaves through the same boundary component, as a
//! function of its winding number.
//!
//! Collar of half-width `w` about a core of length `L`:
//! `len = 2 asinh(sinh(W L / 2) cosh w)`.
//! Cusp cut off by the horocycle of length 4: `len = 2 asinh(2W)`.

use serde::Serialize;
use serde_json::json;

use crate::hyp2::PointUHP;
use crate::report::{Check, Report};

/// Arc in a collar: winding number, core length and collar width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarArcQuery {
    pub winding: f64,
    pub core_length: f64,
    pub width: f64,
}

/// Arc in a cusp neighbourhood bounded by the length-4 horocycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspArcQuery {
    pub winding: f64,
}

pub fn collar_arc_length(q: &CollarArcQuery) -> f64 {
    2.0 * ((0.5 * q.winding * q.core_length).sinh() * q.width.cosh()).asinh()
}

/// `2 log(2W + sqrt(4W² + 1))`.
pub fn cusp_arc_length(q: &CuspArcQuery) -> f64 {
    let w = q.winding;
    2.0 * (2.0 * w + (4.0 * w * w + 1.0).sqrt()).ln()
}

/// Inverse of [`collar_arc_length`] in the winding number.
pub fn winding_from_length(length: f64, core_length: f64, width: f64) -> f64 {
    (2.0 * ((0.5 * length).sinh() / width.cosh()).asinh() / core_length).max(0.0)
}

/// Inverse of [`cusp_arc_length`].
pub fn cusp_winding_from_length(length: f64) -> f64 {
    (0.5 * (0.5 * length).sinh()).max(0.0)
}

/// Places the arc endpoints `(∓2W, 1)` on the horocycle `y = 1`, where
/// adjacent lifts of a point sit 4 apart, and measures their hyperbolic
/// distance. Returns the largest deviation from [`cusp_arc_length`] over the
/// windings.
pub fn cusp_lemma_deviation(windings: &[f64]) -> f64 {
    windings
        .iter()
        .map(|&w| {
            let p1 = PointUHP { x: -2.0 * w, y: 1.0 };
            let p2 = PointUHP { x: 2.0 * w, y: 1.0 };
            (p1.dist(&p2) - cusp_arc_length(&CuspArcQuery { winding: w })).abs()
        })
        .fold(0.0, f64::max)
}

/// [`cusp_lemma_deviation`] over `samples` evenly spaced windings in `(0, W]`.
pub fn verify_cusp_lemma_geometrically(winding: f64, samples: usize) -> f64 {
    let n = samples.max(1);
    let ws: Vec<f64> = (1..=n).map(|i| winding * i as f64 / n as f64).collect();
    cusp_lemma_deviation(&ws)
}

/// Saccheri quadrilateral built directly in the upper half-plane: the core
/// lift is the imaginary axis, the feet are `i` and `i e^{W L}`, and the legs
/// run along the orthogonal circles `|z| = const` for hyperbolic length `w`.
/// The returned summit length is independent of the closed form.
pub fn saccheri_summit(q: &CollarArcQuery) -> f64 {
    let foot_sep = q.winding * q.core_length;
    // On |z| = R, the point at distance w from iR is R e^{iθ} with cot θ = sinh w.
    let theta = 1f64.atan2(q.width.sinh());
    let leg_end = |r: f64| PointUHP { x: r * theta.cos(), y: r * theta.sin() };
    let x1 = leg_end(1.0);
    let x2 = leg_end(foot_sep.exp());
    x1.dist(&x2)
}

/// Foot of the perpendicular from `z` to the imaginary axis, used to check
/// that the quadrilateral legs really are orthogonal to the core.
pub fn foot_on_imaginary_axis(z: &PointUHP) -> PointUHP {
    PointUHP { x: 0.0, y: z.x.hypot(z.y) }
}

/// Both lemmas against their geometric oracles: the cusp formula on
/// `windings` (tolerance 1e-12) and the collar formula on `collars`
/// (tolerance 1e-9).
pub fn lemma_report(windings: &[f64], collars: &[CollarArcQuery]) -> Report {
    let mut r = Report::new("winding");
    let cusp = cusp_lemma_deviation(windings);
    r.value("cusp_windings", windings).value("cusp_max_deviation", cusp);
    r.check(Check::from_margin("cusp_matches_distance", 1e-12 - cusp, None));

    let (worst, dev) = collars
        .iter()
        .map(|q| (q, (saccheri_summit(q) - collar_arc_length(q)).abs()))
        .fold((None, 0.0), |acc, (q, d)| if d >= acc.1 { (Some(q), d) } else { acc });
    r.value("collar_cases", collars.len()).value("collar_max_deviation", dev);
    r.check(Check::from_margin("collar_matches_saccheri", 1e-9 - dev, worst.map(|q| json!(q))));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collar::generalized_width;

    #[test]
    fn thin_collar_limit() {
        let l = collar_arc_length(&CollarArcQuery { winding: 1.3, core_length: 0.7, width: 0.0 });
        assert!((l - 1.3 * 0.7).abs() < 1e-14);
    }

    #[test]
    fn double_winding_value() {
        let t = 1f64.asinh();
        let l = collar_arc_length(&CollarArcQuery { winding: 2.0, core_length: 2.0 * t, width: t });
        assert!((l - 2.0 * 4f64.asinh()).abs() < 1e-13);
    }

    #[test]
    fn cusp_values() {
        let l1 = cusp_arc_length(&CuspArcQuery { winding: 1.0 });
        assert!((l1 - 9f64.acosh()).abs() < 1e-14);
        assert!((l1 - 2.0 * (2.0 + 5f64.sqrt()).ln()).abs() < 1e-15);
        let half = cusp_arc_length(&CuspArcQuery { winding: 0.5 });
        assert!((half - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!(cusp_arc_length(&CuspArcQuery { winding: 1e-12 }) < 1e-11);
        for w in [0.01, 0.3, 1.0, 7.5] {
            let a = cusp_arc_length(&CuspArcQuery { winding: w });
            assert!((a - 2.0 * (2.0 * w).asinh()).abs() < 1e-12);
        }
    }

    #[test]
    fn inverses() {
        let q = CollarArcQuery { winding: 1.7, core_length: 1.0, width: 0.5 };
        let back = winding_from_length(collar_arc_length(&q), 1.0, 0.5);
        assert!((back - 1.7).abs() < 1e-10);
        let w = winding_from_length(1e-9, 1.0, 3.0);
        assert!(w >= 0.0 && w < 1e-9);
        let l = cusp_arc_length(&CuspArcQuery { winding: 3.0 });
        assert!((cusp_winding_from_length(l) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cusp_geometry() {
        assert!(cusp_lemma_deviation(&[1.0]) < 1e-12);
        assert!(cusp_lemma_deviation(&[0.1, 0.5, 1.0, 2.0, 5.0, 10.0]) < 1e-12);
        assert!(cusp_lemma_deviation(&[1e-8]) < 1e-12);
        assert!(verify_cusp_lemma_geometrically(10.0, 500) < 1e-12);
    }

    #[test]
    fn lemma_report_passes() {
        let qs = [CollarArcQuery { winding: 1.5, core_length: 0.4, width: 1.1 }];
        let r = lemma_report(&[0.5, 1.0, 4.0], &qs);
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.checks[1].witness.is_some());
    }

    #[test]
    fn saccheri_matches_formula() {
        for (w, l, d) in [(1.0, 1.0, 0.5), (2.5, 0.3, 1.7), (0.2, 3.0, 0.01)] {
            let q = CollarArcQuery { winding: w, core_length: l, width: d };
            assert!((saccheri_summit(&q) - collar_arc_length(&q)).abs() < 1e-9);
        }
    }

    #[test]
    fn legs_are_perpendicular_of_requested_length() {
        let q = CollarArcQuery { winding: 1.0, core_length: 1.0, width: 0.8 };
        let theta = 1f64.atan2(q.width.sinh());
        let z = PointUHP { x: theta.cos(), y: theta.sin() };
        let foot = foot_on_imaginary_axis(&z);
        assert!((foot.y - 1.0).abs() < 1e-15);
        assert!((z.dist(&foot) - 0.8).abs() < 1e-14);
    }

    #[test]
    fn hook_into_concavity_function() {
        // 2 asinh(sinh(W t) cosh(w1(2t))) with L = 2t
        let t = 0.4;
        let (w1, _) = generalized_width(2.0 * t).unwrap();
        let l =
            collar_arc_length(&CollarArcQuery { winding: 1.0, core_length: 2.0 * t, width: w1 });
        let h1 = (t.sinh() * w1.cosh()).asinh();
        assert!((l - 2.0 * h1).abs() < 1e-14);
    }
}
