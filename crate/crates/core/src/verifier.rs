//! Machine checks of the analytic inequalities behind the length bound for
//! closed geodesics with two self-intersections.
//!
//! Two chains are covered:
//!
//! * the long-loop case, where the lower bound collapses to
//!   `H(T) = log(T/(T-2)) + 2 log(T + sqrt(T²+1))` with `T = (e^t+1)²/(2e^t)`,
//!   minimised at the root `T0` of `dH/dT`;
//! * the short-loop case, built on `H1(s, t) = asinh(sinh(st) cosh(w1(2t)))`,
//!   its concavity in `s`, and the substitution `u = 2 cosh²(t/2)`.
//!
//! Every function here is pure; reports depend only on their grid sizes.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::collar::generalized_width;
use crate::report::{Check, Report};

/// Threshold separating the two cases of the proof.
pub const LOOP_THRESHOLD: f64 = 1.06;

/// Tolerance on the sign of second differences.
pub const CONCAVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("argument {0} is outside the domain T > 2")]
    DomainError(f64),
    #[error("dH/dT does not change sign on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("chain check {check} failed (margin {margin:e})")]
    ChainViolation { check: String, margin: f64, witness: Option<serde_json::Value> },
}

/// `4 log(1 + sqrt 2)`, the sharp length bound for one self-intersection.
pub fn m1() -> f64 {
    4.0 * std::f64::consts::SQRT_2.ln_1p()
}

/// `2 log(5 + 2 sqrt 6)`, the sharp length bound for two self-intersections.
pub fn m2() -> f64 {
    2.0 * (5.0 + 2.0 * 6f64.sqrt()).ln()
}

/// Length `2 acosh(2k + 1)` of the corkscrew geodesic with `k` crossings.
pub fn corkscrew(k: u32) -> f64 {
    2.0 * (2.0 * k as f64 + 1.0).acosh()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub m1: f64,
    pub m2: f64,
    pub gap: f64,
    pub threshold: f64,
    /// `(k, corkscrew(k))` for `k = 1..=8`.
    pub corkscrew: Vec<(u32, f64)>,
}

impl ConstantsTable {
    pub fn compute() -> Self {
        ConstantsTable {
            m1: m1(),
            m2: m2(),
            gap: m2() - m1(),
            threshold: LOOP_THRESHOLD,
            corkscrew: (1..=8).map(|k| (k, corkscrew(k))).collect(),
        }
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new("constants");
        r.value("M1", self.m1)
            .value("M2", self.m2)
            .value("gap", self.gap)
            .value("threshold", self.threshold)
            .value(
                "corkscrew",
                self.corkscrew
                    .iter()
                    .map(|&(k, v)| json!({"k": k, "length": v}))
                    .collect::<Vec<_>>(),
            );
        r.check(Check::from_margin("gap_below_threshold", self.threshold - self.gap, None));
        r.check(Check::from_margin(
            "corkscrew_1_is_M1",
            1e-12 - (self.corkscrew[0].1 - self.m1).abs(),
            None,
        ));
        r.check(Check::from_margin(
            "corkscrew_2_is_M2",
            1e-12 - (self.corkscrew[1].1 - self.m2).abs(),
            None,
        ));
        r
    }
}

fn domain(t: f64) -> Result<(), VerifierError> {
    if t > 2.0 && t.is_finite() {
        Ok(())
    } else {
        Err(VerifierError::DomainError(t))
    }
}

/// `log(T/(T-2)) + 2 log(T + sqrt(T²+1))`.
#[allow(non_snake_case)]
pub fn H(t: f64) -> Result<f64, VerifierError> {
    domain(t)?;
    Ok((t / (t - 2.0)).ln() + 2.0 * t.asinh())
}

/// `2/sqrt(T²+1) - 2/(T(T-2))`.
#[allow(non_snake_case)]
pub fn dH_dT(t: f64) -> Result<f64, VerifierError> {
    domain(t)?;
    Ok(2.0 / t.hypot(1.0) - 2.0 / (t * (t - 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
    /// `|dH/dT(root)|`.
    pub residual: f64,
}

/// Bisection for the minimiser of `H` on the bracket `[3, 25/8]`.
pub fn find_t0() -> Result<RootBracket, VerifierError> {
    let (lo0, hi0) = (3.0, 25.0 / 8.0);
    let f = |t: f64| dH_dT(t).expect("bracket lies in the domain");
    if !(f(lo0) < 0.0 && f(hi0) > 0.0) {
        return Err(VerifierError::BracketFailure { lo: lo0, hi: hi0 });
    }
    let (mut lo, mut hi) = (lo0, hi0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(RootBracket { lo: lo0, hi: hi0, root, residual: f(root).abs() })
}

/// `asinh(sinh(s t) cosh(w1(2t)))`.
#[allow(non_snake_case)]
pub fn H1(s: f64, t: f64) -> f64 {
    h1_scaled(s, t, collar_factor(t))
}

/// `cosh(w1(2t))`, the only part of `H1` that does not depend on `s`.
fn collar_factor(t: f64) -> f64 {
    let (w1, _) = generalized_width(2.0 * t).expect("t must be positive");
    w1.cosh()
}

fn h1_scaled(s: f64, t: f64, factor: f64) -> f64 {
    ((s * t).sinh() * factor).asinh()
}

/// `n` log-spaced points on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| if i + 1 == n { hi } else { (a + (b - a) * i as f64 / (n - 1) as f64).exp() })
        .collect()
}

/// Worst value of `f` over the grid together with its location.
fn worst<F>(points: &[(f64, f64)], f: F) -> (f64, (f64, f64))
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    worst_with(points, |s, t, _| f(s, t), |_| 0.0)
}

/// [`worst`] with a per-`t` quantity computed once and shared by every `s`
/// in that row. `points` must be grouped by `t`.
fn worst_with<F, G>(points: &[(f64, f64)], f: F, per_t: G) -> (f64, (f64, f64))
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    let f = &f;
    points
        .par_chunk_by(|x, y| x.1 == y.1)
        .flat_map_iter(|row| {
            let c = per_t(row[0].1);
            row.iter().map(move |&(s, t)| (f(s, t, c), (s, t)))
        })
        .reduce_with(|x, y| match x.0.total_cmp(&y.0) {
            std::cmp::Ordering::Greater => x,
            std::cmp::Ordering::Less => y,
            std::cmp::Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        })
        .expect("grid is non-empty")
}

/// Short-loop chain. `t_grid` log-spaced values of `t ∈ [1e-4, 0.53]` and
/// 1000 values of `α ∈ [1e-3, 6]`.
pub fn verify_concavity_chain(t_grid: usize) -> Report {
    assert!(t_grid >= 100, "t_grid must be at least 100");
    let ts = log_grid(1e-4, 0.5 * LOOP_THRESHOLD, t_grid);
    let alphas = crate::collar::uniform_grid(1e-3, 6.0, 1000);
    let mut r = Report::new("concavity_chain");
    r.value("t_grid", t_grid).value("alpha_grid", alphas.len());

    // (a) concavity of H1 in s: second differences at relative step 1e-2
    let cells: Vec<(f64, f64)> =
        ts.iter().flat_map(|&t| alphas.iter().map(move |&s| (s, t))).collect();
    let (worst_d2, (s, t)) = worst_with(
        &cells,
        |s, t, c| {
            let h = 1e-2 * s;
            h1_scaled(s - h, t, c) + h1_scaled(s + h, t, c) - 2.0 * h1_scaled(s, t, c)
        },
        collar_factor,
    );
    r.check(Check::from_margin(
        "h1_concave_in_s",
        CONCAVITY_TOL - worst_d2,
        Some(json!({"s": s, "t": t, "second_difference": worst_d2})),
    ));

    // (b) for a residual winding α ∈ (0, 1]: k further turns cost at least
    // one turn, and one turn from α costs at least the turn from 1 to 2
    let small: Vec<(f64, f64)> = cells.iter().copied().filter(|&(a, _)| a <= 1.0).collect();
    let (worst_k, (a, t)) = worst_with(
        &small,
        |a, t, c| {
            (1..=5)
                .map(|k| h1_scaled(1.0 + a, t, c) - h1_scaled(k as f64 + a, t, c))
                .fold(f64::NEG_INFINITY, f64::max)
        },
        collar_factor,
    );
    r.check(Check::from_margin(
        "more_turns_cost_more",
        CONCAVITY_TOL - worst_k,
        Some(json!({"alpha": a, "t": t, "deficit": worst_k})),
    ));
    let (worst_b, (a, t)) = worst_with(
        &small,
        |a, t, c| {
            let h = |s| h1_scaled(s, t, c);
            (2.0 * h(2.0) - 2.0 * h(1.0)) - (2.0 * h(1.0 + a) - 2.0 * h(a))
        },
        collar_factor,
    );
    r.check(Check::from_margin(
        "extra_turn_increment",
        CONCAVITY_TOL - worst_b,
        Some(json!({"alpha": a, "t": t, "deficit": worst_b})),
    ));

    // substitution u = 2 cosh^2(t/2)
    let tcells: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 0.0)).collect();
    let (worst_u, (t, _)) = worst(&tcells, |t, _| {
        let u = 2.0 * (0.5 * t).cosh().powi(2);
        let lhs = 2.0 * H1(2.0, t) - 2.0 * H1(1.0, t);
        let rhs = 2.0 * (u * (2.0 * u - 2.0)).asinh() - 2.0 * u.asinh();
        (lhs - rhs).abs()
    });
    r.check(Check::from_margin(
        "u_substitution",
        1e-9 - worst_u,
        Some(json!({"t": t, "residual": worst_u})),
    ));

    // u(2u - 2) >= 2u once u > 2
    let (worst_v, (t, _)) = worst(&tcells, |t, _| {
        let u = 2.0 * (0.5 * t).cosh().powi(2);
        (2.0 * (2.0 * u).asinh() - 2.0 * u.asinh())
            - (2.0 * (u * (2.0 * u - 2.0)).asinh() - 2.0 * u.asinh())
    });
    r.check(Check::from_margin(
        "u_exceeds_two",
        CONCAVITY_TOL - worst_v,
        Some(json!({"t": t, "deficit": worst_v})),
    ));

    // (c) 2 asinh(2u) - 2 asinh(u) is increasing on u > 2; its infimum is at u = 2
    let g = |u: f64| 2.0 * (2.0 * u).asinh() - 2.0 * u.asinh();
    let us = crate::collar::uniform_grid(2.0, 50.0, 10_000);
    let min_step = us.windows(2).map(|w| g(w[1]) - g(w[0])).fold(f64::INFINITY, f64::min);
    r.check(Check::from_margin("u_increment_increasing", min_step, None));
    let floor = g(2.0);
    r.value("asinh_floor", floor);
    r.check(Check::from_margin(
        "asinh_floor_above_threshold",
        floor - LOOP_THRESHOLD,
        Some(json!({"value": floor})),
    ));

    // end of chain on the t-grid
    let (worst_e, (t, _)) = worst(&tcells, |t, _| -(2.0 * H1(2.0, t) - 2.0 * H1(1.0, t)));
    r.check(Check::from_margin(
        "second_turn_above_threshold",
        -worst_e - LOOP_THRESHOLD,
        Some(json!({"t": t, "value": -worst_e})),
    ));

    // (d)
    let gap = m2() - m1();
    r.value("gap", gap);
    r.check(Check::from_margin("threshold_above_gap", LOOP_THRESHOLD - gap, None));
    r
}

/// `T = (e^t + 1)² / (2 e^t) = 1 + cosh t` and the cancellation-free `T - 2`.
fn t_of(t: f64) -> (f64, f64) {
    (1.0 + t.cosh(), 2.0 * (0.5 * t).sinh().powi(2))
}

/// Long-loop chain on a log grid of `t ∈ [1e-4, 5]` with `t_grid` points.
pub fn verify_case1_chain(t_grid: usize) -> Result<Report, VerifierError> {
    let ts = log_grid(1e-4, 5.0, t_grid.max(2));
    let root = find_t0()?;
    let h_t0 = H(root.root)?;
    let mut r = Report::new("case1_chain");
    r.value("t_grid", ts.len()).value("T0", root.root).value("H_T0", h_t0).value(
        "note",
        "the collar-crossing term is the symmetric width 2w(2t), equal to log(T/(T-2))",
    );

    let tcells: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 0.0)).collect();

    // (a) T > 2 and T -> 2 as t -> 0
    let (worst_a, (t, _)) = worst(&tcells, |t, _| -t_of(t).1);
    r.check(Check::from_margin("T_above_two", -worst_a, Some(json!({"t": t}))));
    r.check(Check::from_margin("T_tends_to_two", 1e-7 - t_of(ts[0]).1, None));

    // (b) 2 log((e^t+1)/(e^t-1)) = log(T/(T-2))
    let (worst_b, (t, _)) = worst(&tcells, |t, _| {
        let m = t.exp_m1();
        let lhs = 2.0 * ((m + 2.0) / m).ln();
        let (big_t, tm2) = t_of(t);
        (lhs - (big_t / tm2).ln()).abs()
    });
    r.check(Check::from_margin(
        "collar_term_in_T",
        1e-10 - worst_b,
        Some(json!({"t": t, "residual": worst_b})),
    ));

    // (c) 2 asinh(sinh t cosh(log((e^{t/2}+1)/(e^{t/2}-1)))) = 2 log(T + sqrt(T^2+1))
    let (worst_c, (t, _)) = worst(&tcells, |t, _| {
        let m = (0.5 * t).exp_m1();
        let width = ((m + 2.0) / m).ln();
        let lhs = 2.0 * (t.sinh() * width.cosh()).asinh();
        let big_t = t_of(t).0;
        let rhs = 2.0 * (big_t + big_t.hypot(1.0)).ln();
        (lhs - rhs).abs()
    });
    r.check(Check::from_margin(
        "winding_term_in_T",
        1e-9 - worst_c,
        Some(json!({"t": t, "residual": worst_c})),
    ));

    // (d) the assembled bound never drops below H(T0), which exceeds M2
    let (worst_d, (t, _)) = worst(&tcells, |t, _| {
        let (big_t, tm2) = t_of(t);
        -((big_t / tm2).ln() + 2.0 * big_t.asinh())
    });
    let min_sum = -worst_d;
    r.value("min_bound_on_grid", min_sum);
    r.check(Check::from_margin(
        "bound_above_H_T0",
        min_sum - h_t0 + 1e-12,
        Some(json!({"t": t, "value": min_sum})),
    ));
    let intermediate = (25.0f64 / 9.0).ln() + 2.0 * (3.0 + 10f64.sqrt()).ln();
    r.value("intermediate_bound", intermediate);
    r.check(Check::from_margin("H_T0_above_intermediate", h_t0 - intermediate, None));
    r.check(Check::from_margin("intermediate_above_M2", intermediate - m2(), None));
    r.check(Check::from_margin("H_T0_above_M2", h_t0 - m2(), None));
    Ok(r)
}

/// Everything about `H` and its minimiser.
pub fn verify_h_analysis() -> Result<Report, VerifierError> {
    let mut r = Report::new("h_analysis");
    let at3 = dH_dT(3.0)?;
    let at25_8 = dH_dT(25.0 / 8.0)?;
    let root = find_t0()?;
    let h_t0 = H(root.root)?;
    r.value("dH_dT_at_3", at3)
        .value("dH_dT_at_25_8", at25_8)
        .value("T0", root.root)
        .value("residual", root.residual)
        .value("H_T0", h_t0);
    r.check(Check::from_margin("negative_at_3", -at3, None));
    r.check(Check::from_margin("positive_at_25_8", at25_8, None));
    r.check(Check::from_margin(
        "root_in_bracket",
        (root.root - 3.0).min(3.125 - root.root),
        Some(json!({"root": root.root})),
    ));
    r.check(Check::from_margin("root_residual", 1e-10 - root.residual, None));

    // sign pattern around the root on a grid of (2, 50]
    let left = crate::collar::uniform_grid(2.0 + 1e-6, root.root - 1e-9, 2000);
    let right = crate::collar::uniform_grid(root.root + 1e-9, 50.0, 2000);
    let worst_left = left.iter().map(|&t| dH_dT(t).unwrap()).fold(f64::NEG_INFINITY, f64::max);
    let worst_right = right.iter().map(|&t| dH_dT(t).unwrap()).fold(f64::INFINITY, f64::min);
    r.check(Check::from_margin("decreasing_left_of_root", -worst_left, None));
    r.check(Check::from_margin("increasing_right_of_root", worst_right, None));

    // derivative against a central difference
    let fd = crate::collar::uniform_grid(2.05, 20.0, 2000)
        .into_iter()
        .map(|t| {
            let h = 1e-5;
            let num = (H(t + h).unwrap() - H(t - h).unwrap()) / (2.0 * h);
            (num - dH_dT(t).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    r.check(Check::from_margin("derivative_matches_difference", 1e-6 - fd, None));

    let intermediate = (25.0f64 / 9.0).ln() + 2.0 * (3.0 + 10f64.sqrt()).ln();
    r.check(Check::from_margin("H_T0_above_intermediate", h_t0 - intermediate, None));
    r.check(Check::from_margin("H_T0_above_M2", h_t0 - m2(), None));
    Ok(r)
}

/// Turns the first failing check of a chain report into an error.
pub fn require(report: &Report) -> Result<(), VerifierError> {
    match report.first_failure() {
        None => Ok(()),
        Some(c) => Err(VerifierError::ChainViolation {
            check: format!("{}.{}", report.suite, c.id),
            margin: c.margin,
            witness: c.witness.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with mpmath at 30 digits.
    const T0: f64 = 3.052_300_344_613_940_8;
    const H_T0: f64 = 4.734_630_547_567_880_6;
    const M1: f64 = 3.525_494_348_078_172;
    const M2: f64 = 4.584_863_339_122_355;

    #[test]
    fn constants() {
        assert!((m1() - M1).abs() < 1e-15);
        assert!((m2() - M2).abs() < 1e-15);
        assert!((m2() - m1() - 1.059_368_991_044_183).abs() < 1e-14);
        assert!(m2() - m1() < LOOP_THRESHOLD);
        assert!((corkscrew(1) - m1()).abs() < 1e-14);
        assert!((corkscrew(2) - m2()).abs() < 1e-14);
        let t = ConstantsTable::compute();
        assert!(t.report().passed());
    }

    #[test]
    fn h_values() {
        // log 3 + 2 log(3 + sqrt 10)
        assert!((H(3.0).unwrap() - 4.735_505_207_132_243).abs() < 1e-13);
        assert!(H(2.0 + 1e-12).unwrap() > 25.0);
        assert!(H(1e8).unwrap() > 30.0);
        assert_eq!(H(2.0), Err(VerifierError::DomainError(2.0)));
        assert!(dH_dT(1.5).is_err());
    }

    #[test]
    fn derivative_signs() {
        assert!(dH_dT(3.0).unwrap() < 0.0);
        assert!((dH_dT(3.0).unwrap() - (2.0 / 10f64.sqrt() - 2.0 / 3.0)).abs() < 1e-15);
        assert!(dH_dT(25.0 / 8.0).unwrap() > 0.0);
        let h = 1e-5;
        let fd = (H(4.0 + h).unwrap() - H(4.0 - h).unwrap()) / (2.0 * h);
        assert!((fd - dH_dT(4.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn root_matches_quartic() {
        // T0 is the real root > 2 of T^4 - 4T^3 + 3T^2 - 1
        let r = find_t0().unwrap();
        assert!((r.root - T0).abs() < 1e-13, "{}", r.root);
        assert!(r.root > 3.0 && r.root < 3.125);
        assert!(r.residual <= 1e-10);
        let h = H(r.root).unwrap();
        assert!((h - H_T0).abs() < 1e-13);
        assert!(h > 4.658_544);
        assert!(h > M2);
        assert_eq!(find_t0().unwrap(), r);
    }

    #[test]
    fn h1_regression_and_substitution() {
        // mpmath: H1(1, asinh 1) = 1.61489091617309..., H1(2, asinh 1) = 2.61956057645301...
        let t = 1f64.asinh();
        assert!((H1(1.0, t) - 1.614_890_916_173_095).abs() < 1e-13);
        assert!((H1(2.0, t) - 2.619_560_576_453_013).abs() < 1e-13);
        for t in [0.01f64, 0.2, 0.53, 1.0] {
            let u = 2.0 * (0.5 * t).cosh().powi(2);
            let lhs = 2.0 * H1(2.0, t) - 2.0 * H1(1.0, t);
            let rhs = 2.0 * (u * (2.0 * u - 2.0)).asinh() - 2.0 * u.asinh();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn h1_consistent_with_collar_arc() {
        use crate::winding::{collar_arc_length, CollarArcQuery};
        let (w, lc) = (1.6, 0.8);
        let (w1, _) = generalized_width(lc).unwrap();
        let arc = collar_arc_length(&CollarArcQuery { winding: w, core_length: lc, width: w1 });
        assert!((2.0 * H1(w, 0.5 * lc) - arc).abs() < 1e-13);
    }

    #[test]
    fn concavity_spot_check() {
        let t = 0.3;
        assert!(H1(1.9, t) + H1(2.1, t) - 2.0 * H1(2.0, t) < 0.0);
    }

    #[test]
    fn increments_shrink_past_one_turn() {
        // concavity makes the one-turn increment decrease in α, so the
        // comparison with the 1 -> 2 increment only holds for α <= 1
        let t = 0.2;
        let inc = |a: f64| H1(1.0 + a, t) - H1(a, t);
        assert!(inc(0.5) > inc(1.0));
        assert!(inc(3.0) < inc(1.0));
    }

    #[test]
    fn asinh_floor() {
        let v = 2.0 * 4f64.asinh() - 2.0 * 2f64.asinh();
        // mpmath: 1.30215414416458...
        assert!((v - 1.302_154_144_164_582).abs() < 1e-14);
        assert!(v > LOOP_THRESHOLD);
        assert!(m2() - m1() < LOOP_THRESHOLD);
    }

    #[test]
    fn chains_pass() {
        let c = verify_concavity_chain(200);
        assert!(c.passed(), "{:?}", c.first_failure());
        require(&c).unwrap();
        let d = verify_case1_chain(2000).unwrap();
        assert!(d.passed(), "{:?}", d.first_failure());
        let h = verify_h_analysis().unwrap();
        assert!(h.passed(), "{:?}", h.first_failure());
    }

    #[test]
    fn case1_point_values() {
        let (big_t, _) = t_of(1.0);
        let e = std::f64::consts::E;
        assert!((big_t - (e + 1.0).powi(2) / (2.0 * e)).abs() < 1e-15);
        assert!((big_t - 2.543_080_634_815_244).abs() < 1e-14);
        let (near, tm2) = t_of(1e-6);
        assert!(near > 2.0 && tm2 > 0.0 && tm2 < 1e-12);
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(verify_concavity_chain(100), verify_concavity_chain(100));
        assert_eq!(verify_case1_chain(500).unwrap(), verify_case1_chain(500).unwrap());
    }

    #[test]
    fn require_reports_violation() {
        let mut r = Report::new("x");
        r.check(Check::from_margin("bad", -0.5, Some(json!({"t": 1.0}))));
        match require(&r) {
            Err(VerifierError::ChainViolation { check, .. }) => assert_eq!(check, "x.bad"),
            other => panic!("{other:?}"),
        }
    }
}
