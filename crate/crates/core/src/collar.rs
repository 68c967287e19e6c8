//! Collar widths around short simple closed geodesics.
//!
//! `w(x) = asinh(1 / sinh(x/2))` is the classical half-width of the embedded
//! collar about a geodesic of length `x`; `w1(x) = asinh(1 / sinh(x/4))` is
//! the wide side of the asymmetric collar, whose narrow side is
//! `2w(x) - w1(x)`.

use serde::Serialize;
use thiserror::Error;

use crate::report::{Check, Report};

/// Length of the boundary horocycle of an embedded cusp neighbourhood.
pub const CUSP_HOROCYCLE_LENGTH: f64 = 4.0;

/// Upper end of the range on which the asymmetric collar is used.
pub const SHORT_CORE_LIMIT: f64 = 2.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CollarError {
    #[error("core length must be positive, got {0}")]
    NonPositiveLength(f64),
}

fn check(x: f64) -> Result<(), CollarError> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(CollarError::NonPositiveLength(x))
    }
}

/// Symmetric collar half-width `asinh(1 / sinh(x/2))`.
pub fn collar_width(x: f64) -> Result<f64, CollarError> {
    check(x)?;
    Ok((0.5 * x).sinh().recip().asinh())
}

/// `(w1(x), 2w(x) - w1(x))`. The second component is returned unclamped.
pub fn generalized_width(x: f64) -> Result<(f64, f64), CollarError> {
    let w = collar_width(x)?;
    let w1 = (0.25 * x).sinh().recip().asinh();
    Ok((w1, 2.0 * w - w1))
}

/// `2 log((e^{x/4} + 1)/(e^{x/4} - 1))`, the distance between the two
/// short sides of the right-angled hexagon cut from the pants. Identical to
/// `2 w1(x)` through `asinh(1/sinh t) = log coth(t/2)`.
pub fn hexagon_gap(x: f64) -> Result<f64, CollarError> {
    check(x)?;
    let m = (0.25 * x).exp_m1();
    Ok(2.0 * ((m + 2.0) / m).ln())
}

pub fn cusp_horocycle_bound() -> f64 {
    CUSP_HOROCYCLE_LENGTH
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarProfile {
    pub core_length: f64,
    pub w: f64,
    pub w1: f64,
    /// `max(2w - w1, 0)`.
    pub w_narrow: f64,
    /// Set when `2w - w1 < 0` and the narrow side was clamped.
    pub narrow_clamped: bool,
}

impl CollarProfile {
    pub fn new(core_length: f64) -> Result<Self, CollarError> {
        let w = collar_width(core_length)?;
        let (w1, narrow) = generalized_width(core_length)?;
        Ok(CollarProfile {
            core_length,
            w,
            w1,
            w_narrow: narrow.max(0.0),
            narrow_clamped: narrow < 0.0,
        })
    }
}

/// Uniform grid on `[lo, hi]` with both endpoints.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "grid needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect()
}

/// Outcome of scanning the width inequalities on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthScan {
    pub points: usize,
    /// `min (w1 - w)` over `(0, upper]`.
    pub min_w1_minus_w: f64,
    /// `min (2w - w1)` over `(0, SHORT_CORE_LIMIT]`.
    pub min_narrow_short: f64,
    /// `max |hexagon_gap - 2 w1|`.
    pub max_gap_residual: f64,
    /// Largest forward difference of `w` and of `w1` (both must be negative).
    pub max_step_w: f64,
    pub max_step_w1: f64,
    /// Core length where `w1 = 2w`, located by bisection.
    pub crossover: f64,
}

impl WidthScan {
    pub fn holds(&self) -> bool {
        self.min_w1_minus_w > 0.0
            && self.min_narrow_short > 0.0
            && self.max_gap_residual < 1e-12
            && self.max_step_w < 0.0
            && self.max_step_w1 < 0.0
            && self.crossover > SHORT_CORE_LIMIT
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new("widths");
        r.value("scan", self);
        r.check(Check::from_margin("w1_exceeds_w", self.min_w1_minus_w, None))
            .check(Check::from_margin("narrow_side_positive", self.min_narrow_short, None))
            .check(Check::from_margin("hexagon_gap_is_2w1", 1e-12 - self.max_gap_residual, None))
            .check(Check::from_margin("w_decreasing", -self.max_step_w, None))
            .check(Check::from_margin("w1_decreasing", -self.max_step_w1, None))
            .check(Check::from_margin(
                "crossover_beyond_short_range",
                self.crossover - SHORT_CORE_LIMIT,
                None,
            ));
        r
    }
}

/// Scans `(0, upper]` with `points` uniform samples (the left endpoint is
/// replaced by the first positive grid point).
pub fn scan_widths(upper: f64, points: usize) -> WidthScan {
    let grid: Vec<f64> = uniform_grid(0.0, upper, points + 1).into_iter().skip(1).collect();
    let short: Vec<f64> =
        uniform_grid(0.0, SHORT_CORE_LIMIT, points + 1).into_iter().skip(1).collect();

    let mut min_w1_minus_w = f64::INFINITY;
    let mut max_gap_residual: f64 = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut max_step_w = f64::NEG_INFINITY;
    let mut max_step_w1 = f64::NEG_INFINITY;
    for &x in &grid {
        let w = collar_width(x).expect("grid is positive");
        let (w1, _) = generalized_width(x).expect("grid is positive");
        min_w1_minus_w = min_w1_minus_w.min(w1 - w);
        let gap = hexagon_gap(x).expect("grid is positive");
        max_gap_residual = max_gap_residual.max((gap - 2.0 * w1).abs());
        if let Some((pw, pw1)) = prev {
            max_step_w = max_step_w.max(w - pw);
            max_step_w1 = max_step_w1.max(w1 - pw1);
        }
        prev = Some((w, w1));
    }
    let min_narrow_short = short
        .iter()
        .map(|&x| generalized_width(x).expect("grid is positive").1)
        .fold(f64::INFINITY, f64::min);

    WidthScan {
        points,
        min_w1_minus_w,
        min_narrow_short,
        max_gap_residual,
        max_step_w,
        max_step_w1,
        crossover: narrow_side_crossover(),
    }
}

/// The core length beyond which `w1 >= 2w`, i.e. the narrow side vanishes.
pub fn narrow_side_crossover() -> f64 {
    let f = |x: f64| generalized_width(x).expect("bracket is positive").1;
    let (mut lo, mut hi) = (SHORT_CORE_LIMIT, 10.0);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
