//! Closed geodesics winding `m` times around one boundary of a pair of pants
//! and `n` times around another.
//!
//! With `c_i = cosh(l_i/2)`, `s_i = sinh(l_i/2)`, `c_{i,k} = cosh(k l_i/2)` and
//! `s_{i,k} = sinh(k l_i/2)`, the geodesic in the class `A^m B^n` has
//!
//! ```text
//! cosh(len/2) = (s_{1,m}/s_1)(s_{2,n}/s_2)(c_3 + c_1 c_2) + c_{1,m} c_{2,n}
//! ```
//!
//! A zero length encodes a cusp; the ratio `s_{i,k}/s_i` is then replaced by
//! its limit `k`. [`trace_length_oracle`] recomputes the same length from an
//! explicit holonomy representation.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hyp2::{HypError, Isometry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PantsError {
    #[error("boundary lengths must be finite and non-negative, got ({0}, {1}, {2})")]
    InvalidBoundary(f64, f64, f64),
    #[error("winding numbers must be at least 1, got ({0}, {1})")]
    InvalidClass(i64, i64),
    #[error("holonomy construction failed: {0}")]
    ConstructionFailure(String),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

/// Boundary lengths of a pair of pants; `0` marks a cusp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PantsBoundary {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl PantsBoundary {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self, PantsError> {
        let ok = |l: f64| l.is_finite() && l >= 0.0;
        if ok(l1) && ok(l2) && ok(l3) {
            Ok(PantsBoundary { l1, l2, l3 })
        } else {
            Err(PantsError::InvalidBoundary(l1, l2, l3))
        }
    }

    pub const IDEAL: PantsBoundary = PantsBoundary { l1: 0.0, l2: 0.0, l3: 0.0 };

    fn length(&self, i: usize) -> f64 {
        match i {
            1 => self.l1,
            2 => self.l2,
            3 => self.l3,
            _ => panic!("boundary index must be 1, 2 or 3"),
        }
    }

    /// `cosh(l_i / 2)`.
    pub fn c(&self, i: usize) -> f64 {
        (0.5 * self.length(i)).cosh()
    }

    /// `sinh(l_i / 2)`.
    pub fn s(&self, i: usize) -> f64 {
        (0.5 * self.length(i)).sinh()
    }

    pub fn swapped(&self) -> PantsBoundary {
        PantsBoundary { l1: self.l2, l2: self.l1, l3: self.l3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CurveClass {
    pub m: i64,
    pub n: i64,
}

impl CurveClass {
    pub fn new(m: i64, n: i64) -> Result<Self, PantsError> {
        if m >= 1 && n >= 1 {
            Ok(CurveClass { m, n })
        } else {
            Err(PantsError::InvalidClass(m, n))
        }
    }

    /// `cosh(k l / 2)` for the winding on boundary `i` (k = m for 1, n for 2).
    pub fn c_k(&self, p: &PantsBoundary, i: usize) -> f64 {
        (0.5 * self.winding(i) as f64 * p.length(i)).cosh()
    }

    pub fn s_k(&self, p: &PantsBoundary, i: usize) -> f64 {
        (0.5 * self.winding(i) as f64 * p.length(i)).sinh()
    }

    fn winding(&self, i: usize) -> i64 {
        match i {
            1 => self.m,
            2 => self.n,
            _ => panic!("only boundaries 1 and 2 carry a winding number"),
        }
    }
}

/// `sinh(m l/2) / sinh(l/2)`, equal to `m` at a cusp (`l = 0`).
pub fn chebyshev_ratio(m: i64, l: f64) -> f64 {
    if l == 0.0 {
        return m as f64;
    }
    if m == 1 {
        return 1.0;
    }
    let h = 0.5 * l;
    (m as f64 * h).sinh() / h.sinh()
}

/// Right-hand side of the length formula, i.e. `cosh(len/2)`.
pub fn gamma_mn_cosh_half(p: &PantsBoundary, class: &CurveClass) -> f64 {
    let (c1, c2, c3) = (p.c(1), p.c(2), p.c(3));
    chebyshev_ratio(class.m, p.l1) * chebyshev_ratio(class.n, p.l2) * (c3 + c1 * c2)
        + class.c_k(p, 1) * class.c_k(p, 2)
}

pub fn gamma_mn_length(p: &PantsBoundary, class: &CurveClass) -> f64 {
    2.0 * gamma_mn_cosh_half(p, class).acosh()
}

/// Generators of a discrete faithful representation of the pants group.
/// Boundary 1 is `A`, boundary 2 is `B`, boundary 3 is `A B⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsHolonomy {
    pub a: Isometry,
    pub b: Isometry,
}

impl PantsHolonomy {
    pub fn third(&self) -> Isometry {
        self.a * self.b.inverse()
    }

    /// `A^m B^n`.
    pub fn word(&self, class: &CurveClass) -> Isometry {
        self.a.pow(class.m) * self.b.pow(class.n)
    }
}

/// Builds `A`, `B` with `tr A = 2c_1`, `tr B = 2c_2` and `tr(A B⁻¹) = -2c_3`.
///
/// `A` is put in normal form (diagonal, or `[[1, 2], [0, 1]]` at a cusp) and
/// `B = [[p, q], [r, s]]` is solved from the two trace conditions, with the
/// remaining conjugation freedom fixed by `r > 0`. For the ideal pants this
/// returns `A = [[1, 2], [0, 1]]`, `B = [[1, 0], [2, 1]]`.
pub fn pants_holonomy(boundary: &PantsBoundary) -> Result<PantsHolonomy, PantsError> {
    let (c1, c2, c3) = (boundary.c(1), boundary.c(2), boundary.c(3));
    let s2 = boundary.s(2);
    let fail = |why: &str| PantsError::ConstructionFailure(why.to_string());

    let (a, b) = if boundary.l1 == 0.0 {
        // tr(A B^-1) = p + s - 2r = 2c2 - 2r
        let r = c2 + c3;
        let q = s2 * s2 / r;
        (Isometry::new(1.0, 2.0, 0.0, 1.0)?, Isometry::new(c2, q, r, c2)?)
    } else {
        let s1 = boundary.s(1);
        // e^{l/2} s + e^{-l/2} p = -2c3 with p + s = 2c2
        let e = (-0.5 * boundary.l1).exp();
        let s = -(c3 + c2 * e) / s1;
        let p = 2.0 * c2 - s;
        // ps - 1 = s2^2 - ((c3 + c1 c2)/s1)^2 < 0
        let k = (c3 + c1 * c2) / s1;
        let neg = (k - s2) * (k + s2);
        if !(neg > 0.0) || !neg.is_finite() {
            return Err(fail("off-diagonal product is not negative"));
        }
        let r = neg.sqrt();
        (Isometry::diagonal(boundary.l1), Isometry::new(p, -r, r, s)?)
    };
    let hol = PantsHolonomy { a, b };

    let tol = 1e-9 * (1.0 + c1 + c2 + c3);
    if (hol.a.trace().abs() - 2.0 * c1).abs() > tol
        || (hol.b.trace().abs() - 2.0 * c2).abs() > tol
        || (hol.third().trace() + 2.0 * c3).abs() > tol
    {
        return Err(fail("trace constraints not met"));
    }
    if !((hol.a * hol.b).trace() > 2.0) {
        return Err(fail("tr(AB) is not greater than 2"));
    }
    Ok(hol)
}

/// Translation length of `A^m B^n` in the explicit holonomy.
pub fn trace_length_oracle(p: &PantsBoundary, class: &CurveClass) -> Result<f64, PantsError> {
    let hol = pants_holonomy(p)?;
    Ok(hol.word(class).translation_length()?)
}

/// Result of the grid search over pants moduli.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuliMinimum {
    pub boundary: PantsBoundary,
    pub class: CurveClass,
    pub length: f64,
    /// Every class attaining the minimum (within 1e-12) at `boundary`.
    pub minimizing_classes: Vec<CurveClass>,
    pub cells: usize,
    /// `min (cosh(len/2) - (2mn + 1))` over all evaluated cells.
    pub min_bound_margin: f64,
    /// One-step forward differences of the length in `l1`, `l2`, `l3` at the minimizer.
    pub forward_differences: [f64; 3],
}

impl ModuliMinimum {
    pub fn strictly_increasing_at_min(&self) -> bool {
        self.forward_differences.iter().all(|&d| d > 0.0)
    }
}

/// All `(m, n)` with `m + n >= 3` and `m n <= mn_cap`, ordered.
pub fn admissible_classes(mn_cap: i64) -> Vec<CurveClass> {
    let mut out = Vec::new();
    for m in 1..=mn_cap {
        for n in 1..=mn_cap {
            if m + n >= 3 && m * n <= mn_cap {
                out.push(CurveClass { m, n });
            }
        }
    }
    out
}

/// Exhaustive search over `[0, length_cap]^3` (with `grid` points per axis,
/// `0` included) and all admissible classes. Ties are broken by
/// lexicographic order on `(l1, l2, l3, m, n)`.
pub fn minimize_over_moduli(mn_cap: i64, length_cap: f64, grid: usize) -> ModuliMinimum {
    assert!(mn_cap >= 3, "mn_cap must be at least 3");
    assert!(grid >= 2, "grid must have at least two points");
    let axis = crate::collar::uniform_grid(0.0, length_cap, grid);
    let classes = admissible_classes(mn_cap);

    let cells: Vec<(usize, usize, usize)> = (0..grid)
        .flat_map(|i| (0..grid).flat_map(move |j| (0..grid).map(move |k| (i, j, k))))
        .collect();

    #[derive(Clone, Copy)]
    struct Best {
        key: (usize, usize, usize, CurveClass),
        length: f64,
        margin: f64,
    }
    let pick = |x: Best, y: Best| -> Best {
        let margin = x.margin.min(y.margin);
        let better = match x.length.total_cmp(&y.length) {
            std::cmp::Ordering::Less => x,
            std::cmp::Ordering::Greater => y,
            std::cmp::Ordering::Equal => {
                if x.key <= y.key {
                    x
                } else {
                    y
                }
            }
        };
        Best { margin, ..better }
    };

    let best = cells
        .par_iter()
        .map(|&(i, j, k)| {
            let p = PantsBoundary { l1: axis[i], l2: axis[j], l3: axis[k] };
            classes
                .iter()
                .map(|c| {
                    let ch = gamma_mn_cosh_half(&p, c);
                    Best {
                        key: (i, j, k, *c),
                        length: 2.0 * ch.acosh(),
                        margin: ch - (2 * c.m * c.n + 1) as f64,
                    }
                })
                .reduce(pick)
                .expect("at least one admissible class")
        })
        .reduce_with(pick)
        .expect("grid is non-empty");

    let (i, j, k, class) = best.key;
    let boundary = PantsBoundary { l1: axis[i], l2: axis[j], l3: axis[k] };
    let minimizing_classes = classes
        .iter()
        .copied()
        .filter(|c| (gamma_mn_length(&boundary, c) - best.length).abs() <= 1e-12)
        .collect();
    let step = |idx: usize| if idx + 1 < grid { axis[idx + 1] } else { axis[idx] + axis[1] };
    let f = |p: PantsBoundary| gamma_mn_length(&p, &class);
    let forward_differences = [
        f(PantsBoundary { l1: step(i), ..boundary }) - best.length,
        f(PantsBoundary { l2: step(j), ..boundary }) - best.length,
        f(PantsBoundary { l3: step(k), ..boundary }) - best.length,
    ];

    ModuliMinimum {
        boundary,
        class,
        length: best.length,
        minimizing_classes,
        cells: cells.len() * classes.len(),
        min_bound_margin: best.margin,
        forward_differences,
    }
}

/// Largest gap between the closed form and the holonomy oracle over a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleAgreement {
    pub cases: usize,
    pub max_residual: f64,
    pub worst_boundary: PantsBoundary,
    pub worst_class: CurveClass,
}

pub fn oracle_agreement(
    cases: &[(PantsBoundary, CurveClass)],
) -> Result<OracleAgreement, PantsError> {
    let residuals = cases
        .par_iter()
        .map(|(p, c)| Ok((gamma_mn_length(p, c) - trace_length_oracle(p, c)?).abs()))
        .collect::<Result<Vec<f64>, PantsError>>()?;
    let (idx, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    let (worst_boundary, worst_class) = *cases
        .get(idx)
        .ok_or_else(|| PantsError::ConstructionFailure("no cases to compare".into()))?;
    Ok(OracleAgreement { cases: cases.len(), max_residual, worst_boundary, worst_class })
}
