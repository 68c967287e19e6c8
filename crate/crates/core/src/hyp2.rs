//! Upper half-plane primitives: Möbius isometries, points, ideal boundary
//! points and complete geodesics.
//!
//! Everything here is a plain `Copy` value. Matrices are kept at unit
//! determinant; the trace decides the isometry type and, for hyperbolic
//! elements, the translation length `2 acosh(|tr| / 2)`.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `|det - 1|` before a matrix is rescaled.
pub const DET_TOL: f64 = 1e-12;
/// Tolerance on `||tr| - 2|` for the parabolic class.
pub const PARABOLIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypError {
    #[error("isometry is not hyperbolic (|tr| = {trace_abs})")]
    NotHyperbolic { trace_abs: f64 },
    #[error("matrix determinant {det} is not positive")]
    NonPositiveDeterminant { det: f64 },
    #[error("point ({x}, {y}) is not in the upper half-plane")]
    NotInUpperHalfPlane { x: f64, y: f64 },
    #[error("axis endpoints coincide")]
    DegenerateAxis,
    #[error("axes share an ideal endpoint")]
    SharedEndpoint,
}

/// `ad - bc` with one rounding error, via fused multiply-add.
fn accurate_det(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let bc = b * c;
    let err = (-b).mul_add(c, bc);
    a.mul_add(d, -bc) + err
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsometryKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A real 2×2 matrix of unit determinant acting by `z ↦ (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds `[[a, b], [c, d]]`, rescaling by `1/sqrt(det)` when the
    /// determinant has drifted from 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, HypError> {
        let det = accurate_det(a, b, c, d);
        if !(det > 0.0) || !det.is_finite() {
            return Err(HypError::NonPositiveDeterminant { det });
        }
        Ok(Self::normalized(a, b, c, d, det))
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        // Drift smaller than the rounding noise of the entries themselves
        // carries no information, so it is left alone.
        let scale = (a.abs() * d.abs()).max(b.abs() * c.abs()).max(1.0);
        if (det - 1.0).abs() > DET_TOL * scale {
            let s = det.sqrt();
            Isometry { a: a / s, b: b / s, c: c / s, d: d / s }
        } else {
            Isometry { a, b, c, d }
        }
    }

    /// Diagonal hyperbolic element `diag(e^{l/2}, e^{-l/2})` translating
    /// along the imaginary axis by `l`.
    pub fn diagonal(translation: f64) -> Self {
        let h = 0.5 * translation;
        Isometry { a: h.exp(), b: 0.0, c: 0.0, d: (-h).exp() }
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> f64 {
        accurate_det(self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn kind(&self) -> IsometryKind {
        let t = self.trace().abs();
        if (t - 2.0).abs() <= PARABOLIC_TOL {
            IsometryKind::Parabolic
        } else if t < 2.0 {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Hyperbolic
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind() == IsometryKind::Hyperbolic
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = self.a.mul_add(other.a, self.b * other.c);
        let b = self.a.mul_add(other.b, self.b * other.d);
        let c = self.c.mul_add(other.a, self.d * other.c);
        let d = self.c.mul_add(other.b, self.d * other.d);
        Self::normalized(a, b, c, d, accurate_det(a, b, c, d))
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self^n` by repeated squaring; negative powers use the inverse.
    pub fn pow(&self, n: i64) -> Isometry {
        let mut base = if n < 0 { self.inverse() } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Isometry::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &Isometry) -> Isometry {
        h.compose(self).compose(&h.inverse())
    }

    /// `2 acosh(|tr| / 2)`.
    pub fn translation_length(&self) -> Result<f64, HypError> {
        let t = self.trace().abs();
        if self.kind() != IsometryKind::Hyperbolic {
            return Err(HypError::NotHyperbolic { trace_abs: t });
        }
        Ok(2.0 * (0.5 * t).acosh())
    }

    pub fn apply(&self, z: PointUHP) -> PointUHP {
        // (az + b)/(cz + d) with z = x + iy
        let (x, y) = (z.x, z.y);
        let nr = self.a * x + self.b;
        let ni = self.a * y;
        let dr = self.c * x + self.d;
        let di = self.c * y;
        let den = dr * dr + di * di;
        PointUHP { x: (nr * dr + ni * di) / den, y: (ni * dr - nr * di) / den }
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// Attracting and repelling fixed points of a hyperbolic element.
    pub fn fixed_points(&self) -> Result<(BoundaryPoint, BoundaryPoint), HypError> {
        if !self.is_hyperbolic() {
            return Err(HypError::NotHyperbolic { trace_abs: self.trace().abs() });
        }
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (p, q) = if c == 0.0 {
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(b / (d - a)))
        } else {
            // c x^2 + (d - a) x - b = 0, discriminant (d-a)^2 + 4bc = tr^2 - 4
            let bq = d - a;
            let disc = bq.mul_add(bq, 4.0 * b * c).max(0.0);
            let sq = disc.sqrt();
            let r1;
            let r2;
            if bq == 0.0 {
                let s = (b / c).sqrt();
                r1 = s;
                r2 = -s;
            } else {
                let q = -0.5 * (bq + bq.signum() * sq);
                r1 = q / c;
                r2 = -b / q;
            }
            (BoundaryPoint::Finite(r1), BoundaryPoint::Finite(r2))
        };
        // The attracting point has derivative |cz + d|^{-2} < 1 there.
        let derivative = |z: BoundaryPoint| match z {
            BoundaryPoint::Infinity => (self.d / self.a).powi(2),
            BoundaryPoint::Finite(x) => (c * x + d).powi(-2),
        };
        if derivative(p) < derivative(q) {
            Ok((p, q))
        } else {
            Ok((q, p))
        }
    }

    /// Invariant geodesic of a hyperbolic element.
    pub fn axis(&self) -> Result<Axis, HypError> {
        let (p, q) = self.fixed_points()?;
        Axis::new(p, q)
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

pub fn compose(g: &Isometry, h: &Isometry) -> Isometry {
    g.compose(h)
}

pub fn translation_length(g: &Isometry) -> Result<f64, HypError> {
    g.translation_length()
}

pub fn axis_of(g: &Isometry) -> Result<Axis, HypError> {
    g.axis()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointUHP {
    pub x: f64,
    pub y: f64,
}

impl PointUHP {
    pub fn new(x: f64, y: f64) -> Result<Self, HypError> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(HypError::NotInUpperHalfPlane { x, y });
        }
        Ok(PointUHP { x, y })
    }

    /// Hyperbolic distance, in the cancellation-free form
    /// `2 asinh(|z - w| / (2 sqrt(y_z y_w)))`.
    pub fn dist(&self, other: &PointUHP) -> f64 {
        let e = (self.x - other.x).hypot(self.y - other.y);
        2.0 * (e / (2.0 * (self.y * other.y).sqrt())).asinh()
    }
}

pub fn dist(p: &PointUHP, q: &PointUHP) -> f64 {
    p.dist(q)
}

/// A point of `∂ℍ² = ℝ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    /// Position on the circle chart `x ↦ atan x`, `∞ ↦ π/2`.
    pub fn chart(&self) -> f64 {
        match *self {
            BoundaryPoint::Finite(x) => x.atan(),
            BoundaryPoint::Infinity => FRAC_PI_2,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    fn total_cmp(&self, other: &BoundaryPoint) -> Ordering {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Ordering::Equal,
            (BoundaryPoint::Infinity, _) => Ordering::Greater,
            (_, BoundaryPoint::Infinity) => Ordering::Less,
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => x.total_cmp(y),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Unordered pair of distinct ideal endpoints of a complete geodesic, stored
/// finite-ascending with `∞` last.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    p: BoundaryPoint,
    q: BoundaryPoint,
}

impl Axis {
    pub fn new(p: BoundaryPoint, q: BoundaryPoint) -> Result<Self, HypError> {
        match p.total_cmp(&q) {
            Ordering::Equal => Err(HypError::DegenerateAxis),
            Ordering::Less => Ok(Axis { p, q }),
            Ordering::Greater => Ok(Axis { p: q, q: p }),
        }
    }

    pub fn finite(p: f64, q: f64) -> Result<Self, HypError> {
        Self::new(BoundaryPoint::Finite(p), BoundaryPoint::Finite(q))
    }

    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.p, self.q)
    }

    pub fn image_under(&self, g: &Isometry) -> Result<Axis, HypError> {
        Axis::new(g.apply_boundary(self.p), g.apply_boundary(self.q))
    }

    /// Endpoint-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &Axis, tol: f64) -> bool {
        let close = |u: BoundaryPoint, v: BoundaryPoint| match (u, v) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
                (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
            }
            _ => false,
        };
        close(self.p, other.p) && close(self.q, other.q)
    }

    pub fn crosses(&self, other: &Axis) -> Result<bool, HypError> {
        axes_cross(self, other)
    }

    /// Euclidean model of the geodesic.
    pub fn curve(&self) -> GeodesicCurve {
        match (self.p, self.q) {
            (BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
            | (BoundaryPoint::Infinity, BoundaryPoint::Finite(x)) => GeodesicCurve::Vertical { x },
            (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => {
                GeodesicCurve::Semicircle { center: 0.5 * (x + y), radius: 0.5 * (y - x).abs() }
            }
            _ => unreachable!("axis endpoints are distinct"),
        }
    }
}

/// Two complete geodesics cross iff their endpoint pairs interleave on the
/// boundary circle.
pub fn axes_cross(alpha: &Axis, beta: &Axis) -> Result<bool, HypError> {
    let (a0, a1) = (alpha.p.chart(), alpha.q.chart());
    let (b0, b1) = (beta.p.chart(), beta.q.chart());
    if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
        return Err(HypError::SharedEndpoint);
    }
    let (lo, hi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
    let inside = |t: f64| lo < t && t < hi;
    Ok(inside(b0) != inside(b1))
}

/// A geodesic drawn in the Euclidean plane: a vertical ray or a semicircle
/// centred on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicCurve {
    Vertical { x: f64 },
    Semicircle { center: f64, radius: f64 },
}

impl GeodesicCurve {
    /// The unique intersection point with another geodesic, if they cross.
    pub fn intersection(&self, other: &GeodesicCurve) -> Option<PointUHP> {
        use GeodesicCurve::*;
        let (x, y2) = match (*self, *other) {
            (Vertical { .. }, Vertical { .. }) => return None,
            (Vertical { x }, Semicircle { center, radius })
            | (Semicircle { center, radius }, Vertical { x }) => {
                (x, radius * radius - (x - center) * (x - center))
            }
            (Semicircle { center: c1, radius: r1 }, Semicircle { center: c2, radius: r2 }) => {
                if c1 == c2 {
                    return None;
                }
                let x = ((r1 - r2) * (r1 + r2) + (c2 - c1) * (c2 + c1)) / (2.0 * (c2 - c1));
                (x, r1 * r1 - (x - c1) * (x - c1))
            }
        };
        if y2 > 0.0 {
            Some(PointUHP { x, y: y2.sqrt() })
        } else {
            None
        }
    }

    /// Unsigned angle in `[0, π/2]` between the two curves at a crossing.
    pub fn crossing_angle(&self, other: &GeodesicCurve) -> f64 {
        use GeodesicCurve::*;
        let cos = match (*self, *other) {
            (Vertical { .. }, Vertical { .. }) => 1.0,
            (Vertical { x }, Semicircle { center, radius })
            | (Semicircle { center, radius }, Vertical { x }) => (x - center) / radius,
            (Semicircle { center: c1, radius: r1 }, Semicircle { center: c2, radius: r2 }) => {
                let d = c1 - c2;
                (r1 * r1 + r2 * r2 - d * d) / (2.0 * r1 * r2)
            }
        };
        cos.abs().min(1.0).acos()
    }

    /// Monotone coordinate along the curve: `x` on a semicircle, `ln y` on
    /// a vertical line.
    pub fn coordinate(&self, z: &PointUHP) -> f64 {
        match self {
            GeodesicCurve::Vertical { .. } => z.y.ln(),
            GeodesicCurve::Semicircle { .. } => z.x,
        }
    }
}
