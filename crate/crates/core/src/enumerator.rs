//! Closed geodesics on the thrice-punctured sphere `ℍ²/Γ`, where `Γ` is the
//! free group on `a = [[1,2],[0,1]]` and `b = [[1,0],[2,1]]`.
//!
//! Conjugacy classes are cyclic words over `a, A = a⁻¹, b, B = b⁻¹`. Traces
//! are computed exactly in `i128`. Self-intersection numbers come from two
//! independent routes:
//!
//! * [`self_intersection_count`] enumerates conjugators `u` and keeps the
//!   lifts `u·axis(g)` that cross `axis(g)`, up to the action of `⟨g⟩` on
//!   both sides (double cosets `⟨g⟩u⟨g⟩`). Each intersection point is seen
//!   from both of its strands, hence the halving.
//! * [`tracer_count`] follows the geodesic through the fundamental domain
//!   `D = {|Re z| ≤ 1, |z - 1/2| ≥ 1/2, |z + 1/2| ≥ 1/2}` and intersects the
//!   resulting arcs pairwise. A point where `m` passes meet counts `C(m, 2)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hyp2::{BoundaryPoint, GeodesicCurve, HypError, Isometry, PointUHP};

/// Largest word length accepted by [`enumerate_classes`].
pub const MAX_ENUM_LEN: usize = 14;
/// Largest word length accepted by [`spectrum`].
pub const MAX_SPECTRUM_LEN: usize = 12;
/// Default conjugator cutoff is `|w| + DEFAULT_CUTOFF_EXTRA`.
pub const DEFAULT_CUTOFF_EXTRA: usize = 8;
pub const DEFAULT_TRACER_TOL: f64 = 1e-6;
pub const DEFAULT_MERGE_TOL: f64 = 1e-5;
/// Merge radius used to re-run the tracer when its count disagrees with the
/// double cosets: distinct crossings of long words can be closer than
/// [`DEFAULT_MERGE_TOL`].
pub const REFINED_MERGE_TOL: f64 = 1e-9;
/// Crossings at smaller angles are reported as degenerate.
pub const MIN_CROSSING_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnumError {
    #[error("word length {got} outside 1..={limit}")]
    InvalidLength { got: usize, limit: usize },
    #[error("invalid word {0:?}: {1}")]
    InvalidWord(String, &'static str),
    #[error("{0} is not hyperbolic")]
    NotHyperbolic(String),
    #[error("{0} is a proper power")]
    NotPrimitive(String),
    #[error("count for {word} not converged at cutoff {cutoff} ({count} vs {next})")]
    CutoffTooSmall { word: String, cutoff: usize, count: u64, next: u64 },
    #[error("crossing angle {angle:e} on {word} is below the resolution")]
    DegenerateCrossing { word: String, angle: f64 },
    #[error("tracing {word} failed: {reason}")]
    TracerFailure { word: String, reason: String },
    #[error("odd number ({keys}) of crossing lifts for {word}")]
    OddCrossingCount { word: String, keys: usize },
    #[error("counts disagree on {word}: double coset {doublecoset}, tracer {tracer}")]
    MethodDisagreement { word: String, doublecoset: u64, tracer: u64 },
    #[error("spectrum cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Hyp(#[from] HypError),
}

const CHARS: [char; 4] = ['a', 'A', 'b', 'B'];

#[inline]
fn inv(x: u8) -> u8 {
    x ^ 1
}

/// A cyclically reduced word. Letters are `0 = a`, `1 = A`, `2 = b`,
/// `3 = B`, which is also the order used for canonical forms. Words are
/// ordered shortlex: by length, then letter by letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn from_letters(letters: Vec<u8>) -> Result<Word, EnumError> {
        let w = Word(letters);
        let name = || w.to_string();
        if w.0.is_empty() {
            return Err(EnumError::InvalidWord(String::new(), "empty"));
        }
        if w.0.iter().any(|&x| x > 3) {
            return Err(EnumError::InvalidWord(name(), "letter out of range"));
        }
        if w.0.windows(2).any(|p| p[1] == inv(p[0])) {
            return Err(EnumError::InvalidWord(name(), "not freely reduced"));
        }
        if w.0.len() > 1 && w.0[0] == inv(w.0[w.0.len() - 1]) {
            return Err(EnumError::InvalidWord(name(), "not cyclically reduced"));
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&x| inv(x)).collect())
    }

    pub fn rotation(&self, k: usize) -> Word {
        let k = k % self.len();
        Word([&self.0[k..], &self.0[..k]].concat())
    }

    /// Swaps `a ↔ b` letter-wise.
    pub fn mirror(&self) -> Word {
        Word(self.0.iter().map(|&x| x ^ 2).collect())
    }

    /// Least word among all rotations of the word and of its inverse.
    pub fn canonical(&self) -> Word {
        let inv = self.inverse();
        let n = self.len();
        let mut best = self.0.clone();
        for src in [&self.0, &inv.0] {
            for k in 0..n {
                if rotation_cmp(src, k, &best) == Ordering::Less {
                    best = [&src[k..], &src[..k]].concat();
                }
            }
        }
        Word(best)
    }

    pub fn is_canonical(&self) -> bool {
        is_canonical_letters(&self.0)
    }

    /// `(v, k)` with `self = v^k` and `v` primitive.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.len();
        for d in 1..=n {
            if n % d == 0 && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return (Word(self.0[..d].to_vec()), n / d);
            }
        }
        unreachable!("d = n always works")
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive_root().1 == 1
    }
}

fn rotation_cmp(src: &[u8], k: usize, other: &[u8]) -> Ordering {
    src[k..].iter().chain(&src[..k]).cmp(other.iter())
}

fn is_canonical_letters(w: &[u8]) -> bool {
    let n = w.len();
    let inv: Vec<u8> = w.iter().rev().map(|&x| inv(x)).collect();
    (1..n).all(|k| rotation_cmp(w, k, w) != Ordering::Less)
        && (0..n).all(|k| rotation_cmp(&inv, k, w) != Ordering::Less)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.0 {
            write!(f, "{}", CHARS[x as usize])?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = EnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(|c| {
                CHARS
                    .iter()
                    .position(|&x| x == c)
                    .map(|i| i as u8)
                    .ok_or(EnumError::InvalidWord(s.to_string(), "unknown letter"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Word::from_letters(letters)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

type Mat = [i128; 4];

const GENERATORS: [Mat; 4] = [[1, 2, 0, 1], [1, -2, 0, 1], [1, 0, 2, 1], [1, 0, -2, 1]];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let dot = |p: i128, q: i128, r: i128, s: i128| {
        p.checked_mul(q)
            .and_then(|u| r.checked_mul(s).and_then(|v| u.checked_add(v)))
            .expect("integer word matrix overflow")
    };
    [
        dot(x[0], y[0], x[1], y[2]),
        dot(x[0], y[1], x[1], y[3]),
        dot(x[2], y[0], x[3], y[2]),
        dot(x[2], y[1], x[3], y[3]),
    ]
}

fn letters_matrix(letters: &[u8]) -> Mat {
    letters.iter().fold([1, 0, 0, 1], |m, &x| mat_mul(&m, &GENERATORS[x as usize]))
}

fn to_isometry(m: &Mat) -> Isometry {
    Isometry::new(m[0] as f64, m[1] as f64, m[2] as f64, m[3] as f64)
        .expect("integer word matrices have determinant one")
}

/// Exact trace of the product of generator matrices.
pub fn word_trace_exact(w: &Word) -> i128 {
    let m = letters_matrix(&w.0);
    m[0] + m[3]
}

pub fn word_trace(w: &Word) -> f64 {
    word_trace_exact(w) as f64
}

pub fn word_matrix(w: &Word) -> Isometry {
    to_isometry(&letters_matrix(&w.0))
}

/// `2 acosh(|tr| / 2)`.
pub fn word_length(w: &Word) -> f64 {
    2.0 * (word_trace(w).abs() / 2.0).acosh()
}

pub fn is_hyperbolic_word(w: &Word) -> bool {
    word_trace_exact(w).abs() > 2
}

/// Holonomy of the thrice-punctured sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGroup {
    pub gen_a: Isometry,
    pub gen_b: Isometry,
    /// Words of the three parabolic classes.
    pub cusp_classes: [Word; 3],
}

impl SurfaceGroup {
    pub fn standard() -> Self {
        SurfaceGroup {
            gen_a: to_isometry(&GENERATORS[0]),
            gen_b: to_isometry(&GENERATORS[2]),
            cusp_classes: [Word(vec![0]), Word(vec![2]), Word(vec![0, 3])],
        }
    }
}

/// Canonical representatives of all hyperbolic conjugacy classes with
/// cyclically reduced length at most `max_len`, ordered by length then word.
pub fn enumerate_classes(max_len: usize) -> Result<Vec<Word>, EnumError> {
    if !(1..=MAX_ENUM_LEN).contains(&max_len) {
        return Err(EnumError::InvalidLength { got: max_len, limit: MAX_ENUM_LEN });
    }
    let mut out = Vec::new();
    for len in 1..=max_len {
        out.extend(classes_of_length(len));
    }
    Ok(out)
}

fn classes_of_length(len: usize) -> Vec<Word> {
    // A canonical hyperbolic word starts with `a`: otherwise it only uses
    // b^{±1} and is a cusp power. Seeds of up to three letters are searched
    // in parallel.
    let depth = len.min(3);
    let mut seeds = vec![vec![0u8]];
    for _ in 1..depth {
        seeds = seeds
            .into_iter()
            .flat_map(|s| {
                let last = *s.last().unwrap();
                (0..4u8).filter(move |&x| x != inv(last)).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    let per_seed: Vec<Vec<Word>> = seeds
        .into_par_iter()
        .map(|seed| {
            let mut found = Vec::new();
            let mut buf = seed;
            extend(&mut buf, len, &mut found);
            found
        })
        .collect();
    per_seed.into_iter().flatten().collect()
}

fn extend(buf: &mut Vec<u8>, len: usize, found: &mut Vec<Word>) {
    if buf.len() == len {
        let cyclic = len == 1 || buf[0] != inv(buf[len - 1]);
        if cyclic && is_canonical_letters(buf) {
            let w = Word(buf.clone());
            if is_hyperbolic_word(&w) {
                found.push(w);
            }
        }
        return;
    }
    let last = *buf.last().unwrap();
    for x in 0..4u8 {
        if x != inv(last) {
            buf.push(x);
            extend(buf, len, found);
            buf.pop();
        }
    }
}

fn reduce(letters: impl IntoIterator<Item = u8>) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for x in letters {
        if out.last() == Some(&inv(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn inverse_letters(w: &[u8]) -> Vec<u8> {
    w.iter().rev().map(|&x| inv(x)).collect()
}

/// The vertex at signed position `i` on the tree geodesic through the
/// identity along the axis of `g`: a prefix of `g^∞` for `i ≥ 0`, of
/// `(g⁻¹)^∞` for `i < 0`.
fn path_vertex(g: &[u8], i: i64) -> Vec<u8> {
    let n = g.len() as i64;
    if i >= 0 {
        (0..i).map(|k| g[(k % n) as usize]).collect()
    } else {
        (0..-i).map(|k| inv(g[(n - 1 - k % n) as usize])).collect()
    }
}

fn common_suffix(x: &[u8], y: &[u8]) -> usize {
    x.iter().rev().zip(y.iter().rev()).take_while(|(p, q)| p == q).count()
}

/// Double cosets `⟨g⟩u⟨g⟩` with a representative of length `≤ cutoff`
/// whose lift shares a tile with `axis(g)`, as prefix-index pairs `(i, j)`
/// with `u ~ p_i p_j⁻¹`.
///
/// A lift `u·axis(g)` can only cross `axis(g)` inside a tile both pass
/// through, and the tiles along `axis(g)` are the vertices of the tree path
/// above. So `u = x y⁻¹` with `x`, `y` on that path, and only those
/// candidates need to be enumerated.
fn reachable_pairs(g: &[u8], cutoff: usize) -> BTreeSet<(usize, usize)> {
    let n = g.len() as i64;
    let r = (cutoff + 2 * g.len()) as i64;
    let verts: Vec<(i64, Vec<u8>)> = (-r..=r).map(|i| (i, path_vertex(g, i))).collect();
    let mut pairs = BTreeSet::new();
    for (i, x) in &verts {
        for (j, y) in &verts {
            let (i0, j0) = (i.rem_euclid(n) as usize, j.rem_euclid(n) as usize);
            if i0 == j0 || pairs.contains(&(i0, j0)) {
                continue;
            }
            let len = x.len() + y.len() - 2 * common_suffix(x, y);
            if len <= cutoff {
                pairs.insert((i0, j0));
            }
        }
    }
    pairs
}

/// Crossing lifts found at a given cutoff, keyed by the exact invariant
/// `tr(g·ugu⁻¹)` (which fixes the crossing angle) and the crossing position
/// along `axis(g)` modulo the translation length.
struct CrossingSet {
    keys: Vec<(i128, f64)>,
}

/// Both fixed points of a hyperbolic integer matrix with `c != 0`, from the
/// quadratic `c z² + (d - a) z - b = 0` without cancellation.
fn fixed_points_exact(m: &Mat) -> (f64, f64) {
    let tr = m[0] + m[3];
    let sqrt_d = ((tr * tr - 4) as f64).sqrt();
    let diff = (m[0] - m[3]) as f64;
    let q = diff + if diff >= 0.0 { sqrt_d } else { -sqrt_d };
    (q / (2.0 * m[2] as f64), -2.0 * m[1] as f64 / q)
}

fn crossing_keys(g: &[u8], cutoff: usize) -> Result<CrossingSet, EnumError> {
    let gm = letters_matrix(g);
    let t = (gm[0] + gm[3]).abs();
    let upper = t * t - 2;
    let ell = 2.0 * (t as f64 / 2.0).acosh();
    // orientation of the frame does not matter: the key is symmetric in the
    // two endpoints of the lift
    let (r, s) = fixed_points_exact(&gm);
    let frame = |z: f64| (z - r) / (z - s);
    let crossing_position = |h: &Mat| {
        let (z1, z2) = fixed_points_exact(h);
        0.5 * (-frame(z1) * frame(z2)).ln()
    };
    let g_inv = letters_matrix(&inverse_letters(g));
    // g'(r) = (c r + d)^-2: when r is attracting, conjugating by g moves
    // crossings towards r, i.e. to smaller positions
    let r_attracts = (gm[2] as f64 * r + gm[3] as f64).abs() > 1.0;

    let mut keys = Vec::new();
    for (i, j) in reachable_pairs(g, cutoff) {
        let u = reduce(g[..i].iter().copied().chain(inverse_letters(&g[..j])));
        let h = mat_mul(&mat_mul(&letters_matrix(&u), &gm), &letters_matrix(&inverse_letters(&u)));
        let gh = mat_mul(&gm, &h);
        let y = gh[0] + gh[3];
        if !(2 < y && y < upper) {
            continue;
        }
        // conjugating by g moves the crossing one period along the axis;
        // keep it within half a period of the frame origin, where the lift's
        // endpoints stay away from those of g
        let (mut h, mut pos) = (h, crossing_position(&h));
        for _ in 0..64 {
            if pos.abs() <= 0.5 * ell {
                break;
            }
            h = if (pos > 0.0) != r_attracts {
                mat_mul(&mat_mul(&g_inv, &h), &gm)
            } else {
                mat_mul(&mat_mul(&gm, &h), &g_inv)
            };
            pos = crossing_position(&h);
        }
        keys.push((y, pos.rem_euclid(ell)));
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // merge keys that describe the same lift, including across the seam at ℓ
    let tol = 1e-7 * ell.max(1.0);
    let mut merged: Vec<(i128, f64)> = Vec::new();
    for (y, pos) in keys {
        match merged.last() {
            Some(&(py, ppos)) if py == y && pos - ppos < tol => {}
            _ => merged.push((y, pos)),
        }
    }
    let mut out: Vec<(i128, f64)> = Vec::with_capacity(merged.len());
    let mut start = 0;
    while start < merged.len() {
        let y = merged[start].0;
        let mut end = start;
        while end < merged.len() && merged[end].0 == y {
            end += 1;
        }
        let group = &merged[start..end];
        let wraps = group.len() > 1 && group[0].1 + ell - group[group.len() - 1].1 < tol;
        out.extend_from_slice(if wraps { &group[..group.len() - 1] } else { group });
        start = end;
    }
    Ok(CrossingSet { keys: out })
}

fn count_at(w: &Word, cutoff: usize) -> Result<u64, EnumError> {
    let set = crossing_keys(&w.0, cutoff)?;
    if set.keys.len() % 2 == 1 {
        return Err(EnumError::OddCrossingCount { word: w.to_string(), keys: set.keys.len() });
    }
    Ok(set.keys.len() as u64 / 2)
}

fn require_hyperbolic(w: &Word) -> Result<(), EnumError> {
    if is_hyperbolic_word(w) {
        Ok(())
    } else {
        Err(EnumError::NotHyperbolic(w.to_string()))
    }
}

/// Self-intersection number of a primitive hyperbolic class by the double
/// coset method, with conjugators of length up to `cutoff`.
pub fn self_intersection_count(w: &Word, cutoff: usize) -> Result<u64, EnumError> {
    require_hyperbolic(w)?;
    if !w.is_primitive() {
        return Err(EnumError::NotPrimitive(w.to_string()));
    }
    let count = count_at(w, cutoff)?;
    let next = count_at(w, cutoff + 2)?;
    if count != next {
        return Err(EnumError::CutoffTooSmall { word: w.to_string(), cutoff, count, next });
    }
    Ok(count)
}

/// [`self_intersection_count`] starting at `|w| + extra`, raising the
/// cutoff by 2 while it has not converged (at most up to `2|w| + 2`, where
/// every crossing double coset has a representative).
pub fn self_intersection_count_auto(w: &Word, extra: usize) -> Result<(u64, usize), EnumError> {
    let mut cutoff = w.len() + extra;
    loop {
        match self_intersection_count(w, cutoff) {
            Ok(c) => return Ok((c, cutoff)),
            Err(EnumError::CutoffTooSmall { .. }) if cutoff < 2 * w.len() + 2 => cutoff += 2,
            Err(e) => return Err(e),
        }
    }
}

/// The four sides of `D`. `Side::A` is `Re z = -1`, glued to `Side::a`
/// (`Re z = 1`) by the generator `a`; `Side::B` and `Side::b` are the
/// circles `|z + 1/2| = 1/2` and `|z - 1/2| = 1/2`, glued by `b`.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    a,
    A,
    b,
    B,
}

const SIDES: [Side; 4] = [Side::a, Side::A, Side::b, Side::B];

impl Side {
    fn curve(self) -> GeodesicCurve {
        match self {
            Side::a => GeodesicCurve::Vertical { x: 1.0 },
            Side::A => GeodesicCurve::Vertical { x: -1.0 },
            Side::b => GeodesicCurve::Semicircle { center: 0.5, radius: 0.5 },
            Side::B => GeodesicCurve::Semicircle { center: -0.5, radius: 0.5 },
        }
    }

    /// Leaving `D` through this side enters the tile `x·D` for this letter.
    fn letter(self) -> u8 {
        match self {
            Side::a => 0,
            Side::A => 1,
            Side::b => 2,
            Side::B => 3,
        }
    }

    fn distance(self, z: &PointUHP) -> f64 {
        match self.curve() {
            GeodesicCurve::Vertical { x } => ((z.x - x).abs() / z.y).asinh(),
            GeodesicCurve::Semicircle { center, radius } => {
                let d2 = (z.x - center).powi(2) + z.y * z.y;
                ((d2 - radius * radius).abs() / (2.0 * radius * z.y)).asinh()
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    curve: GeodesicCurve,
    entry: PointUHP,
    exit: PointUHP,
    entry_side: Side,
    exit_side: Side,
}

impl Arc {
    fn contains(&self, z: &PointUHP, tol: f64) -> bool {
        let (c0, c1) = (self.curve.coordinate(&self.entry), self.curve.coordinate(&self.exit));
        let (lo, hi) = if c0 <= c1 { (c0, c1) } else { (c1, c0) };
        let slack = match self.curve {
            GeodesicCurve::Vertical { .. } => tol,
            GeodesicCurve::Semicircle { .. } => tol * z.y,
        };
        let c = self.curve.coordinate(z);
        lo - slack <= c && c <= hi + slack
    }
}

fn oriented_curve(from: BoundaryPoint, to: BoundaryPoint) -> Result<GeodesicCurve, HypError> {
    Ok(crate::hyp2::Axis::new(from, to)?.curve())
}

/// Position along the oriented geodesic `from → to`, increasing towards `to`.
fn along(from: BoundaryPoint, to: BoundaryPoint, z: &PointUHP) -> f64 {
    match (from, to) {
        (BoundaryPoint::Infinity, _) => -z.y.ln(),
        (_, BoundaryPoint::Infinity) => z.y.ln(),
        (BoundaryPoint::Finite(p), BoundaryPoint::Finite(q)) => {
            if p < q {
                z.x
            } else {
                -z.x
            }
        }
    }
}

/// The closed geodesic of `w` cut into arcs of `D`, one per letter.
struct Trace {
    arcs: Vec<Arc>,
    /// Length of the primitive period; arcs `i` and `i + period` coincide.
    period: usize,
}

fn trace_geodesic(w: &Word) -> Result<Trace, EnumError> {
    let fail = |reason: String| EnumError::TracerFailure { word: w.to_string(), reason };
    let g = letters_matrix(&w.0);
    // The geodesic in D is the axis of a conjugate `cur` of g; crossing a
    // side with letter x replaces it by x⁻¹·cur·x, which keeps the deck
    // transformation exact and makes closing up an integer comparison.
    let mut cur = g;
    let mut arcs: Vec<Arc> = Vec::new();
    loop {
        let (z1, z2) = fixed_points_exact(&cur);
        let attracting = |z: f64| (cur[2] as f64 * z + cur[3] as f64).abs() > 1.0;
        let (from, to) = if attracting(z2) { (z1, z2) } else { (z2, z1) };
        let (from, to) = (BoundaryPoint::Finite(from), BoundaryPoint::Finite(to));
        let curve = oriented_curve(from, to)?;
        let mut hits: Vec<(f64, Side, PointUHP)> = SIDES
            .iter()
            .filter_map(|&s| curve.intersection(&s.curve()).map(|z| (along(from, to, &z), s, z)))
            .collect();
        if hits.len() != 2 {
            return Err(fail(format!("geodesic meets {} sides of the domain", hits.len())));
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (_, entry_side, entry) = hits[0];
        let (_, exit_side, exit) = hits[1];
        arcs.push(Arc { curve, entry, exit, entry_side, exit_side });

        let x = exit_side.letter() as usize;
        cur = mat_mul(&mat_mul(&GENERATORS[inv(x as u8) as usize], &cur), &GENERATORS[x]);
        if cur == g {
            break;
        }
        if arcs.len() > w.len() {
            return Err(fail("geodesic does not close up".into()));
        }
    }
    let period = arcs.len();
    let (root, k) = w.primitive_root();
    let letters: Vec<u8> = arcs.iter().map(|a| a.exit_side.letter()).collect();
    if period != root.len() || letters != root.0 {
        return Err(fail(format!("cutting sequence {} does not match the word", Word(letters))));
    }
    let arcs = (0..k).flat_map(|_| arcs.iter().copied()).collect();
    Ok(Trace { arcs, period })
}

/// Canonical location of a crossing and the pass of the closed curve it
/// belongs to. Points on the sides `a`, `b` are moved to the glued sides
/// `A`, `B`; the pass then continues in the neighbouring arc.
fn canonical_pass(arcs: &[Arc], idx: usize, z: PointUHP, tol: f64) -> (PointUHP, usize) {
    let n = arcs.len();
    let arc = &arcs[idx];
    for side in [Side::a, Side::b] {
        if side.distance(&z) > tol {
            continue;
        }
        let moved = to_isometry(&GENERATORS[inv(side.letter()) as usize]).apply(z);
        let pass = if arc.exit_side == side && z.dist(&arc.exit) <= tol.max(z.dist(&arc.entry)) {
            (idx + 1) % n
        } else if arc.entry_side == side {
            (idx + n - 1) % n
        } else {
            idx
        };
        return (moved, pass);
    }
    (z, idx)
}

/// Self-intersection number of any hyperbolic class by tracing its geodesic
/// through the fundamental domain. `tol` is the hyperbolic slack used when
/// testing whether a crossing lies on an arc or on a side.
pub fn tracer_count(w: &Word, tol: f64) -> Result<u64, EnumError> {
    tracer_count_with(w, tol, DEFAULT_MERGE_TOL)
}

pub fn tracer_count_with(w: &Word, tol: f64, merge_tol: f64) -> Result<u64, EnumError> {
    require_hyperbolic(w)?;
    let trace = trace_geodesic(w)?;
    let arcs = &trace.arcs;
    let mut points: Vec<(PointUHP, [usize; 2])> = Vec::new();
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            if (j - i) % trace.period == 0 {
                continue;
            }
            let Some(z) = arcs[i].curve.intersection(&arcs[j].curve) else {
                continue;
            };
            if !(arcs[i].contains(&z, tol) && arcs[j].contains(&z, tol)) {
                continue;
            }
            let angle = arcs[i].curve.crossing_angle(&arcs[j].curve);
            if angle < MIN_CROSSING_ANGLE {
                return Err(EnumError::DegenerateCrossing { word: w.to_string(), angle });
            }
            let (zi, pi) = canonical_pass(arcs, i, z, tol);
            let (_, pj) = canonical_pass(arcs, j, z, tol);
            points.push((zi, [pi, pj]));
        }
    }

    // single-linkage clustering of the crossing points
    let mut parent: Vec<usize> = (0..points.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].0.dist(&points[j].0) < merge_tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut clusters: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for i in 0..points.len() {
        let r = root(&mut parent, i);
        clusters.entry(r).or_default().extend(points[i].1);
    }
    Ok(clusters.values().map(|passes| (passes.len() * (passes.len() - 1) / 2) as u64).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Doublecoset,
    Tracer,
    Both,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Doublecoset => "doublecoset",
            CountMethod::Tracer => "tracer",
            CountMethod::Both => "both",
        })
    }
}

impl FromStr for CountMethod {
    type Err = EnumError;

    fn from_str(s: &str) -> Result<Self, EnumError> {
        match s {
            "doublecoset" => Ok(CountMethod::Doublecoset),
            "tracer" => Ok(CountMethod::Tracer),
            "both" => Ok(CountMethod::Both),
            _ => Err(EnumError::Cache(format!("unknown count method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub word: Word,
    pub trace: f64,
    pub length: f64,
    pub self_intersections: u64,
    pub count_method: CountMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub cutoff_extra: usize,
    pub tol: f64,
    pub merge_tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            cutoff_extra: DEFAULT_CUTOFF_EXTRA,
            tol: DEFAULT_TRACER_TOL,
            merge_tol: DEFAULT_MERGE_TOL,
        }
    }
}

/// Counts one class with every applicable method. Proper powers go to the
/// tracer alone; a degenerate tracer run falls back to the double cosets.
/// If the tracer disagrees it is re-run once with [`REFINED_MERGE_TOL`].
pub fn count_class(w: &Word, cfg: &SpectrumConfig) -> Result<(u64, CountMethod), EnumError> {
    let traced = tracer_count_with(w, cfg.tol, cfg.merge_tol);
    if !w.is_primitive() {
        return traced.map(|c| (c, CountMethod::Tracer));
    }
    let (dc, _) = self_intersection_count_auto(w, cfg.cutoff_extra)?;
    let traced = match traced {
        Ok(tc) if tc != dc && cfg.merge_tol > REFINED_MERGE_TOL => {
            tracer_count_with(w, cfg.tol, REFINED_MERGE_TOL)
        }
        other => other,
    };
    match traced {
        Ok(tc) if tc == dc => Ok((dc, CountMethod::Both)),
        Ok(tc) => {
            Err(EnumError::MethodDisagreement { word: w.to_string(), doublecoset: dc, tracer: tc })
        }
        Err(EnumError::DegenerateCrossing { .. }) => Ok((dc, CountMethod::Doublecoset)),
        Err(e) => Err(e),
    }
}

/// Every hyperbolic class of word length `≤ max_len` and geodesic length
/// `≤ length_cap`, with its self-intersection number, sorted by length and
/// then word.
pub fn spectrum_entries(
    max_len: usize,
    length_cap: f64,
    cfg: &SpectrumConfig,
) -> Result<Vec<SpectrumEntry>, EnumError> {
    if !(1..=MAX_SPECTRUM_LEN).contains(&max_len) {
        return Err(EnumError::InvalidLength { got: max_len, limit: MAX_SPECTRUM_LEN });
    }
    let classes: Vec<Word> =
        enumerate_classes(max_len)?.into_iter().filter(|w| word_length(w) <= length_cap).collect();
    let results: Vec<Result<SpectrumEntry, EnumError>> = classes
        .into_par_iter()
        .map(|w| {
            let (count, method) = count_class(&w, cfg)?;
            Ok(SpectrumEntry {
                trace: word_trace(&w),
                length: word_length(&w),
                word: w,
                self_intersections: count,
                count_method: method,
            })
        })
        .collect();
    let mut entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    sort_entries(&mut entries);
    Ok(entries)
}

pub fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|x, y| x.length.total_cmp(&y.length).then_with(|| x.word.cmp(&y.word)));
}

/// Entries with `self_intersections ≥ k_min`; the first one witnesses the
/// bottom of the `k_min`-constrained length spectrum.
pub fn spectrum(
    max_len: usize,
    length_cap: f64,
    k_min: u64,
) -> Result<Vec<SpectrumEntry>, EnumError> {
    let all = spectrum_entries(max_len, length_cap, &SpectrumConfig::default())?;
    Ok(all.into_iter().filter(|e| e.self_intersections >= k_min).collect())
}

/// Header of a spectrum cache file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub max_len: usize,
    pub cutoff_extra: usize,
    pub tol: f64,
    /// Entries up to this length are stored.
    pub length_cap: f64,
}

impl CacheKey {
    /// Whether a cache written under `self` can answer a request under `req`.
    pub fn serves(&self, req: &CacheKey) -> bool {
        self.max_len == req.max_len
            && self.cutoff_extra == req.cutoff_extra
            && self.tol == req.tol
            && self.length_cap >= req.length_cap
    }
}

const CACHE_TAG: &str = "# spectrum-cache";

pub fn write_cache<W: Write>(
    out: &mut W,
    key: &CacheKey,
    entries: &[SpectrumEntry],
) -> std::io::Result<()> {
    writeln!(
        out,
        "{CACHE_TAG} max_len={} cutoff={} tol={:e} length_cap={:e}",
        key.max_len, key.cutoff_extra, key.tol, key.length_cap
    )?;
    for e in entries {
        writeln!(
            out,
            "{}\t{}\t{:.17e}\t{}\t{}",
            e.word, e.trace, e.length, e.self_intersections, e.count_method
        )?;
    }
    Ok(())
}

pub fn read_cache<R: BufRead>(input: R) -> Result<(CacheKey, Vec<SpectrumEntry>), EnumError> {
    let bad = |m: String| EnumError::Cache(m);
    let mut lines = input.lines();
    let header =
        lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(|e| bad(e.to_string()))?;
    let rest = header.strip_prefix(CACHE_TAG).ok_or_else(|| bad("missing header".into()))?;
    let fields: BTreeMap<&str, &str> =
        rest.split_whitespace().filter_map(|kv| kv.split_once('=')).collect();
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("header lacks {k}")));
    let num = |k: &str| -> Result<f64, EnumError> {
        get(k)?.parse::<f64>().map_err(|e| bad(format!("{k}: {e}")))
    };
    let int = |k: &str| -> Result<usize, EnumError> {
        get(k)?.parse::<usize>().map_err(|e| bad(format!("{k}: {e}")))
    };
    let key = CacheKey {
        max_len: int("max_len")?,
        cutoff_extra: int("cutoff")?,
        tol: num("tol")?,
        length_cap: num("length_cap")?,
    };
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(bad(format!("line {}: expected 5 fields", lineno + 2)));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
        entries.push(SpectrumEntry {
            word: cols[0].parse()?,
            trace: parse_f(cols[1])?,
            length: parse_f(cols[2])?,
            self_intersections: cols[3].parse().map_err(|e| bad(format!("{}: {e}", cols[3])))?,
            count_method: cols[4].parse()?,
        });
    }
    Ok((key, entries))
}
