//! Upper half-plane primitives: isometries in `PSL(2, R)`, points, complete
//! geodesics, classification and translation length.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerances::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypError {
    #[error("point ({x}, {y}) is not in the upper half-plane")]
    NotInUpperHalfPlane { x: f64, y: f64 },
    #[error("matrix has non-positive determinant {det}")]
    BadDeterminant { det: f64 },
    #[error("isometry is not hyperbolic (|tr| = {abs_trace})")]
    NotHyperbolic { abs_trace: f64 },
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
}

/// A real unimodular 2x2 matrix, read projectively (`M` and `-M` are equal).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds an isometry from entries, rescaling to unit determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, HypError> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(HypError::BadDeterminant { det });
        }
        let s = det.sqrt();
        Ok(Isometry { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// Entries taken as given; caller guarantees `det = 1` up to rounding.
    pub const fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Self {
        Isometry { a, b, c, d }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Divides by `√det` when the drift is above tolerance and the entries
    /// are small enough for `ad - bc` to be measured. Once `|ad| + |bc|`
    /// is large the computed determinant is rounding noise accumulated over
    /// the whole product, and the matrix is left alone.
    fn renormalized(self) -> Self {
        const MEASURABLE: f64 = 1e4;
        let det = self.det();
        let scale = (self.a * self.d).abs() + (self.b * self.c).abs();
        let drift = (det - 1.0).abs();
        if scale <= MEASURABLE && drift > TOL.det_drift && det > 0.0 {
            let s = det.sqrt();
            Isometry { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
        } else {
            self
        }
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .renormalized()
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut k = n.unsigned_abs();
        let mut acc = Isometry::IDENTITY;
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq);
            }
            sq = sq.compose(&sq);
            k >>= 1;
        }
        acc
    }

    /// Largest entrywise deviation from `other`, minimised over the sign.
    pub fn projective_distance(&self, other: &Isometry) -> f64 {
        let plus = (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs());
        let minus = (self.a + other.a)
            .abs()
            .max((self.b + other.b).abs())
            .max((self.c + other.c).abs())
            .max((self.d + other.d).abs());
        plus.min(minus)
    }

    pub fn identity_residual(&self) -> f64 {
        self.projective_distance(&Isometry::IDENTITY)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    /// Möbius action on the upper half-plane.
    pub fn apply(&self, p: PlanePoint) -> PlanePoint {
        let (x, y) = (p.x, p.y);
        let cx_d = self.c * x + self.d;
        let cy = self.c * y;
        let den = cx_d * cx_d + cy * cy;
        let re = ((self.a * x + self.b) * cx_d + self.a * self.c * y * y) / den;
        let im = y * self.det() / den;
        PlanePoint { x: re, y: im }
    }

    /// Action on the extended real line (`f64::INFINITY` is the point at infinity).
    pub fn apply_boundary(&self, t: f64) -> f64 {
        if t.is_infinite() {
            if self.c == 0.0 {
                return f64::INFINITY;
            }
            return self.a / self.c;
        }
        let den = self.c * t + self.d;
        if den == 0.0 {
            return f64::INFINITY;
        }
        (self.a * t + self.b) / den
    }

    /// Rotation by `theta` (counter-clockwise) about `i`.
    pub fn rotation_at_i(theta: f64) -> Isometry {
        let (s, c) = (theta / 2.0).sin_cos();
        Isometry { a: c, b: s, c: -s, d: c }
    }

    /// Translation by `t` along the imaginary axis (towards infinity when `t > 0`).
    pub fn vertical_translation(t: f64) -> Isometry {
        let e = (t / 2.0).exp();
        Isometry { a: e, b: 0.0, c: 0.0, d: 1.0 / e }
    }

    /// An isometry sending `i` to `p` with the upward direction kept vertical.
    pub fn moving_i_to(p: PlanePoint) -> Isometry {
        let s = p.y.sqrt();
        Isometry { a: s, b: p.x / s, c: 0.0, d: 1.0 / s }
    }

    /// Counter-clockwise rotation by `theta` about `p`.
    pub fn rotation_about(p: PlanePoint, theta: f64) -> Isometry {
        let m = Isometry::moving_i_to(p);
        m.compose(&Isometry::rotation_at_i(theta)).compose(&m.inverse())
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.projective_distance(other) == 0.0
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.15e}, {:.15e}], [{:.15e}, {:.15e}]]",
            self.a, self.b, self.c, self.d
        )
    }
}

/// Upper half-plane point; `y > 0` always holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self, HypError> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(HypError::NotInUpperHalfPlane { x, y });
        }
        Ok(PlanePoint { x, y })
    }

    pub const I: PlanePoint = PlanePoint { x: 0.0, y: 1.0 };
}

/// Hyperbolic distance, `cosh d = 1 + |p - q|^2 / (2 Im p Im q)`, evaluated
/// in the `asinh` form that keeps precision for nearby points.
pub fn dist(p: PlanePoint, q: PlanePoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    Identity,
    Elliptic { angle: f64 },
    Parabolic,
    Hyperbolic { length: f64 },
}

/// Trace classification. Inside the band `||tr| - 2| <= 1e-9` the verdict is
/// `Parabolic`, unless the matrix is `±I` to the same tolerance.
pub fn classify(g: &Isometry) -> Classification {
    let t = g.trace().abs();
    if (t - 2.0).abs() <= TOL.parabolic_band {
        if g.identity_residual() <= TOL.parabolic_band {
            Classification::Identity
        } else {
            Classification::Parabolic
        }
    } else if t < 2.0 {
        Classification::Elliptic { angle: 2.0 * (t / 2.0).acos() }
    } else {
        Classification::Hyperbolic { length: 2.0 * (t / 2.0).acosh() }
    }
}

pub fn translation_length(g: &Isometry) -> Result<f64, HypError> {
    match classify(g) {
        Classification::Hyperbolic { length } => Ok(length),
        _ => Err(HypError::NotHyperbolic { abs_trace: g.trace().abs() }),
    }
}

/// Translation length from a trace alone; `None` unless `|tr| > 2 + band`.
pub fn length_from_trace(trace: f64) -> Option<f64> {
    let t = trace.abs();
    if t > 2.0 + TOL.parabolic_band {
        Some(2.0 * (t / 2.0).acosh())
    } else {
        None
    }
}

/// An unoriented complete geodesic, stored by its ideal endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGeodesic {
    endpoints: [f64; 2],
}

impl BoundaryGeodesic {
    /// `f64::INFINITY` or `f64::NEG_INFINITY` both denote the point at infinity.
    pub fn new(u: f64, v: f64) -> Result<Self, HypError> {
        let norm = |t: f64| if t.is_infinite() { f64::INFINITY } else { t };
        let (u, v) = (norm(u), norm(v));
        if u == v || u.is_nan() || v.is_nan() {
            return Err(HypError::DegenerateGeodesic);
        }
        let endpoints = if u < v { [u, v] } else { [v, u] };
        Ok(BoundaryGeodesic { endpoints })
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.endpoints[0], self.endpoints[1])
    }

    pub fn through(p: PlanePoint, q: PlanePoint) -> Result<Self, HypError> {
        if p == q {
            return Err(HypError::DegenerateGeodesic);
        }
        if (p.x - q.x).abs() <= 1e-15 * (1.0 + p.x.abs()) {
            return BoundaryGeodesic::new(p.x, f64::INFINITY);
        }
        let center = ((q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y)) / (2.0 * (q.x - p.x));
        let radius = ((p.x - center).powi(2) + p.y * p.y).sqrt();
        BoundaryGeodesic::new(center - radius, center + radius)
    }

    pub fn image(&self, g: &Isometry) -> BoundaryGeodesic {
        let (u, v) = self.endpoints();
        BoundaryGeodesic::new(g.apply_boundary(u), g.apply_boundary(v))
            .expect("isometries keep endpoints distinct")
    }

    /// Orientation-preserving isometry sending this geodesic to `{0, ∞}`
    /// (smaller endpoint to 0).
    pub fn standardizing_map(&self) -> Isometry {
        let (u, v) = self.endpoints();
        if v.is_infinite() {
            Isometry::from_entries(1.0, -u, 0.0, 1.0)
        } else {
            let s = (v - u).sqrt();
            Isometry::from_entries(-1.0 / s, u / s, 1.0 / s, -v / s)
        }
    }

    pub fn distance_to_point(&self, p: PlanePoint) -> f64 {
        let q = self.standardizing_map().apply(p);
        (q.x.abs() / q.y).asinh()
    }

    /// Nearest point of the geodesic to `p`.
    pub fn project(&self, p: PlanePoint) -> PlanePoint {
        let m = self.standardizing_map();
        let q = m.apply(p);
        let foot = PlanePoint { x: 0.0, y: (q.x * q.x + q.y * q.y).sqrt() };
        m.inverse().apply(foot)
    }
}

/// Oriented axis: `[repelling, attracting]` fixed points on the extended line.
pub fn fixed_points(g: &Isometry) -> Result<(f64, f64), HypError> {
    let tr = g.trace();
    let disc = tr * tr - 4.0;
    if !(tr.abs() > 2.0 + TOL.parabolic_band) {
        return Err(HypError::NotHyperbolic { abs_trace: tr.abs() });
    }
    // c z^2 + (d - a) z - b = 0, solved without cancellation.
    let bq = g.d - g.a;
    let sq = disc.sqrt();
    let q = -0.5 * (bq + bq.signum() * sq);
    let z1 = if g.c == 0.0 { f64::INFINITY } else { q / g.c };
    let z2 = if q == 0.0 { f64::INFINITY } else { -g.b / q };
    if z1.is_infinite() || z2.is_infinite() {
        // c = 0: z -> (a z + b) / d, infinity attracts iff |a| > |d|
        let finite = if z1.is_infinite() { z2 } else { z1 };
        return Ok(if g.a.abs() > g.d.abs() {
            (finite, f64::INFINITY)
        } else {
            (f64::INFINITY, finite)
        });
    }
    // g'(z) = (c z + d)^-2, so the attracting point has the larger |c z + d|.
    if (g.c * z1 + g.d).abs() > (g.c * z2 + g.d).abs() {
        Ok((z2, z1))
    } else {
        Ok((z1, z2))
    }
}

pub fn axis(g: &Isometry) -> Result<BoundaryGeodesic, HypError> {
    let (u, v) = fixed_points(g)?;
    BoundaryGeodesic::new(u, v)
}

/// Elliptic fixed point in the upper half-plane.
pub fn elliptic_fixed_point(g: &Isometry) -> Option<PlanePoint> {
    let tr = g.trace();
    if tr.abs() >= 2.0 || g.c == 0.0 {
        return None;
    }
    let re = (g.a - g.d) / (2.0 * g.c);
    let im = (4.0 - tr * tr).sqrt() / (2.0 * g.c.abs());
    Some(PlanePoint { x: re, y: im })
}

fn in_open_arc(p: f64, g: &BoundaryGeodesic) -> bool {
    let (u, v) = g.endpoints();
    if v.is_infinite() {
        p.is_finite() && p > u
    } else {
        p > u && p < v
    }
}

/// Two geodesics cross iff their endpoint pairs are linked on the circle.
pub fn cross(g1: &BoundaryGeodesic, g2: &BoundaryGeodesic) -> bool {
    let (p, q) = g2.endpoints();
    let (u, v) = g1.endpoints();
    if p == u || p == v || q == u || q == v {
        return false;
    }
    in_open_arc(p, g1) != in_open_arc(q, g1)
}

/// Infimum of distances between the two geodesics; zero when they cross or
/// share an ideal endpoint.
pub fn geodesic_distance(g1: &BoundaryGeodesic, g2: &BoundaryGeodesic) -> f64 {
    if cross(g1, g2) {
        return 0.0;
    }
    let (u1, v1) = g1.endpoints();
    let (u2, v2) = g2.endpoints();
    if u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2 {
        return 0.0;
    }
    // Normalize g1 to {0, ∞}; g2 then has endpoints of equal sign p < q
    // and cosh d = (q + p) / (q - p).
    let m = g1.standardizing_map();
    let p = m.apply_boundary(u2);
    let q = m.apply_boundary(v2);
    let (p, q) = (p.abs().min(q.abs()), p.abs().max(q.abs()));
    if q.is_infinite() {
        return 0.0;
    }
    let ratio = (q + p) / (q - p);
    ratio.acosh()
}
