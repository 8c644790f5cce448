//! Heights of paths over geodesic segments, neighbourhood containment, and
//! a bounded check that a path meets each of its translates at most once.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::constants::EpsilonDelta;
use super::geodesic::integrate_geodesic;
use super::profile::RadialProfile;
use super::quasi::polar_point;
use super::SimplerepError;
use crate::hypgeom::{dist, BoundaryGeodesic, Isometry, PlanePoint};
use crate::orbifold::FuchsianGroup;

/// Geodesic segment between two points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: PlanePoint,
    pub end: PlanePoint,
}

impl Segment {
    pub fn line(&self) -> BoundaryGeodesic {
        BoundaryGeodesic::through(self.start, self.end).expect("segment endpoints are distinct")
    }

    /// Nearest point of the segment to `p`.
    pub fn nearest(&self, p: PlanePoint) -> PlanePoint {
        let foot = self.line().project(p);
        let len = dist(self.start, self.end);
        if (dist(self.start, foot) + dist(foot, self.end) - len).abs() <= 1e-9 * len.max(1.0) {
            foot
        } else if dist(p, self.start) <= dist(p, self.end) {
            self.start
        } else {
            self.end
        }
    }

    pub fn distance(&self, p: PlanePoint) -> f64 {
        dist(p, self.nearest(p))
    }

    /// Point at arclength `s` from the start towards the end.
    pub fn at(&self, s: f64) -> PlanePoint {
        let line = self.line();
        let m = line.standardizing_map();
        let (a, b) = (m.apply(self.start), m.apply(self.end));
        let dir = if b.y > a.y { 1.0 } else { -1.0 };
        m.inverse().apply(PlanePoint { x: 0.0, y: a.y * (dir * s).exp() })
    }

    /// `n + 1` equally spaced points.
    pub fn samples(&self, n: usize) -> Vec<PlanePoint> {
        let len = dist(self.start, self.end);
        (0..=n).map(|k| self.at(len * k as f64 / n as f64)).collect()
    }
}

/// Path that leaves `seg` perpendicularly at arclength `s0`, runs at
/// distance `height` on the side of `side` until `s1`, and comes back.
pub fn box_path(seg: &Segment, side: PlanePoint, s0: f64, s1: f64, height: f64, n: usize) -> Vec<PlanePoint> {
    let m = seg.line().standardizing_map();
    let inv = m.inverse();
    let base = m.apply(seg.start).y;
    let dir = if m.apply(seg.end).y > base { 1.0 } else { -1.0 };
    let sign = m.apply(side).x.signum();
    // Point at distance h from the imaginary axis with foot i·y.
    let off = |s: f64, h: f64| {
        let y = base * (dir * s).exp();
        inv.apply(PlanePoint { x: sign * y * h.tanh(), y: y / h.cosh() })
    };
    let mut path: Vec<PlanePoint> = (0..=n).map(|k| off(s0, height * k as f64 / n as f64)).collect();
    path.extend((1..=n).map(|k| off(s0 + (s1 - s0) * k as f64 / n as f64, height)));
    path.extend((0..n).rev().map(|k| off(s1, height * k as f64 / n as f64)));
    path
}

/// A segment at distance `distance` from cone point `cone` of the polygon,
/// with a path rising to `distance + ε/2` over it, so the cone point's
/// outgoing ray crosses the path.
pub fn tower_fixture(group: &FuchsianGroup, ed: &EpsilonDelta, cone: usize, distance: f64) -> (Segment, Vec<PlanePoint>) {
    let p = group.polygon().cone_points[cone];
    let frame = Isometry::moving_i_to(p);
    let r = (-distance).exp();
    let line = BoundaryGeodesic::new(-r, r).expect("distinct endpoints").image(&frame);
    let foot = frame.apply(PlanePoint { x: 0.0, y: r });
    let m = line.standardizing_map();
    let inv = m.inverse();
    let y = m.apply(foot).y;
    let half = 0.05f64;
    let seg = Segment {
        start: inv.apply(PlanePoint { x: 0.0, y: y * (-half).exp() }),
        end: inv.apply(PlanePoint { x: 0.0, y: y * half.exp() }),
    };
    let path = box_path(&seg, p, 0.0, 2.0 * half, distance + ed.epsilon / 2.0, 40);
    (seg, path)
}

/// A short segment through the polygon centre with a bump of height `10ε`.
pub fn bump_fixture(group: &FuchsianGroup, ed: &EpsilonDelta) -> (Segment, Vec<PlanePoint>) {
    let c = group.polygon().center;
    let seg = Segment { start: c, end: polar_point(c, 0.2, 0.7) };
    let above = polar_point(c, 0.1, 0.7 + std::f64::consts::FRAC_PI_2);
    let path = box_path(&seg, above, 0.0, 0.2, 10.0 * ed.epsilon, 20);
    (seg, path)
}

/// Whether the ray from `p` directed away from `foot` meets the polyline.
pub fn ray_meets(foot: PlanePoint, p: PlanePoint, path: &[PlanePoint]) -> bool {
    let Ok(line) = BoundaryGeodesic::through(foot, p) else {
        return false;
    };
    let m = line.standardizing_map();
    let (q, c) = (m.apply(foot), m.apply(p));
    let up = c.y > q.y;
    path.windows(2).any(|w| {
        let (u, v) = (m.apply(w[0]), m.apply(w[1]));
        if u.x.signum() == v.x.signum() && u.x != 0.0 && v.x != 0.0 {
            return false;
        }
        let f = if u.x == v.x { 0.0 } else { u.x / (u.x - v.x) };
        let y = (u.y.ln() + f * (v.y.ln() - u.y.ln())).exp();
        if up {
            y > c.y
        } else {
            y < c.y
        }
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightReport {
    /// Largest distance from the segment to a cone lift whose outgoing ray
    /// meets the path; zero if there is none.
    pub height: f64,
    pub lifts_examined: usize,
    pub crossing_lifts: usize,
    /// `max(50ε, h) + ε`.
    pub radius: f64,
    /// Largest distance from a path sample to the segment.
    pub max_distance: f64,
    pub contained: bool,
}

/// Height of `path` over `gamma` and containment of the path in the
/// neighbourhood of radius `max(50ε, h) + ε`.
pub fn height_and_neighborhood(
    group: &FuchsianGroup,
    ed: &EpsilonDelta,
    gamma: &Segment,
    path: &[PlanePoint],
) -> Result<HeightReport, SimplerepError> {
    if path.len() < 2 {
        return Err(SimplerepError::DomainError("path needs at least two samples".into()));
    }
    let ends = [path[0], path[path.len() - 1]];
    if ends.iter().any(|e| gamma.distance(*e) > 1e-9) {
        return Err(SimplerepError::DomainError("path endpoints must lie on the segment".into()));
    }
    // A lift whose ray meets the path lies between the segment and the
    // path, hence in any ball containing both.
    let center = gamma.at(dist(gamma.start, gamma.end) / 2.0);
    let reach = path
        .iter()
        .chain([&gamma.start, &gamma.end])
        .map(|p| dist(center, *p))
        .fold(0.0, f64::max);
    let lifts = group.cone_lifts(center, reach)?;
    let mut height = 0.0f64;
    let mut crossing = 0;
    for l in &lifts {
        let foot = gamma.nearest(l.point);
        let d = dist(foot, l.point);
        if d <= 1e-12 {
            continue;
        }
        if ray_meets(foot, l.point, path) {
            crossing += 1;
            height = height.max(d);
        }
    }
    let radius = (50.0 * ed.epsilon).max(height) + ed.epsilon;
    let max_distance = path.iter().map(|p| gamma.distance(*p)).fold(0.0, f64::max);
    Ok(HeightReport {
        height,
        lifts_examined: lifts.len(),
        crossing_lifts: crossing,
        radius,
        max_distance,
        contained: max_distance <= radius,
    })
}

fn orient(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(p1: PlanePoint, p2: PlanePoint, q1: PlanePoint, q2: PlanePoint) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Transversal crossings of two polylines.
pub fn polyline_crossings(a: &[PlanePoint], b: &[PlanePoint]) -> usize {
    let mut n = 0;
    for u in a.windows(2) {
        for v in b.windows(2) {
            if segments_cross(u[0], u[1], v[0], v[1]) {
                n += 1;
            }
        }
    }
    n
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsSimpleReport {
    pub translates_checked: usize,
    pub max_crossings: usize,
    pub self_crossings: usize,
    /// Largest displacement of the path's centre considered.
    pub displacement_bound: f64,
    pub bound_reason: String,
    pub pass: bool,
}

/// The path is embedded and meets each translate `g·path` (`g ≠ 1`) at
/// most once. Only translates that can reach the path are examined: if
/// the path lies in the ball of radius `R` about `c`, a translate meeting
/// it has `d(c, g c) <= 2R`.
pub fn as_simple_check(group: &FuchsianGroup, path: &[PlanePoint]) -> AsSimpleReport {
    let c = path[path.len() / 2];
    let r = path.iter().map(|p| dist(c, *p)).fold(0.0, f64::max);
    let bound = 2.0 * r;
    let mut checked = 0;
    let mut worst = 0;
    for g in group.tiles_near(c, dist(PlanePoint::I, c) + bound) {
        if g.approx_eq(&Isometry::IDENTITY, 1e-9) || dist(c, g.apply(c)) > bound {
            continue;
        }
        checked += 1;
        let image: Vec<PlanePoint> = path.iter().map(|p| g.apply(*p)).collect();
        worst = worst.max(polyline_crossings(path, &image));
    }
    let self_crossings = {
        let mut n = 0;
        for i in 0..path.len().saturating_sub(1) {
            for j in i + 2..path.len() - 1 {
                if segments_cross(path[i], path[i + 1], path[j], path[j + 1]) {
                    n += 1;
                }
            }
        }
        n
    };
    AsSimpleReport {
        translates_checked: checked,
        max_crossings: worst,
        self_crossings,
        displacement_bound: bound,
        bound_reason: format!("path within {r:.6} of its middle sample, so only translates moving it by at most {bound:.6} can meet it"),
        pass: worst <= 1 && self_crossings == 0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullSpotCheck {
    pub paths: usize,
    pub samples: usize,
    pub outside: usize,
    pub note: String,
    pub pass: bool,
}

/// Shoots modified-metric geodesics from random points of the annulus
/// `δ <= r <= 2δ` around a cone point `p` at distance `r_gamma + δ` from a
/// geodesic and checks that they stay in `N(γ, r_gamma) ∪ B(p, ε/2)`
/// while inside the chart.
pub fn hull_spot_check(
    profile: &RadialProfile,
    epsilon: f64,
    r_gamma: f64,
    paths: usize,
    rng: &mut ChaCha8Rng,
) -> Result<HullSpotCheck, SimplerepError> {
    let delta = profile.delta;
    let gamma = BoundaryGeodesic::new(-1.0, 1.0).expect("distinct endpoints");
    // Cone point straight above the unit semicircle.
    let p = PlanePoint { x: 0.0, y: (r_gamma + delta).exp() };
    let mut outside = 0;
    let mut samples = 0;
    for _ in 0..paths {
        let r0 = delta * (1.0 + rng.gen::<f64>());
        let th0 = rng.gen::<f64>() * std::f64::consts::TAU;
        let dir = rng.gen::<f64>() * std::f64::consts::TAU;
        let path = integrate_geodesic(profile, (r0, th0), dir, 20.0 * delta)?;
        for s in &path.samples {
            let x = polar_point(p, s.r, s.theta);
            samples += 1;
            let in_tube = gamma.distance_to_point(x) <= r_gamma;
            let in_ball = dist(p, x) <= epsilon / 2.0;
            if !(in_tube || in_ball) {
                outside += 1;
            }
        }
    }
    Ok(HullSpotCheck {
        paths,
        samples,
        outside,
        note: "chart-local: paths are followed only while inside the annulus around one cone point; multi-chart configurations are not tested".into(),
        pass: outside == 0,
    })
}
