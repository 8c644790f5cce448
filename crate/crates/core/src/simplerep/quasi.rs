//! Quasigeodesic constants of sampled paths in the upper half-plane, and the
//! fixtures used to exercise them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hypgeom::{dist, BoundaryGeodesic, Isometry, PlanePoint};

/// Smallest `A >= 1` with `A|t-s| + A >= d(α(s), α(t)) >= |t-s|/A - A` over
/// all sampled pairs. Each inequality is solved for `A` pairwise:
/// `A >= d / (|Δ| + 1)` and `A^2 + dA - |Δ| >= 0`.
pub fn quasigeodesic_constant(points: &[PlanePoint], params: &[f64]) -> f64 {
    assert_eq!(points.len(), params.len(), "one parameter per sample");
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut a = 1.0f64;
            for j in i + 1..points.len() {
                let gap = (params[j] - params[i]).abs();
                let d = dist(points[i], points[j]);
                let upper = d / (gap + 1.0);
                let lower = (-d + (d * d + 4.0 * gap).sqrt()) / 2.0;
                a = a.max(upper).max(lower);
            }
            a
        })
        .reduce(|| 1.0, f64::max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledPath {
    pub points: Vec<PlanePoint>,
    /// Arclength parameter of each sample.
    pub params: Vec<f64>,
}

impl SampledPath {
    pub fn constant(&self) -> f64 {
        quasigeodesic_constant(&self.points, &self.params)
    }

    pub fn image(&self, g: &Isometry) -> SampledPath {
        SampledPath { points: self.points.iter().map(|p| g.apply(*p)).collect(), params: self.params.clone() }
    }

    /// Parameters from cumulative hyperbolic distance between samples.
    pub fn from_points(points: Vec<PlanePoint>) -> SampledPath {
        let mut params = Vec::with_capacity(points.len());
        let mut t = 0.0;
        for (k, p) in points.iter().enumerate() {
            if k > 0 {
                t += dist(points[k - 1], *p);
            }
            params.push(t);
        }
        SampledPath { points, params }
    }
}

/// Point at distance `r` from `center` in direction `theta`, measured from
/// the upward vertical at `center`.
pub fn polar_point(center: PlanePoint, r: f64, theta: f64) -> PlanePoint {
    let m = Isometry::moving_i_to(center).compose(&Isometry::rotation_at_i(theta));
    m.apply(PlanePoint { x: 0.0, y: r.exp() })
}

/// Arclength samples of a geodesic between parameters `s0` and `s1`,
/// measured from the foot of `i`.
pub fn geodesic_samples(g: &BoundaryGeodesic, s0: f64, s1: f64, n: usize) -> SampledPath {
    let m = g.standardizing_map();
    let foot = m.apply(PlanePoint::I);
    let h0 = (foot.x * foot.x + foot.y * foot.y).sqrt().ln();
    let inv = m.inverse();
    let params: Vec<f64> = (0..n).map(|k| s0 + (s1 - s0) * k as f64 / (n - 1) as f64).collect();
    let points = params.iter().map(|s| inv.apply(PlanePoint { x: 0.0, y: (h0 + s).exp() })).collect();
    SampledPath { points, params }
}

/// A geodesic through `center` broken at a cone disk: radial approach from
/// distance `reach` along direction `theta_in`, an arc of the circle of
/// radius `delta` through the angle `turn`, and a radial exit. Parameters
/// are lengths for the modified metric, whose circle of radius `delta` has
/// length `2π phi_delta`.
pub fn cone_detour(center: PlanePoint, delta: f64, phi_delta: f64, reach: f64, theta_in: f64, turn: f64, n: usize) -> SampledPath {
    let mut points = Vec::with_capacity(3 * n);
    let mut params = Vec::with_capacity(3 * n);
    let radial = reach - delta;
    for k in 0..n {
        let u = k as f64 / n as f64;
        points.push(polar_point(center, reach - u * radial, theta_in));
        params.push(u * radial);
    }
    let arc = phi_delta * turn.abs();
    for k in 0..n {
        let u = k as f64 / n as f64;
        points.push(polar_point(center, delta, theta_in + u * turn));
        params.push(radial + u * arc);
    }
    for k in 0..=n {
        let u = k as f64 / n as f64;
        points.push(polar_point(center, delta + u * radial, theta_in + turn));
        params.push(radial + arc + u * radial);
    }
    SampledPath { points, params }
}

/// The straight-through detour: in along one ray, out along the opposite one.
pub fn symmetric_detour(center: PlanePoint, delta: f64, phi_delta: f64, reach: f64, n: usize) -> SampledPath {
    cone_detour(center, delta, phi_delta, reach, PI, -PI, n)
}

/// Curve spiralling onto the circle of radius `radius` about `center`,
/// `r = radius (1 + e^{-θ/4})` for `θ` in `[0, turns·2π]`.
pub fn spiral(center: PlanePoint, radius: f64, turns: f64, n: usize) -> SampledPath {
    let total = turns * 2.0 * PI;
    let points = (0..n)
        .map(|k| {
            let th = total * k as f64 / (n - 1) as f64;
            polar_point(center, radius * (1.0 + (-th / 4.0).exp()), th)
        })
        .collect();
    SampledPath::from_points(points)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpiralReport {
    pub turns: Vec<f64>,
    pub constants: Vec<f64>,
    /// Constants grow with the window and end above the stated threshold.
    pub diverges: bool,
}

/// Quasigeodesic constants on growing windows of the spiral.
pub fn spiral_divergence(center: PlanePoint, radius: f64, turns: &[f64], samples_per_turn: usize) -> SpiralReport {
    let constants: Vec<f64> = turns
        .iter()
        .map(|&t| spiral(center, radius, t, (t * samples_per_turn as f64).ceil() as usize + 2).constant())
        .collect();
    let increasing = constants.windows(2).all(|w| w[1] > w[0] * 1.2);
    let diverges = increasing && constants.last().is_some_and(|&a| a > 3.0);
    SpiralReport { turns: turns.to_vec(), constants, diverges }
}
