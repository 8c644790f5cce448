//! Geodesics of `dr^2 + phi(r)^2 dθ^2` on the annulus `δ <= r <= 3δ`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use super::SimplerepError;
use crate::tolerances::TOL;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub dr: f64,
    pub dtheta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnulusPath {
    pub samples: Vec<PathSample>,
    /// `phi(r)^2 θ'` at the start.
    pub clairaut: f64,
    /// Largest `|phi^2 θ' - c|`, relative to `phi(3δ)`.
    pub clairaut_drift: f64,
    /// Largest `|r'^2 + phi^2 θ'^2 - 1|`.
    pub energy_drift: f64,
    pub step: f64,
    /// The path left the annulus before the requested length.
    pub exited: bool,
}

impl AnnulusPath {
    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn end(&self) -> PathSample {
        *self.samples.last().expect("paths have at least one sample")
    }

    /// Total change of the angle along the path.
    pub fn angular_span(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.theta), hi.max(s.theta)));
        hi - lo
    }
}

type State = [f64; 4];

fn rhs(p: &RadialProfile, y: &State) -> State {
    let (phi, dphi) = p.eval(y[0]);
    [y[2], y[3], phi * dphi * y[3] * y[3], -2.0 * dphi / phi * y[2] * y[3]]
}

fn rk4(p: &RadialProfile, y: &State, h: f64) -> State {
    let add = |a: &State, k: &State, s: f64| [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2], a[3] + s * k[3]];
    let k1 = rhs(p, y);
    let k2 = rhs(p, &add(y, &k1, h / 2.0));
    let k3 = rhs(p, &add(y, &k2, h / 2.0));
    let k4 = rhs(p, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn sample(t: f64, y: &State) -> PathSample {
    PathSample { t, r: y[0], theta: y[1], dr: y[2], dtheta: y[3] }
}

fn integrate_with_step(
    profile: &RadialProfile,
    start: (f64, f64),
    direction: f64,
    length: f64,
    h: f64,
) -> AnnulusPath {
    let (lo, hi) = (profile.delta, 3.0 * profile.delta);
    let phi0 = profile.phi(start.0);
    // Unit speed: r' = cos α, φ θ' = sin α.
    let mut y: State = [start.0, start.1, direction.cos(), direction.sin() / phi0];
    let c = phi0 * phi0 * y[3];
    let scale = profile.phi(hi);
    let mut samples = vec![sample(0.0, &y)];
    let mut t = 0.0;
    let mut exited = false;
    let (mut cdrift, mut edrift) = (0.0f64, 0.0f64);
    let tol_edge = 1e-12 * profile.delta;
    while t < length {
        let step = h.min(length - t);
        let next = rk4(profile, &y, step);
        if next[0] < lo - tol_edge || next[0] > hi + tol_edge {
            // Finish on the edge: secant iteration on the fraction of the step.
            let edge = if next[0] > hi { hi } else { lo };
            let (mut f0, mut r0) = (0.0, y[0] - edge);
            let (mut f1, mut r1) = (1.0, next[0] - edge);
            for _ in 0..8 {
                if r1 == r0 {
                    break;
                }
                let f2 = (f1 - r1 * (f1 - f0) / (r1 - r0)).clamp(0.0, 1.0);
                let r2 = rk4(profile, &y, f2 * step)[0] - edge;
                (f0, r0, f1, r1) = (f1, r1, f2, r2);
                if r1.abs() <= tol_edge {
                    break;
                }
            }
            let mut z = rk4(profile, &y, f1 * step);
            z[0] = edge;
            samples.push(sample(t + f1 * step, &z));
            exited = true;
            break;
        }
        y = next;
        t += step;
        let phi = profile.phi(y[0]);
        cdrift = cdrift.max((phi * phi * y[3] - c).abs() / scale);
        edrift = edrift.max((y[2] * y[2] + phi * phi * y[3] * y[3] - 1.0).abs());
        samples.push(sample(t, &y));
    }
    AnnulusPath { samples, clairaut: c, clairaut_drift: cdrift, energy_drift: edrift, step: h, exited }
}

/// Unit-speed geodesic from `start = (r, θ)` making angle `direction` with
/// the outward radial direction (counter-clockwise positive), followed for
/// `length` or until it leaves the annulus. The step is halved until both
/// first integrals hold to tolerance.
pub fn integrate_geodesic(
    profile: &RadialProfile,
    start: (f64, f64),
    direction: f64,
    length: f64,
) -> Result<AnnulusPath, SimplerepError> {
    let (lo, hi) = (profile.delta, 3.0 * profile.delta);
    if !(start.0 >= lo * (1.0 - 1e-12) && start.0 <= hi * (1.0 + 1e-12)) {
        return Err(SimplerepError::DomainError(format!("start radius {} outside [{lo}, {hi}]", start.0)));
    }
    let mut h = profile.delta / 256.0;
    for _ in 0..8 {
        let path = integrate_with_step(profile, start, direction, length, h);
        if path.clairaut_drift <= TOL.clairaut_drift && path.energy_drift <= TOL.energy_drift {
            return Ok(path);
        }
        h /= 2.0;
    }
    Err(SimplerepError::StepTooLarge { step: h })
}

/// Position along the hyperbolic geodesic with the same initial data,
/// computed on the hyperboloid.
pub fn hyperbolic_polar_geodesic(start: (f64, f64), direction: f64, t: f64) -> (f64, f64) {
    let (r, th) = start;
    let (sr, cr) = (r.sinh(), r.cosh());
    let (s, c) = th.sin_cos();
    let x = [cr, sr * c, sr * s];
    let (dr, dth) = (direction.cos(), direction.sin() / sr);
    let v = [dr * sr, dr * cr * c - dth * sr * s, dr * cr * s + dth * sr * c];
    let (ch, sh) = (t.cosh(), t.sinh());
    let p1 = ch * x[1] + sh * v[1];
    let p2 = ch * x[2] + sh * v[2];
    let mut theta = p2.atan2(p1);
    // Unwrap towards the starting angle.
    theta += TAU * ((th - theta) / TAU).round();
    (p1.hypot(p2).asinh(), theta)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricMatch {
    /// Largest `|Δr| / δ`.
    pub radial: f64,
    /// Largest `|Δθ|`.
    pub angular: f64,
    pub pass: bool,
}

/// Compares an integrated path lying in `[2δ, 3δ]` with the hyperbolic
/// geodesic through the same initial data.
pub fn hyperbolic_match(profile: &RadialProfile, path: &AnnulusPath) -> MetricMatch {
    let s0 = path.samples[0];
    let dir = s0.dr.atan2(profile.phi(s0.r) * s0.dtheta);
    let direction = std::f64::consts::FRAC_PI_2 - dir;
    let (mut radial, mut angular) = (0.0f64, 0.0f64);
    for s in &path.samples {
        let (r, th) = hyperbolic_polar_geodesic((s0.r, s0.theta), direction, s.t);
        radial = radial.max((r - s.r).abs() / profile.delta);
        angular = angular.max((th - s.theta).abs());
    }
    MetricMatch { radial, angular, pass: radial <= TOL.metric_match && angular <= TOL.metric_match }
}

fn wrap(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingReport {
    pub rays: usize,
    pub max_count: usize,
    /// Ray angle with the largest count.
    pub worst_ray: f64,
    pub length: f64,
    pub length_bound: f64,
    pub pass: bool,
}

/// Number of times the sampled path meets the ray at angle `ray`. A run of
/// samples lying on the ray counts once.
pub fn ray_crossings(samples: &[PathSample], ray: f64) -> usize {
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for s in samples {
        let f = wrap(s.theta - ray);
        match prev {
            None if f == 0.0 => count += 1,
            Some(p) if f == 0.0 && p != 0.0 => count += 1,
            Some(p) if p != 0.0 && f != 0.0 && p.signum() != f.signum() && (p - f).abs() < PI => count += 1,
            _ => {}
        }
        prev = Some(f);
    }
    count
}

/// Counts crossings of `rays` equally spaced rays from the centre and
/// compares the length with `2π sinh(r_out)`.
pub fn radial_crossing_count(samples: &[PathSample], r_out: f64, rays: usize) -> CrossingReport {
    let (mut max_count, mut worst_ray) = (0, 0.0);
    for k in 0..rays {
        let ray = TAU * k as f64 / rays as f64;
        let n = ray_crossings(samples, ray);
        if n > max_count {
            max_count = n;
            worst_ray = ray;
        }
    }
    let length = samples.last().map_or(0.0, |s| s.t);
    let length_bound = TAU * r_out.sinh();
    CrossingReport {
        rays,
        max_count,
        worst_ray,
        length,
        length_bound,
        pass: max_count <= 1 && length <= length_bound * (1.0 + TOL.length_bound_slack),
    }
}

/// Arc starting on the outer circle and aimed inward at `angle` from the
/// inward radial direction, followed until it leaves the annulus.
pub fn arc_from_outer_circle(profile: &RadialProfile, angle: f64) -> Result<AnnulusPath, SimplerepError> {
    let r_out = 3.0 * profile.delta;
    integrate_geodesic(profile, (r_out, 0.0), PI - angle, 40.0 * profile.delta)
}

/// The path followed by its reversal: a closed, non-geodesic loop.
pub fn back_and_forth(path: &AnnulusPath) -> Vec<PathSample> {
    let total = path.length();
    let mut out = path.samples.clone();
    out.extend(path.samples.iter().rev().skip(1).map(|s| PathSample { t: 2.0 * total - s.t, ..*s }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile() -> RadialProfile {
        RadialProfile::new(0.05, 4096).unwrap()
    }

    #[test]
    fn radial_rays_are_geodesics() {
        let p = profile();
        let path = integrate_geodesic(&p, (0.06, 1.0), 0.0, 1.0).unwrap();
        assert!(path.exited && path.clairaut == 0.0);
        assert!(path.samples.iter().all(|s| s.theta == 1.0));
        assert!((path.end().r - 0.15).abs() < 1e-12);
        assert!((path.length() - 0.09).abs() < 1e-9);
        let rep = radial_crossing_count(&path.samples, 0.15, 360);
        assert!(rep.max_count <= 1);
        assert_eq!(ray_crossings(&path.samples, 1.0), 1);
    }

    #[test]
    fn inner_circle_is_geodesic() {
        let p = profile();
        let path = integrate_geodesic(&p, (0.05, 0.0), std::f64::consts::FRAC_PI_2, 0.2).unwrap();
        assert!(!path.exited);
        assert!(path.samples.iter().all(|s| (s.r - 0.05).abs() < 1e-12));
        assert!((path.end().theta - 0.2 / p.phi(0.05)).abs() < 1e-9);
    }

    #[test]
    fn outer_band_matches_hyperbolic_geodesic() {
        let p = profile();
        let path = integrate_geodesic(&p, (0.125, 0.3), 0.6, 1.0).unwrap();
        assert!(path.samples.iter().all(|s| s.r >= 0.1));
        let m = hyperbolic_match(&p, &path);
        assert!(m.pass, "{m:?}");
    }

    #[test]
    fn reversal_retraces() {
        let p = profile();
        let path = integrate_geodesic(&p, (0.12, 0.0), 2.3, 0.08).unwrap();
        let e = path.end();
        let back_dir = (-e.dr).atan2(-p.phi(e.r) * e.dtheta);
        let back = integrate_geodesic(&p, (e.r, e.theta), std::f64::consts::FRAC_PI_2 - back_dir, path.length()).unwrap();
        let b = back.end();
        assert!((b.r - 0.12).abs() < 1e-6 * 0.05 && b.theta.abs() < 1e-6, "{b:?}");
    }

    #[test]
    fn near_tangent_arc_meets_rays_once() {
        let p = profile();
        let arc = arc_from_outer_circle(&p, 1.3).unwrap();
        assert!(arc.exited && arc.angular_span() < TAU);
        let rep = radial_crossing_count(&arc.samples, 0.15, 720);
        assert!(rep.pass, "{rep:?}");
        let looped = back_and_forth(&arc);
        assert!(radial_crossing_count(&looped, 0.15, 720).max_count >= 2);
    }

    #[test]
    fn wrapped_crossings() {
        let mk = |th: &[f64]| th.iter().enumerate().map(|(i, &t)| PathSample { t: i as f64, r: 1.0, theta: t, dr: 0.0, dtheta: 0.0 }).collect::<Vec<_>>();
        assert_eq!(ray_crossings(&mk(&[0.1, 0.5, 3.0, 5.0, 7.0]), 0.3), 2);
        assert_eq!(ray_crossings(&mk(&[3.0, 3.3]), 0.0), 0);
    }
}
