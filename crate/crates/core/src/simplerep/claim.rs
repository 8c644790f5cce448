//! Distances between a geodesic and its image under a rotation.
//!
//! For a geodesic at distance `d` from the centre of a rotation by `θ`, the
//! image lies at distance `2 arccosh(sin(θ/2) cosh d)` when the argument
//! exceeds one, and the two geodesics cross otherwise. A point at distance
//! `d` is displaced by `2 arcsinh(sin(θ/2) sinh d)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SimplerepError;
use crate::hypgeom::{dist, geodesic_distance, BoundaryGeodesic, Isometry, PlanePoint};
use crate::tolerances::TOL;

/// Closed form for the rotated-geodesic distance, zero when they cross.
pub fn rotated_geodesic_distance(d: f64, theta: f64) -> f64 {
    let arg = (theta / 2.0).sin().abs() * d.cosh();
    if arg <= 1.0 {
        0.0
    } else {
        2.0 * arg.acosh()
    }
}

pub fn point_displacement(d: f64, theta: f64) -> f64 {
    2.0 * ((theta / 2.0).sin().abs() * d.sinh()).asinh()
}

/// The geodesic perpendicular to the imaginary axis at `i e^d`, i.e. at
/// distance `d` from `i`.
fn geodesic_at_distance(d: f64) -> BoundaryGeodesic {
    let r = d.exp();
    BoundaryGeodesic::new(-r, r).expect("distinct endpoints")
}

/// Minimum over points of `g1` of the distance to `g2`, by golden-section
/// search along `g1` parametrized by arclength from its foot.
pub fn measured_distance(g1: &BoundaryGeodesic, g2: &BoundaryGeodesic) -> f64 {
    let m = g1.standardizing_map();
    let inv = m.inverse();
    let at = |s: f64| inv.apply(PlanePoint { x: 0.0, y: s.exp() });
    let f = |s: f64| g2.distance_to_point(at(s));
    let (mut a, mut b) = (-40.0f64, 40.0f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while b - a > 1e-11 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    f((a + b) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub d: f64,
    pub theta: f64,
    pub formula: f64,
    /// Distance from the endpoint formula for ultraparallel geodesics.
    pub endpoint_distance: f64,
    /// Distance found by minimizing along one geodesic.
    pub minimized_distance: f64,
    pub displacement: f64,
    /// Displacement of `i e^d` measured directly.
    pub measured_displacement: f64,
    pub distance_matches: bool,
    pub displacement_at_least_sqrt3_d: bool,
    /// `formula(d, 2π/3) >= 3d/2`; only asserted for `d > 1`.
    pub three_halves: Option<bool>,
}

impl ClaimReport {
    pub fn pass(&self) -> bool {
        self.distance_matches && self.displacement_at_least_sqrt3_d && self.three_halves.unwrap_or(true)
    }
}

pub fn claim2_identities(d: f64, theta: f64) -> Result<ClaimReport, SimplerepError> {
    let slop = 1e-12;
    if !(d > 0.0 && d.is_finite()) || !(theta >= 2.0 * PI / 3.0 - slop && theta <= 4.0 * PI / 3.0 + slop) {
        return Err(SimplerepError::DomainError(format!("need d > 0 and θ in [2π/3, 4π/3], got d={d}, θ={theta}")));
    }
    let rot = Isometry::rotation_at_i(theta);
    let g = geodesic_at_distance(d);
    let h = g.image(&rot);
    let formula = rotated_geodesic_distance(d, theta);
    let endpoint_distance = geodesic_distance(&g, &h);
    let minimized_distance = measured_distance(&g, &h);
    let p = PlanePoint { x: 0.0, y: d.exp() };
    let measured_displacement = dist(p, rot.apply(p));
    let displacement = point_displacement(d, theta);
    let tol = TOL.trig_match;
    let three_halves = (d > 1.0).then(|| rotated_geodesic_distance(d, 2.0 * PI / 3.0) >= 1.5 * d);
    Ok(ClaimReport {
        d,
        theta,
        formula,
        endpoint_distance,
        minimized_distance,
        displacement,
        measured_displacement,
        distance_matches: (endpoint_distance - formula).abs() <= tol
            && (minimized_distance - formula).abs() <= tol
            && (measured_displacement - displacement).abs() <= tol,
        displacement_at_least_sqrt3_d: measured_displacement >= 3f64.sqrt() * d * (1.0 - 1e-12),
        three_halves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_distance_third_turn() {
        let r = claim2_identities(1.0, 2.0 * PI / 3.0).unwrap();
        // 30-digit evaluation of 2 arccosh((√3/2) cosh 1).
        assert!((r.formula - 1.597_547_766_729_217).abs() < 1e-12, "{}", r.formula);
        assert!(r.pass(), "{r:?}");
        assert!(r.formula >= 1.5);
    }

    #[test]
    fn half_turn_doubles() {
        let r = claim2_identities(1.0, PI).unwrap();
        assert!((r.formula - 2.0).abs() < 1e-12);
        assert!((r.minimized_distance - 2.0).abs() < 1e-6);
    }

    #[test]
    fn small_distance_limit() {
        let d = 1e-4;
        let ratio = point_displacement(d, 2.0 * PI / 3.0) / d;
        assert!((ratio - 3f64.sqrt()).abs() < 1e-3);
        // the rotated geodesics cross for small d
        let r = claim2_identities(0.01, 2.0 * PI / 3.0).unwrap();
        assert_eq!(r.formula, 0.0);
        assert!(r.minimized_distance < 1e-6 && r.pass());
    }

    #[test]
    fn domain_errors() {
        assert!(claim2_identities(0.0, PI).is_err());
        assert!(claim2_identities(1.0, 1.0).is_err());
    }
}
