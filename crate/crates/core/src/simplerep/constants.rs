//! The scales `ε` and `δ` of the modified metric, read off from the group.

use serde::{Deserialize, Serialize};

use super::SimplerepError;
use crate::hypgeom::{classify, dist, Classification};
use crate::orbifold::FuchsianGroup;

/// Tiles examined before a systole search gives up.
const TILE_CAP: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonDelta {
    pub epsilon: f64,
    pub delta: f64,
    /// Shortest closed geodesic.
    pub systole: f64,
    /// Shortest distance between distinct cone-point lifts; `None` without
    /// cone points.
    pub cone_separation: Option<f64>,
    /// Shortest cone-to-boundary distance; `None` unless both exist.
    pub boundary_separation: Option<f64>,
    pub margins: Margins,
}

/// Slack in each condition; all positive when the constants are admissible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `systole - 200ε`.
    pub systole: f64,
    pub cone_separation: Option<f64>,
    pub boundary_separation: Option<f64>,
    /// `ε - 3δ`.
    pub third: f64,
    /// `(ε/4)^3 - δ`.
    pub cubic: f64,
}

impl EpsilonDelta {
    /// `ε = min / 201`, `δ = 0.99 min(ε/4, (ε/4)^3)`.
    pub fn from_quantities(systole: f64, cone_separation: Option<f64>, boundary_separation: Option<f64>) -> Self {
        let min = [Some(systole), cone_separation, boundary_separation]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min);
        let epsilon = min / 201.0;
        let quarter = epsilon / 4.0;
        let delta = quarter.min(quarter.powi(3)) * 0.99;
        EpsilonDelta {
            epsilon,
            delta,
            systole,
            cone_separation,
            boundary_separation,
            margins: Margins {
                systole: systole - 200.0 * epsilon,
                cone_separation: cone_separation.map(|c| c - 200.0 * epsilon),
                boundary_separation: boundary_separation.map(|c| c - 200.0 * epsilon),
                third: epsilon - 3.0 * delta,
                cubic: quarter.powi(3) - delta,
            },
        }
    }

    pub fn admissible(&self) -> bool {
        let m = &self.margins;
        m.systole > 0.0
            && m.cone_separation.is_none_or(|c| c > 0.0)
            && m.boundary_separation.is_none_or(|c| c > 0.0)
            && m.third > 0.0
            && m.cubic > 0.0
    }
}

/// Shortest translation length. Every closed geodesic of length `ℓ` has a
/// lift crossing the fundamental polygon, so its holonomy moves the polygon
/// centre by at most `ℓ + 2ρ`; the tiles within that distance are searched.
pub fn systole(group: &FuchsianGroup) -> Result<f64, SimplerepError> {
    let rho = group.polygon().radius;
    let center = group.polygon().center;
    let mut best = group
        .generators()
        .iter()
        .filter_map(|g| match classify(g) {
            Classification::Hyperbolic { length } => Some(length),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        best = 2.0 * rho;
    }
    loop {
        let tiles = group.tiles_near(center, best + 2.0 * rho);
        if tiles.len() > TILE_CAP {
            return Err(SimplerepError::SystoleSearchInconclusive { best, tiles: tiles.len() });
        }
        let found = tiles
            .iter()
            .filter_map(|g| match classify(g) {
                Classification::Hyperbolic { length } => Some(length),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        if found.is_finite() && found <= best {
            return Ok(found);
        }
        // Nothing hyperbolic in range yet: widen.
        best *= 2.0;
    }
}

/// Shortest distance between distinct lifts of cone points, searched around
/// each cone point of the polygon.
pub fn cone_separation(group: &FuchsianGroup) -> Result<Option<f64>, SimplerepError> {
    let cones = &group.polygon().cone_points;
    if cones.is_empty() {
        return Ok(None);
    }
    let mut radius = 2.0 * group.polygon().radius;
    loop {
        let mut best = f64::INFINITY;
        for &c in cones {
            for l in group.cone_lifts(c, radius)? {
                let d = dist(c, l.point);
                if d > 1e-7 {
                    best = best.min(d);
                }
            }
        }
        if best <= radius {
            return Ok(Some(best));
        }
        radius *= 2.0;
    }
}

/// Shortest distance from a cone point to a boundary axis.
pub fn boundary_separation(group: &FuchsianGroup) -> Option<f64> {
    let poly = group.polygon();
    if poly.cone_points.is_empty() || poly.boundary_axes.is_empty() {
        return None;
    }
    let mut radius = 2.0 * poly.radius;
    loop {
        let best = poly
            .cone_points
            .iter()
            .flat_map(|&c| group.boundary_axes_near(c, radius).into_iter().map(move |a| a.distance_to_point(c)))
            .fold(f64::INFINITY, f64::min);
        if best <= radius {
            return Some(best);
        }
        radius *= 2.0;
    }
}

pub fn choose_constants(group: &FuchsianGroup) -> Result<EpsilonDelta, SimplerepError> {
    let sys = systole(group)?;
    let cones = cone_separation(group)?;
    let boundary = boundary_separation(group);
    Ok(EpsilonDelta::from_quantities(sys, cones, boundary))
}

/// Shortest translation length over all freely reduced words of at most
/// `max_letters` letters, by depth-first enumeration. Exponential; meant
/// as a cross-check.
pub fn brute_force_systole(group: &FuchsianGroup, max_letters: usize) -> f64 {
    use crate::hypgeom::Isometry;
    let mut letters: Vec<(usize, Isometry)> = Vec::new();
    for (k, g) in group.generators().iter().enumerate() {
        letters.push((2 * k, *g));
        letters.push((2 * k + 1, g.inverse()));
    }
    fn walk(acc: Isometry, last: Option<usize>, depth: usize, letters: &[(usize, Isometry)], best: &mut f64) {
        if let Classification::Hyperbolic { length } = classify(&acc) {
            *best = best.min(length);
        }
        if depth == 0 {
            return;
        }
        for (id, g) in letters {
            if last.is_some_and(|l| l ^ 1 == *id) {
                continue;
            }
            walk(acc.compose(g), Some(*id), depth - 1, letters, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(Isometry::IDENTITY, None, max_letters, &letters, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::{group_for, OrbifoldSignature};

    #[test]
    fn torus_with_cone_constants() {
        let sig: OrbifoldSignature = "g=1 cones=3".parse().unwrap();
        let g = group_for(&sig).unwrap();
        let ed = choose_constants(&g).unwrap();
        assert!(ed.admissible(), "{ed:?}");
        assert!(ed.epsilon > 0.0 && ed.delta > 0.0 && ed.delta < (ed.epsilon / 4.0).powi(3));
        assert!(ed.boundary_separation.is_none());
        let brute = brute_force_systole(&g, 7);
        assert!((brute - ed.systole).abs() < 1e-9, "{brute} {}", ed.systole);
    }

    #[test]
    fn unit_systole_binds() {
        let ed = EpsilonDelta::from_quantities(1.0, Some(5.0), None);
        assert!(ed.epsilon <= 1.0 / 200.0);
        assert!(ed.admissible());
        assert!(ed.margins.boundary_separation.is_none());
    }

    #[test]
    fn closed_surface_has_no_cone_condition() {
        let sig: OrbifoldSignature = "g=2 cones=-".parse().unwrap();
        let g = group_for(&sig).unwrap();
        let ed = choose_constants(&g).unwrap();
        assert!(ed.cone_separation.is_none() && ed.admissible());
        assert!((brute_force_systole(&g, 4) - ed.systole).abs() < 1e-9);
    }
}
