//! Verification scenarios read from JSON, and the reports they produce.
//!
//! Every scenario is run twice, on the requested profile grid and on one
//! twice as dense; the report records whether any verdict changed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::claim::claim2_identities;
use super::constants::{brute_force_systole, choose_constants, EpsilonDelta};
use super::geodesic::{
    arc_from_outer_circle, back_and_forth, hyperbolic_match, integrate_geodesic, radial_crossing_count,
    ray_crossings, AnnulusPath,
};
use super::height::{as_simple_check, bump_fixture, height_and_neighborhood, hull_spot_check, tower_fixture, Segment};
use super::profile::RadialProfile;
use super::quasi::{geodesic_samples, polar_point, spiral_divergence, symmetric_detour};
use super::SimplerepError;
use crate::hypgeom::{BoundaryGeodesic, PlanePoint};
use crate::orbifold::{group_for, FuchsianGroup, OrbifoldSignature};
use crate::tolerances::TOL;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Signature of the group, e.g. `g=1 cones=3`.
    pub group: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub profile: ProfileParams,
    /// Checks to run; all of them when empty.
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub fixtures: Fixtures,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, SimplerepError> {
        serde_json::from_str(text).map_err(|e| {
            SimplerepError::Scenario(format!("line {} column {}: {e}", e.line(), e.column()))
        })
    }

    /// Runs every check on the given group.
    pub fn all_checks(name: &str, group: &str, seed: u64) -> Scenario {
        Scenario {
            name: name.into(),
            group: group.into(),
            seed,
            profile: ProfileParams::default(),
            checks: Vec::new(),
            fixtures: Fixtures::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileParams {
    /// Radius of the cone disks; the group's `δ` when absent.
    pub delta: Option<f64>,
    pub grid: usize,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams { delta: None, grid: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Constants,
    Profile,
    Clairaut,
    RadialCrossing,
    BoundaryGeodesic,
    HyperbolicMatch,
    Claim,
    Quasigeodesic,
    Height,
    AsSimple,
    Hull,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Constants,
        CheckKind::Profile,
        CheckKind::Clairaut,
        CheckKind::RadialCrossing,
        CheckKind::BoundaryGeodesic,
        CheckKind::HyperbolicMatch,
        CheckKind::Claim,
        CheckKind::Quasigeodesic,
        CheckKind::Height,
        CheckKind::AsSimple,
        CheckKind::Hull,
    ];

    fn index(self) -> u64 {
        CheckKind::ALL.iter().position(|&k| k == self).expect("listed") as u64
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Fixtures {
    pub random_paths: usize,
    /// Angles from the inward radial at which arcs enter the annulus.
    pub arc_angles: Vec<f64>,
    pub rays: usize,
    pub claim_samples: usize,
    pub tower_distance: f64,
    pub hull_paths: usize,
    pub brute_force_letters: usize,
    pub spiral_turns: Vec<f64>,
}

impl Default for Fixtures {
    fn default() -> Self {
        Fixtures {
            random_paths: 16,
            arc_angles: vec![0.3, 0.7, 1.1, 1.3, 1.45],
            rays: 720,
            claim_samples: 100,
            tower_distance: 2.0,
            hull_paths: 20,
            brute_force_letters: 6,
            spiral_turns: vec![2.0, 8.0, 32.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub pass: bool,
    /// Distance to the nearest threshold; positive when passing.
    pub margin: Option<f64>,
    pub detail: Value,
}

impl CheckOutcome {
    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refinement {
    pub check: CheckKind,
    pub pass: bool,
    pub refined_pass: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub group: String,
    pub seed: u64,
    pub grid: usize,
    pub refined_grid: usize,
    pub delta: f64,
    /// `ε` matching `delta`; the group's own unless `delta` was overridden.
    pub epsilon: f64,
    pub constants: EpsilonDelta,
    pub checks: Vec<CheckOutcome>,
    pub refinement: Vec<Refinement>,
    pub grid_refinement_stable: bool,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn check(&self, kind: CheckKind) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.check == kind)
    }
}

struct Context<'a> {
    group: &'a FuchsianGroup,
    constants: &'a EpsilonDelta,
    profile: RadialProfile,
    epsilon: f64,
    fixtures: &'a Fixtures,
}

/// `ε` for which the constant rule would pick `delta`.
fn epsilon_for(delta: f64) -> f64 {
    let quarter_cubed = delta / 0.99;
    if quarter_cubed < 1.0 {
        4.0 * quarter_cubed.cbrt()
    } else {
        4.0 * quarter_cubed
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport, SimplerepError> {
    let sig: OrbifoldSignature =
        s.group.parse().map_err(|e| SimplerepError::Scenario(format!("group `{}`: {e}", s.group)))?;
    let group = group_for(&sig).map_err(|e| SimplerepError::Scenario(format!("group `{}`: {e}", s.group)))?;
    let constants = choose_constants(&group)?;
    let (delta, epsilon) = match s.profile.delta {
        Some(d) => (d, epsilon_for(d)),
        None => (constants.delta, constants.epsilon),
    };
    let kinds: Vec<CheckKind> = if s.checks.is_empty() { CheckKind::ALL.to_vec() } else { s.checks.clone() };
    let grid = s.profile.grid;
    let run = |samples: usize| -> Result<Vec<CheckOutcome>, SimplerepError> {
        let ctx = Context {
            group: &group,
            constants: &constants,
            profile: RadialProfile::new(delta, samples)?,
            epsilon,
            fixtures: &s.fixtures,
        };
        Ok(kinds
            .par_iter()
            .map(|&k| {
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(k.index()));
                run_check(&ctx, k, &mut rng).unwrap_or_else(|e| CheckOutcome {
                    check: k,
                    pass: false,
                    margin: None,
                    detail: json!({ "error": e.to_string() }),
                })
            })
            .collect())
    };
    let checks = run(grid)?;
    let refined = run(2 * grid)?;
    let refinement: Vec<Refinement> = checks
        .iter()
        .zip(&refined)
        .map(|(a, b)| Refinement { check: a.check, pass: a.pass, refined_pass: b.pass, stable: a.pass == b.pass })
        .collect();
    let grid_refinement_stable = refinement.iter().all(|r| r.stable);
    let pass = grid_refinement_stable && checks.iter().all(|c| c.pass);
    Ok(ScenarioReport {
        name: s.name.clone(),
        group: s.group.clone(),
        seed: s.seed,
        grid,
        refined_grid: 2 * grid,
        delta,
        epsilon,
        constants,
        checks,
        refinement,
        grid_refinement_stable,
        pass,
    })
}

/// Runs independent scenarios in parallel, keeping their order.
pub fn run_scenarios(scenarios: &[Scenario]) -> Vec<Result<ScenarioReport, SimplerepError>> {
    scenarios.par_iter().map(run_scenario).collect()
}

fn run_check(ctx: &Context, kind: CheckKind, rng: &mut ChaCha8Rng) -> Result<CheckOutcome, SimplerepError> {
    let (pass, margin, detail) = match kind {
        CheckKind::Constants => check_constants(ctx),
        CheckKind::Profile => check_profile(ctx),
        CheckKind::Clairaut => check_clairaut(ctx, rng)?,
        CheckKind::RadialCrossing => check_radial_crossing(ctx)?,
        CheckKind::BoundaryGeodesic => check_boundary_geodesic(ctx)?,
        CheckKind::HyperbolicMatch => check_hyperbolic_match(ctx, rng)?,
        CheckKind::Claim => check_claim(ctx, rng)?,
        CheckKind::Quasigeodesic => check_quasigeodesic(ctx),
        CheckKind::Height => check_height(ctx)?,
        CheckKind::AsSimple => check_as_simple(ctx),
        CheckKind::Hull => {
            let rep = hull_spot_check(&ctx.profile, ctx.epsilon, 50.0 * ctx.epsilon, ctx.fixtures.hull_paths, rng)?;
            (rep.pass, None, json!(rep))
        }
    };
    Ok(CheckOutcome { check: kind, pass, margin, detail })
}

type Verdict = (bool, Option<f64>, Value);

fn check_constants(ctx: &Context) -> Verdict {
    let ed = ctx.constants;
    let letters = ctx.fixtures.brute_force_letters;
    let brute = brute_force_systole(ctx.group, letters);
    let m = &ed.margins;
    let margin = [Some(m.systole), m.cone_separation, m.boundary_separation, Some(m.third), Some(m.cubic)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    let consistent = brute >= ed.systole - 1e-9;
    (
        ed.admissible() && consistent,
        Some(margin),
        json!({
            "constants": ed,
            "brute_force_systole": brute,
            "brute_force_letters": letters,
            "brute_force_consistent": consistent,
        }),
    )
}

fn check_profile(ctx: &Context) -> Verdict {
    let v = ctx.profile.validate();
    let margin = (TOL.sinh_match - v.sinh_mismatch).min(TOL.sinh_match - v.slope_at_delta.abs());
    (v.pass(), Some(margin), json!(v))
}

/// Direction that sends a path back along itself from `s`.
fn reversed_direction(profile: &RadialProfile, s: &super::geodesic::PathSample) -> f64 {
    (-profile.phi(s.r) * s.dtheta).atan2(-s.dr)
}

fn check_clairaut(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<Verdict, SimplerepError> {
    let p = &ctx.profile;
    let delta = p.delta;
    let (mut cmax, mut emax, mut retrace) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..ctx.fixtures.random_paths {
        let start = (delta * (1.0 + 2.0 * rng.gen::<f64>()), TAU * rng.gen::<f64>());
        let path = integrate_geodesic(p, start, TAU * rng.gen::<f64>(), 6.0 * delta)?;
        cmax = cmax.max(path.clairaut_drift);
        emax = emax.max(path.energy_drift);
        let e = path.end();
        let back = integrate_geodesic(p, (e.r, e.theta), reversed_direction(p, &e), path.length())?;
        let b = back.end();
        retrace = retrace.max(((b.r - start.0) / delta).abs()).max((b.theta - start.1).abs());
    }
    let tol = TOL.clairaut_drift.min(TOL.energy_drift);
    let pass = cmax <= TOL.clairaut_drift && emax <= TOL.energy_drift && retrace <= TOL.metric_match;
    Ok((
        pass,
        Some(tol - cmax.max(emax)),
        json!({ "paths": ctx.fixtures.random_paths, "clairaut_drift": cmax, "energy_drift": emax, "retrace_error": retrace }),
    ))
}

fn ends_on_outer_circle(path: &AnnulusPath, r_out: f64) -> bool {
    path.exited && (path.end().r - r_out).abs() <= 1e-9 * r_out
}

fn check_radial_crossing(ctx: &Context) -> Result<Verdict, SimplerepError> {
    let p = &ctx.profile;
    let r_out = 3.0 * p.delta;
    let rays = ctx.fixtures.rays;
    let radial = integrate_geodesic(p, (r_out, 0.7), PI, 2.0 * p.delta)?;
    let radial_rep = radial_crossing_count(&radial.samples, r_out, rays);
    let radial_ok = radial_rep.max_count <= 1 && ray_crossings(&radial.samples, 0.7) == 1;
    let mut arcs = Vec::new();
    let mut skipped = Vec::new();
    let mut control = None;
    for &angle in &ctx.fixtures.arc_angles {
        let arc = arc_from_outer_circle(p, angle)?;
        if !ends_on_outer_circle(&arc, r_out) || arc.angular_span() >= TAU {
            skipped.push(angle);
            continue;
        }
        let rep = radial_crossing_count(&arc.samples, r_out, rays);
        control = Some(radial_crossing_count(&back_and_forth(&arc), r_out, rays).max_count);
        arcs.push(json!({ "angle": angle, "report": rep }));
    }
    let arcs_ok = !arcs.is_empty() && arcs.iter().all(|a| a["report"]["pass"].as_bool() == Some(true));
    let control_detected = control.is_some_and(|n| n >= 2);
    let margin = arcs
        .iter()
        .map(|a| {
            let bound = a["report"]["length_bound"].as_f64().unwrap_or(0.0);
            let len = a["report"]["length"].as_f64().unwrap_or(f64::INFINITY);
            (bound * (1.0 + TOL.length_bound_slack) - len) / bound
        })
        .fold(f64::INFINITY, f64::min);
    Ok((
        radial_ok && arcs_ok && control_detected,
        margin.is_finite().then_some(margin),
        json!({
            "radial": radial_rep,
            "arcs": arcs,
            "skipped_angles": skipped,
            "negative_control_max_count": control,
            "negative_control_detected": control_detected,
        }),
    ))
}

fn check_boundary_geodesic(ctx: &Context) -> Result<Verdict, SimplerepError> {
    let p = &ctx.profile;
    let delta = p.delta;
    let path = integrate_geodesic(p, (delta, 0.0), FRAC_PI_2, TAU * p.phi(delta))?;
    let deviation = path.samples.iter().map(|s| ((s.r - delta) / delta).abs()).fold(0.0, f64::max);
    let turn_error = (path.end().theta - TAU).abs();
    let worst = deviation.max(turn_error);
    Ok((
        !path.exited && worst <= TOL.metric_match,
        Some(TOL.metric_match - worst),
        json!({ "relative_radial_deviation": deviation, "full_turn_error": turn_error, "exited": path.exited }),
    ))
}

fn check_hyperbolic_match(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<Verdict, SimplerepError> {
    let p = &ctx.profile;
    let delta = p.delta;
    let (mut radial, mut angular) = (0.0f64, 0.0f64);
    for _ in 0..ctx.fixtures.random_paths {
        // Outward-leaning starts keep r increasing, so the path stays in [2δ, 3δ].
        let r0 = delta * (2.2 + 0.6 * rng.gen::<f64>());
        let dir = FRAC_PI_3 * (2.0 * rng.gen::<f64>() - 1.0);
        let path = integrate_geodesic(p, (r0, TAU * rng.gen::<f64>()), dir, 2.0 * delta)?;
        let m = hyperbolic_match(p, &path);
        radial = radial.max(m.radial);
        angular = angular.max(m.angular);
    }
    let worst = radial.max(angular);
    Ok((
        worst <= TOL.metric_match,
        Some(TOL.metric_match - worst),
        json!({ "paths": ctx.fixtures.random_paths, "relative_radial_error": radial, "angular_error": angular }),
    ))
}

fn check_claim(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<Verdict, SimplerepError> {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for _ in 0..ctx.fixtures.claim_samples {
        let d = 0.01 + 4.99 * rng.gen::<f64>();
        let theta = 2.0 * PI / 3.0 + 2.0 * PI / 3.0 * rng.gen::<f64>();
        let r = claim2_identities(d, theta)?;
        worst = worst
            .max((r.endpoint_distance - r.formula).abs())
            .max((r.minimized_distance - r.formula).abs())
            .max((r.measured_displacement - r.displacement).abs());
        if !r.pass() {
            failures.push(r);
        }
    }
    Ok((
        failures.is_empty(),
        Some(TOL.trig_match - worst),
        json!({ "samples": ctx.fixtures.claim_samples, "max_error": worst, "failures": failures }),
    ))
}

fn check_quasigeodesic(ctx: &Context) -> Verdict {
    let poly = ctx.group.polygon();
    let center = poly.center;
    let line = BoundaryGeodesic::through(center, polar_point(center, 1.0, 0.4)).expect("distinct points");
    let geodesic_a = geodesic_samples(&line, -5.0, 5.0, 400).constant();
    let geodesic_ok = geodesic_a <= 1.0 + TOL.quasi_resolution;
    let delta = ctx.profile.delta;
    let phi_delta = ctx.profile.phi(delta);
    let mut detours = Vec::new();
    let mut detour_ok = true;
    let mut reference: Option<f64> = None;
    for &c in &poly.cone_points {
        let path = symmetric_detour(c, delta, phi_delta, 1.0, 200);
        let a = path.constant();
        let finer = symmetric_detour(c, delta, phi_delta, 1.0, 400).constant();
        let images: Vec<f64> = ctx.group.generators().iter().map(|g| path.image(g).constant()).collect();
        let equivariant = images.iter().all(|x| (x - a).abs() <= 1e-6);
        let stable = a.is_finite() && (finer - a).abs() <= TOL.quasi_resolution;
        let agrees = reference.is_none_or(|r| (r - a).abs() <= 1e-6);
        reference.get_or_insert(a);
        detour_ok &= equivariant && stable && agrees;
        detours.push(json!({ "cone_point": c, "constant": a, "refined_constant": finer, "equivariant": equivariant, "stable": stable }));
    }
    let spiral = spiral_divergence(center, 1.0, &ctx.fixtures.spiral_turns, 40);
    (
        geodesic_ok && detour_ok && spiral.diverges,
        Some(1.0 + TOL.quasi_resolution - geodesic_a),
        json!({ "geodesic_constant": geodesic_a, "detours": detours, "spiral": spiral }),
    )
}

fn check_height(ctx: &Context) -> Result<Verdict, SimplerepError> {
    let (group, ed) = (ctx.group, ctx.constants);
    let center = group.polygon().center;
    let seg = Segment { start: center, end: polar_point(center, 0.5, 1.1) };
    let trivial = height_and_neighborhood(group, ed, &seg, &seg.samples(50))?;
    let trivial_ok = trivial.height == 0.0 && trivial.contained;
    let (bseg, bpath) = bump_fixture(group, ed);
    let bump = height_and_neighborhood(group, ed, &bseg, &bpath)?;
    let bump_ok = bump.height == 0.0 && bump.contained && (bump.radius - 51.0 * ed.epsilon).abs() <= 1e-12;
    let mut pass = trivial_ok && bump_ok;
    let mut tower = Value::Null;
    if !group.polygon().cone_points.is_empty() {
        let d = ctx.fixtures.tower_distance;
        let (tseg, tpath) = tower_fixture(group, ed, 0, d);
        let rep = height_and_neighborhood(group, ed, &tseg, &tpath)?;
        let g = &group.generators()[0];
        let moved = Segment { start: g.apply(tseg.start), end: g.apply(tseg.end) };
        let moved_path: Vec<PlanePoint> = tpath.iter().map(|p| g.apply(*p)).collect();
        let image = height_and_neighborhood(group, ed, &moved, &moved_path)?;
        let equivariant = (image.height - rep.height).abs() <= 1e-6;
        let ok = (rep.height - d).abs() <= 1e-9 && rep.contained && equivariant;
        pass &= ok;
        tower = json!({ "distance": d, "report": rep, "translated_height": image.height, "equivariant": equivariant });
    }
    Ok((pass, None, json!({ "trivial": trivial, "bump": bump, "tower": tower })))
}

fn check_as_simple(ctx: &Context) -> Verdict {
    let poly = ctx.group.polygon();
    let c = poly.center;
    let seg = Segment { start: polar_point(c, 0.6, 0.4 + PI), end: polar_point(c, 0.6, 0.4) };
    let geodesic = as_simple_check(ctx.group, &seg.samples(60));
    // A circle of radius ρ about the centre meets its translate under a
    // side pairing twice.
    let circle: Vec<PlanePoint> = (0..=240).map(|k| polar_point(c, poly.radius, TAU * k as f64 / 240.0)).collect();
    let control = as_simple_check(ctx.group, &circle);
    let detected = !control.pass && control.max_crossings >= 2;
    (
        geodesic.pass && detected,
        None,
        json!({ "geodesic": geodesic, "negative_control": control, "negative_control_detected": detected }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_scenario() {
        let s = Scenario::from_json(r#"{"name":"t","group":"g=1 cones=3","checks":["profile","claim"]}"#).unwrap();
        assert_eq!(s.checks, vec![CheckKind::Profile, CheckKind::Claim]);
        assert_eq!(s.profile.grid, 4096);
        let err = Scenario::from_json("{\"name\":\"t\",\n\"group\":3}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn wide_profile_scenario_passes() {
        let mut s = Scenario::all_checks("wide", "g=1 cones=3", 11);
        s.profile = ProfileParams { delta: Some(0.05), grid: 1024 };
        s.fixtures.random_paths = 6;
        s.fixtures.claim_samples = 20;
        s.fixtures.hull_paths = 6;
        let rep = run_scenario(&s).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{:?} {}", c.check, c.detail);
        }
        assert!(rep.grid_refinement_stable && rep.pass);
    }

    #[test]
    fn epsilon_inverse_of_rule() {
        let ed = EpsilonDelta::from_quantities(2.0, None, None);
        assert!((epsilon_for(ed.delta) - ed.epsilon).abs() < 1e-12 * ed.epsilon);
    }
}

#[cfg(test)]
mod group_scale {
    use super::*;

    #[test]
    fn group_delta_scenarios_pass() {
        for sig in ["g=1 cones=3", "g=0 cones=2,2,2,3"] {
            let rep = run_scenario(&Scenario::all_checks(sig, sig, 3)).unwrap();
            let failed: Vec<_> = rep.checks.iter().filter(|c| !c.pass).map(|c| (c.check, c.detail.clone())).collect();
            assert!(rep.pass, "{sig}: {failed:?}");
        }
    }
}
