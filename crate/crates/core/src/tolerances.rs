//! Every numerical comparison threshold used by the library lives here.
//!
//! Operations read from [`TOL`]; the handful of knobs that are empirical
//! (fit windows, homogeneity bands) are also surfaced through the CLI
//! configuration and passed explicitly.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Renormalize an isometry when `|det - 1|` exceeds this.
    pub det_drift: f64,
    /// Band around `|tr| = 2` that is classified as parabolic.
    pub parabolic_band: f64,
    /// Maximum `||R - (±I)||_max` for a relator evaluation.
    pub relator_residual: f64,
    /// Allowed error on elliptic rotation angles.
    pub elliptic_angle: f64,
    /// A holonomy closer than this to `±I` counts as numerically trivial.
    pub identity_near: f64,
    /// Angle defect at which the polygon root-finder stops.
    pub angle_defect: f64,
    /// Agreement of symbolic and numeric lengths.
    pub length_match: f64,
    /// Clairaut first-integral drift, relative to `phi(r_out)`.
    pub clairaut_drift: f64,
    /// Unit-speed drift along integrated paths.
    pub energy_drift: f64,
    /// Agreement of integrated and closed-form hyperbolic geodesics.
    pub metric_match: f64,
    /// Agreement of the profile with `sinh` past `2 delta`.
    pub sinh_match: f64,
    /// Resolution of the quasigeodesic constant.
    pub quasi_resolution: f64,
    /// Trigonometric identity checks.
    pub trig_match: f64,
    /// Relative slack on the `2 pi sinh(r)` length bound.
    pub length_bound_slack: f64,
    /// Default band for homogeneity ratios.
    pub homogeneity: f64,
}

pub const TOL: Tolerances = Tolerances {
    det_drift: 1e-12,
    parabolic_band: 1e-9,
    relator_residual: 1e-9,
    elliptic_angle: 1e-9,
    identity_near: 1e-6,
    angle_defect: 1e-12,
    length_match: 1e-8,
    clairaut_drift: 1e-6,
    energy_drift: 1e-6,
    metric_match: 1e-6,
    sinh_match: 1e-10,
    quasi_resolution: 1e-3,
    trig_match: 1e-6,
    length_bound_slack: 1e-3,
    homogeneity: 0.25,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}
