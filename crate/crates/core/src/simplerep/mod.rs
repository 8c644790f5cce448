//! Numerical checks of the geometry behind the count: a negatively curved
//! metric around cone points, the constants `ε` and `δ` it depends on, and
//! the estimates on paths and heights that make representatives simple.

pub mod claim;
pub mod constants;
pub mod geodesic;
pub mod height;
pub mod profile;
pub mod quasi;
pub mod scenario;

use thiserror::Error;

use crate::orbifold::OrbifoldError;

pub use claim::{claim2_identities, ClaimReport};
pub use constants::{choose_constants, EpsilonDelta};
pub use geodesic::{integrate_geodesic, radial_crossing_count, AnnulusPath};
pub use height::{as_simple_check, height_and_neighborhood, HeightReport, Segment};
pub use profile::RadialProfile;
pub use quasi::quasigeodesic_constant;
pub use scenario::{run_scenario, run_scenarios, Scenario, ScenarioReport};

#[derive(Debug, Error)]
pub enum SimplerepError {
    #[error("{0}")]
    DomainError(String),
    #[error("integrator drift above tolerance even at step {step:e}")]
    StepTooLarge { step: f64 },
    #[error("systole search gave up after {tiles} tiles with best length {best}")]
    SystoleSearchInconclusive { best: f64, tiles: usize },
    #[error("cone point enumeration incomplete: {0}")]
    ConePointEnumerationIncomplete(#[from] OrbifoldError),
    #[error("scenario: {0}")]
    Scenario(String),
}
