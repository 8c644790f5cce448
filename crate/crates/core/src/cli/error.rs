use std::fmt::Debug;

use thiserror::Error;

use crate::counting::CountingError;
use crate::hypgeom::HypError;
use crate::mcg::McgError;
use crate::orbifold::OrbifoldError;
use crate::simplerep::SimplerepError;
use crate::words::WordError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{code}: {message}")]
    Module { code: String, message: String },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Module { .. } => 3,
            CliError::VerificationFailed(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Module { code: "cli::Io".into(), message: format!("{}: {e}", path.display()) }
    }
}

/// `module::Variant` from the derived `Debug` form of an error enum.
fn qualified<E: Debug>(module: &str, e: &E) -> String {
    let debug = format!("{e:?}");
    let variant: String = debug.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
    format!("{module}::{variant}")
}

macro_rules! module_error {
    ($ty:ty, $module:literal) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Module { code: qualified($module, &e), message: e.to_string() }
            }
        }
    };
}

module_error!(HypError, "hypgeom");
module_error!(OrbifoldError, "orbifold");
module_error!(WordError, "words");
module_error!(McgError, "mcg");
module_error!(CountingError, "counting");
module_error!(SimplerepError, "simplerep");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_name_module_and_variant() {
        let e: CliError = CountingError::InsufficientData("none".into()).into();
        assert!(e.to_string().starts_with("counting::InsufficientData: "), "{e}");
        assert_eq!(e.exit_code(), 3);
        let e: CliError = McgError::SlackCapReached { cap: 4.0, previous: 1, last: 2 }.into();
        assert!(e.to_string().starts_with("mcg::SlackCapReached: "));
    }
}
