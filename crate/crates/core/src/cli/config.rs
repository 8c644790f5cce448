//! Run configuration: a TOML or JSON file overlaid with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::error::CliError;
use crate::counting::{geometric_grid, Window};
use crate::mcg::Functional;

/// `L0:q:n`, a geometric grid of `n` points starting at `L0` with ratio `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub l0: f64,
    pub q: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        geometric_grid(self.l0, self.q, self.n).expect("validated on parse")
    }

    pub fn max(&self) -> f64 {
        *self.points().last().expect("n >= 1")
    }
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [l0, q, n] = parts[..] else {
            return Err(format!("grid `{s}` is not L0:q:n"));
        };
        let spec = GridSpec {
            l0: l0.parse().map_err(|_| format!("grid L0 `{l0}` is not a number"))?,
            q: q.parse().map_err(|_| format!("grid ratio `{q}` is not a number"))?,
            n: n.parse().map_err(|_| format!("grid size `{n}` is not an integer"))?,
        };
        geometric_grid(spec.l0, spec.q, spec.n).map_err(|e| format!("grid `{s}`: {e}"))?;
        Ok(spec)
    }
}

/// `lo:hi`.
pub fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("window `{s}` is not lo:hi"))?;
    let lo: f64 = lo.parse().map_err(|_| format!("window bound `{lo}` is not a number"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("window bound `{hi}` is not a number"))?;
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("window `{s}` needs 0 < lo < hi"));
    }
    Ok(Window { lo, hi })
}

/// Knobs that are empirical rather than numerical tolerances.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    /// Band for homogeneity ratios around 1.
    pub homogeneity: Option<f64>,
    /// Fit window `lo:hi`; the top decade of the grid when absent.
    pub window: Option<String>,
}

/// Fields as they appear in a config file; every one is optional and
/// overridden by the matching flag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub signature: Option<String>,
    pub seed: Option<String>,
    pub grid: Option<String>,
    /// Ball bound `L` for enumeration; the grid maximum when absent.
    pub bound: Option<f64>,
    pub slack_cap: Option<f64>,
    pub functional: Option<String>,
    pub out: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    pub rng_seed: Option<u64>,
    /// Node expansions before an enumeration stops and leaves a checkpoint.
    pub budget: Option<usize>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

impl RunConfig {
    /// Parses JSON when the file name ends in `.json`, TOML otherwise.
    pub fn parse(text: &str, path: &Path) -> Result<RunConfig, CliError> {
        let name = path.display();
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(text)
                .map_err(|e| CliError::Config(format!("{name}: line {} column {}: {e}", e.line(), e.column())))
        } else {
            toml::from_str(text).map_err(|e| {
                let (line, col) = e.span().map_or((0, 0), |s| line_col(text, s.start));
                CliError::Config(format!("{name}: line {line} column {col}: {}", e.message()))
            })
        }
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text, path)
    }

    /// Fields set in `flags` win over those in `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            signature: flags.signature.or(self.signature),
            seed: flags.seed.or(self.seed),
            grid: flags.grid.or(self.grid),
            bound: flags.bound.or(self.bound),
            slack_cap: flags.slack_cap.or(self.slack_cap),
            functional: flags.functional.or(self.functional),
            out: flags.out.or(self.out),
            resume: flags.resume.or(self.resume),
            rng_seed: flags.rng_seed.or(self.rng_seed),
            budget: flags.budget.or(self.budget),
            tolerances: ToleranceOverrides {
                homogeneity: flags.tolerances.homogeneity.or(self.tolerances.homogeneity),
                window: flags.tolerances.window.or(self.tolerances.window),
            },
        }
    }

    pub fn grid_spec(&self) -> Result<Option<GridSpec>, CliError> {
        self.grid.as_deref().map(str::parse).transpose().map_err(CliError::Config)
    }

    pub fn functional(&self) -> Result<Functional, CliError> {
        self.functional.as_deref().map_or(Ok(Functional::Hyperbolic), |f| f.parse().map_err(CliError::Config))
    }

    pub fn window(&self) -> Result<Option<Window>, CliError> {
        self.tolerances.window.as_deref().map(parse_window).transpose().map_err(CliError::Config)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parses() {
        let g: GridSpec = "2:1.5:4".parse().unwrap();
        assert_eq!(g.points(), vec![2.0, 3.0, 4.5, 6.75]);
        assert!("2:0.5:4".parse::<GridSpec>().is_err());
        assert!("2:1.5".parse::<GridSpec>().is_err());
    }

    #[test]
    fn toml_errors_carry_position() {
        let text = "signature = \"g=1 cones=3\"\nslack_cap = \"four\"\n";
        let err = RunConfig::parse(text, Path::new("run.toml")).unwrap_err();
        assert!(err.to_string().contains("line 2 column"), "{err}");
        assert_eq!(err.exit_code(), 2);
        let err = RunConfig::parse("{\n \"sead\": \"a\"}", Path::new("run.json")).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig { seed: Some("a".into()), slack_cap: Some(3.0), ..Default::default() };
        let flags = RunConfig { seed: Some("a^2 b^2".into()), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed.as_deref(), Some("a^2 b^2"));
        assert_eq!(merged.slack_cap, Some(3.0));
    }
}
