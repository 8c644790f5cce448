//! Command-line front end: build groups, enumerate orbits into checkpoints,
//! turn checkpoints into counts and fits, and run geometry scenarios.
//!
//! Every command writes deterministic JSON or CSV into the output directory
//! and appends one timestamped line to `orbicount.log` there.

pub mod config;
pub mod error;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::counting::{count_values, doubling_grid, fit_exponent, from_csv, homogeneity_check, to_csv, CountCurve};
use crate::hypgeom::{classify, Classification};
use crate::mcg::checkpoint::{enumerate_to_file, read_checkpoint, resume_from_file};
use crate::mcg::{twist_generators, Functional, OrbitOptions, OrbitOutcome};
use crate::orbifold::{group_for, preset, FuchsianGroup, GeneratorKind, OrbifoldSignature};
use crate::simplerep::{run_scenarios, Scenario};
use crate::tolerances::TOL;
use crate::words::{canonicalize, Word};

pub use config::{GridSpec, RunConfig};
pub use error::CliError;

/// Word length used by the discreteness smoke test in `build`.
const SMOKE_LETTERS: usize = 8;
/// Points per doubling in the default count grid.
const DEFAULT_GRID_STEPS_PER_DOUBLING: u32 = 5;

#[derive(Debug, Parser)]
#[command(name = "orbicount", version, about = "Orbit counting on hyperbolic 2-orbifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the group for a signature and print its summary.
    Build {
        /// Signature words, e.g. `g=0 cones=2,3,7`.
        #[arg(value_name = "SIGNATURE")]
        words: Vec<String>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Enumerate the orbit ball of a seed curve into a checkpoint.
    Enumerate {
        #[command(flatten)]
        run: RunFlags,
    },
    /// Count a checkpoint on a grid and fit the growth exponent.
    Count {
        /// Checkpoint to read; `--resume` or `<out>/orbit.ckpt` otherwise.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run geometry verification scenarios.
    VerifyGeometry {
        /// Scenario JSON files.
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Fit the growth exponent of a counts CSV.
    Fit {
        csv: PathBuf,
        /// Fit window `lo:hi`.
        #[arg(long)]
        window: Option<String>,
        #[command(flatten)]
        run: RunFlags,
    },
}

#[derive(Debug, Default, Args)]
pub struct RunFlags {
    /// TOML or JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub signature: Option<String>,
    /// Seed curve as a word, e.g. `a^2 b^2`.
    #[arg(long)]
    pub seed: Option<String>,
    /// Geometric grid `L0:q:n`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Ball bound `L`; the grid maximum when absent.
    #[arg(long)]
    pub bound: Option<f64>,
    #[arg(long)]
    pub slack_cap: Option<f64>,
    /// `hyp` or `word`.
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Continue an interrupted enumeration from this checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Seed for any sampling; recorded in every report.
    #[arg(long)]
    pub rng_seed: Option<u64>,
    /// Stop an enumeration after this many node expansions.
    #[arg(long)]
    pub budget: Option<usize>,
}

impl RunFlags {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(file.overlay(RunConfig {
            signature: self.signature.clone(),
            seed: self.seed.clone(),
            grid: self.grid.clone(),
            bound: self.bound,
            slack_cap: self.slack_cap,
            functional: self.functional.clone(),
            out: self.out.clone(),
            resume: self.resume.clone(),
            rng_seed: self.rng_seed,
            budget: self.budget,
            tolerances: Default::default(),
        }))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, cfg) = match &cli.command {
        Command::Build { words, run } => {
            let mut cfg = run.resolve()?;
            if !words.is_empty() {
                cfg.signature = Some(words.join(" "));
            }
            ("build", cfg)
        }
        Command::Enumerate { run } => ("enumerate", run.resolve()?),
        Command::Count { run, .. } => ("count", run.resolve()?),
        Command::VerifyGeometry { run, .. } => ("verify-geometry", run.resolve()?),
        Command::Fit { run, window, .. } => {
            let mut cfg = run.resolve()?;
            if window.is_some() {
                cfg.tolerances.window = window.clone();
            }
            ("fit", cfg)
        }
    };
    let out = cfg.out_dir();
    fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let result = match &cli.command {
        Command::Build { .. } => cmd_build(&cfg).map(|v| emit(&out, "build.json", &v)),
        Command::Enumerate { .. } => cmd_enumerate(&cfg).map(|v| emit(&out, "orbit.json", &v)),
        Command::Count { checkpoint, .. } => cmd_count(&cfg, checkpoint.as_deref()),
        Command::VerifyGeometry { scenarios, .. } => cmd_verify_geometry(&cfg, scenarios),
        Command::Fit { csv, .. } => cmd_fit(&cfg, csv).map(|v| emit(&out, "fit.json", &v)),
    }
    .and_then(|r| r);
    log_line(&out, name, &result);
    result
}

fn log_line(out: &Path, command: &str, result: &Result<(), CliError>) {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let status = match result {
        Ok(()) => "ok".to_string(),
        Err(e) => format!("exit={} {e}", e.exit_code()),
    };
    let path = out.join("orbicount.log");
    if let Ok(mut f) = fs::OpenOptions::new().create(true).append(true).open(path) {
        // The log is advisory; a failed write must not change the outcome.
        let _ = writeln!(f, "{secs} {command} {status}");
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes a report into the output directory and echoes it to stdout.
fn emit(out: &Path, file: &str, v: &Value) -> Result<(), CliError> {
    let text = pretty(v);
    write_file(&out.join(file), &text)?;
    print!("{text}");
    Ok(())
}

fn signature(cfg: &RunConfig) -> Result<OrbifoldSignature, CliError> {
    let text = cfg.signature.as_deref().ok_or_else(|| CliError::Config("missing signature".into()))?;
    Ok(text.parse()?)
}

fn fixed(x: f64) -> String {
    format!("{x:.14e}")
}

/// Group summary: generators to 15 significant digits, relator residual,
/// rotation angles and a discreteness smoke test.
pub fn cmd_build(cfg: &RunConfig) -> Result<Value, CliError> {
    let sig = signature(cfg)?;
    let group = group_for(&sig)?;
    let mut v = build_summary(&group, preset(&sig).is_some());
    merge(&mut v, json!({ "rng_seed": cfg.rng_seed() }));
    Ok(v)
}

pub fn build_summary(group: &FuchsianGroup, is_preset: bool) -> Value {
    let sig = group.signature();
    let generators: Vec<Value> = group
        .generators()
        .iter()
        .enumerate()
        .map(|(id, g)| {
            json!({
                "name": sig.generator_name(id as _),
                "matrix": [[fixed(g.a), fixed(g.b)], [fixed(g.c), fixed(g.d)]],
            })
        })
        .collect();
    let angles: Vec<Value> = (0..sig.generator_count())
        .filter_map(|id| match sig.kind(id as _) {
            GeneratorKind::Cone { order, .. } => {
                let want = 2.0 * std::f64::consts::PI / f64::from(order);
                let got = match classify(&group.generators()[id]) {
                    Classification::Elliptic { angle } => angle,
                    _ => f64::NAN,
                };
                Some(json!({
                    "name": sig.generator_name(id as _),
                    "order": order,
                    "angle": got,
                    "error": (got - want).abs(),
                }))
            }
            _ => None,
        })
        .collect();
    json!({
        "signature": sig.to_string(),
        "signature_hash": sig.hash(),
        "preset": is_preset,
        "euler_characteristic": sig.euler_characteristic().to_string(),
        "counting_exponent": sig.counting_exponent(),
        "exceptional": sig.is_exceptional(),
        "scale": group.scale(),
        "generators": generators,
        "relator_residual": group.relator_residual(),
        "relator_tolerance": TOL.relator_residual,
        "elliptic_angles": angles,
        "discreteness": group.discreteness_smoke(SMOKE_LETTERS),
    })
}

fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Enumerates (or resumes) the orbit ball and writes `orbit.ckpt`.
pub fn cmd_enumerate(cfg: &RunConfig) -> Result<Value, CliError> {
    let sig = signature(cfg)?;
    let group = group_for(&sig)?;
    let seed_text = cfg.seed.as_deref().ok_or_else(|| CliError::Config("missing seed".into()))?;
    let seed = Word::parse(seed_text, &sig)?;
    let bound = match (cfg.bound, cfg.grid_spec()?) {
        (Some(b), _) => b,
        (None, Some(g)) => g.max(),
        (None, None) => return Err(CliError::Config("enumerate needs a bound or a grid".into())),
    };
    let autos = twist_generators(&sig)?;
    let mut opts = OrbitOptions::new(bound);
    opts.functional = cfg.functional()?;
    if let Some(cap) = cfg.slack_cap {
        opts.slack_cap = cap;
    }
    opts.budget = cfg.budget;
    let path = cfg.resume.clone().unwrap_or_else(|| cfg.out_dir().join("orbit.ckpt"));
    let outcome = if cfg.resume.is_some() {
        resume_from_file(&seed, &group, &autos, &opts, &path)?
    } else {
        enumerate_to_file(&seed, &group, &autos, &opts, &path)?
    };
    let digest = sha256_file(&path)?;
    let common = json!({
        "signature": sig.to_string(),
        "signature_hash": sig.hash(),
        "seed": canonicalize(&seed, &sig).to_text(&sig),
        "bound": bound,
        "functional": opts.functional.as_str(),
        "slack_cap": opts.slack_cap,
        "rng_seed": cfg.rng_seed(),
        "checkpoint": path.file_name().map(|f| f.to_string_lossy().into_owned()),
        "checkpoint_sha256": digest,
    });
    let mut v = common;
    let extra = match outcome {
        OrbitOutcome::Complete(ball) => json!({
            "status": "complete",
            "members": ball.members.len(),
            "slack": ball.slack,
            "stabilized": ball.stabilized,
            "passes": ball.passes,
        }),
        OrbitOutcome::Interrupted { slack, partial } => json!({
            "status": "interrupted",
            "members": partial.len(),
            "slack": slack,
        }),
    };
    merge(&mut v, extra);
    Ok(v)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

/// Counts a checkpoint on the grid, writes `counts.csv`, then fits.
pub fn cmd_count(cfg: &RunConfig, checkpoint: Option<&Path>) -> Result<Result<(), CliError>, CliError> {
    let sig = signature(cfg)?;
    let out = cfg.out_dir();
    let path = checkpoint
        .map(Path::to_path_buf)
        .or_else(|| cfg.resume.clone())
        .unwrap_or_else(|| out.join("orbit.ckpt"));
    let cp = read_checkpoint(&path, &sig)?;
    if cfg.functional.is_some() && cfg.functional()? != cp.functional {
        return Err(CliError::Config(format!(
            "checkpoint was enumerated with functional {}, not {}",
            cp.functional,
            cfg.functional()?
        )));
    }
    let grid = match cfg.grid_spec()? {
        Some(g) => g.points(),
        None => doubling_grid(cp.bound, DEFAULT_GRID_STEPS_PER_DOUBLING)?,
    };
    let grid_max = grid[grid.len() - 1];
    if grid_max > cp.bound * (1.0 + 1e-12) {
        return Err(crate::counting::CountingError::GridExceedsBall { grid_max, bound: cp.bound }.into());
    }
    let values: Vec<f64> = cp
        .entries
        .iter()
        .map(|(w, l)| match cp.functional {
            Functional::Hyperbolic => *l,
            Functional::WordLength => w.letter_count() as f64,
        })
        .collect();
    let mut curve = count_values(&values, &grid, cp.functional)?;
    curve.stabilized = cp.stabilized;
    write_file(&out.join("counts.csv"), &to_csv(&curve))?;
    Ok(fit_and_emit(cfg, &curve, Some(&sig)))
}

fn fit_and_emit(cfg: &RunConfig, curve: &CountCurve, sig: Option<&OrbifoldSignature>) -> Result<(), CliError> {
    let report = fit_json(cfg, curve, sig)?;
    emit(&cfg.out_dir(), "fit.json", &report)
}

fn fit_json(cfg: &RunConfig, curve: &CountCurve, sig: Option<&OrbifoldSignature>) -> Result<Value, CliError> {
    let fit = fit_exponent(curve, cfg.window()?)?;
    let mut v = serde_json::to_value(&fit).expect("fit report serializes");
    let tol = cfg.tolerances.homogeneity.unwrap_or(TOL.homogeneity);
    let e = sig.map_or(fit.exponent, |s| s.counting_exponent() as f64);
    merge(
        &mut v,
        json!({
            "functional": curve.functional.as_str(),
            "rng_seed": cfg.rng_seed(),
            "homogeneity": homogeneity_check(curve, 2.0, e, tol),
        }),
    );
    Ok(v)
}

/// Fit report for a counts CSV.
pub fn cmd_fit(cfg: &RunConfig, csv: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(csv).map_err(|e| CliError::io(csv, e))?;
    let curve = from_csv(&text)?;
    let sig = cfg.signature.as_deref().map(str::parse::<OrbifoldSignature>).transpose()?;
    fit_json(cfg, &curve, sig.as_ref())
}

/// Runs every scenario, writes `verify-<name>.json` for each, and fails
/// with exit code 4 if any check failed.
pub fn cmd_verify_geometry(cfg: &RunConfig, files: &[PathBuf]) -> Result<Result<(), CliError>, CliError> {
    let mut scenarios = Vec::with_capacity(files.len());
    for f in files {
        let text = fs::read_to_string(f).map_err(|e| CliError::Config(format!("{}: {e}", f.display())))?;
        let mut s = Scenario::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", f.display())))?;
        if let Some(seed) = cfg.rng_seed {
            s.seed = seed;
        }
        scenarios.push(s);
    }
    let out = cfg.out_dir();
    let mut failed = Vec::new();
    for (s, rep) in scenarios.iter().zip(run_scenarios(&scenarios)) {
        let rep = rep?;
        write_file(&out.join(format!("verify-{}.json", s.name)), &pretty(&rep))?;
        for c in &rep.checks {
            println!("{} {} {:?}", c.verdict(), s.name, c.check);
        }
        println!("{} {} grid-refinement", if rep.grid_refinement_stable { "PASS" } else { "FAIL" }, s.name);
        if !rep.pass {
            failed.push(s.name.clone());
        }
    }
    Ok(if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failed.join(", ")))
    })
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn build_joins_signature_words() {
        let cli = Cli::parse_from(["orbicount", "build", "g=0", "cones=2,3,7"]);
        let Command::Build { words, .. } = cli.command else { panic!("not build") };
        assert_eq!(words.join(" "), "g=0 cones=2,3,7");
    }
}
