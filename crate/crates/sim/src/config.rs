//! Command-line arguments, config files and their resolution into a
//! [`RunConfig`].

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use descriptor_core::chsh::QuantumStrategy;
use descriptor_core::Tolerance;
use serde::Deserialize;

pub const TOLERANCE_ENV: &str = "DESCRIPTOR_SIM_TOLERANCE";

pub const DEFAULT_THETA: f64 = 0.0;
pub const DEFAULT_PHI: f64 = FRAC_PI_4;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_CHAIN: usize = 2;

#[derive(Debug, Parser)]
#[command(
    name = "descriptor-sim",
    version,
    about = "Run descriptor-level Bell, CHSH and related experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment, or all of them.
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Bell,
    Chsh,
    Decoherence,
    Chain,
    Wigner,
    Nonisomorphism,
    All,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

/// CHSH input pairs, named by Alice's then Bob's input bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Preset {
    #[value(name = "chsh-00")]
    #[serde(rename = "chsh-00")]
    Chsh00,
    #[value(name = "chsh-01")]
    #[serde(rename = "chsh-01")]
    Chsh01,
    #[value(name = "chsh-10")]
    #[serde(rename = "chsh-10")]
    Chsh10,
    #[value(name = "chsh-11")]
    #[serde(rename = "chsh-11")]
    Chsh11,
}

impl Preset {
    pub fn angles(self) -> (f64, f64) {
        let (x, y) = match self {
            Preset::Chsh00 => (0, 0),
            Preset::Chsh01 => (0, 1),
            Preset::Chsh10 => (1, 0),
            Preset::Chsh11 => (1, 1),
        };
        QuantumStrategy::default().angles(x, y)
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    #[arg(value_enum)]
    pub experiment: Option<Experiment>,
    /// Alice's rotation angle in radians [default: 0].
    #[arg(long, allow_negative_numbers = true, conflicts_with = "preset")]
    pub theta: Option<f64>,
    /// Bob's rotation angle in radians [default: π/4].
    #[arg(long, allow_negative_numbers = true, conflicts_with = "preset")]
    pub phi: Option<f64>,
    /// Angle pair of one CHSH input pair.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Seed of the environment scrambler and the sampled referee [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relays between Alice's meter and the record [default: 2].
    #[arg(long)]
    pub chain_alice: Option<usize>,
    /// Relays between Bob's meter and the record [default: 2].
    #[arg(long)]
    pub chain_bob: Option<usize>,
    /// Largest accepted residual [default: 1e-9; env DESCRIPTOR_SIM_TOLERANCE].
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with any of the options above, keys in snake_case.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Options read from a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub chain_alice: Option<usize>,
    pub chain_bob: Option<usize>,
    pub tolerance: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("invalid config: {}", e.message())))
    }
}

/// Fully resolved options for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub theta: f64,
    pub phi: f64,
    pub seed: u64,
    pub chain_alice: usize,
    pub chain_bob: usize,
    pub tolerance: Tolerance,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Merges flags over the config file over defaults. The tolerance also
/// falls back to `env_tolerance` (the value of [`TOLERANCE_ENV`]) before
/// the default.
pub fn resolve(args: &RunArgs, env_tolerance: Option<&str>) -> Result<RunConfig, ConfigError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    resolve_with(args, &file, env_tolerance)
}

pub fn resolve_with(
    args: &RunArgs,
    file: &FileConfig,
    env_tolerance: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    let experiment = args
        .experiment
        .or(file.experiment)
        .ok_or_else(|| ConfigError("no experiment given".into()))?;

    let preset = args.preset.or(file.preset);
    let theta = args.theta.or(file.theta);
    let phi = args.phi.or(file.phi);
    let (theta, phi) = match (preset, theta, phi) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(ConfigError(
                "a preset cannot be combined with theta or phi".into(),
            ))
        }
        (Some(p), None, None) => p.angles(),
        (None, theta, phi) => (theta.unwrap_or(DEFAULT_THETA), phi.unwrap_or(DEFAULT_PHI)),
    };
    for (name, v) in [("theta", theta), ("phi", phi)] {
        if !v.is_finite() {
            return Err(ConfigError(format!(
                "{name} must be a finite number of radians"
            )));
        }
    }

    let env = match env_tolerance {
        Some(text) => Some(
            text.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("{TOLERANCE_ENV} is not a number: {text:?}")))?,
        ),
        None => None,
    };
    let tolerance = args
        .tolerance
        .or(file.tolerance)
        .or(env)
        .unwrap_or(Tolerance::DEFAULT.0);
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(ConfigError(format!(
            "tolerance must be positive and finite, got {tolerance}"
        )));
    }

    Ok(RunConfig {
        experiment,
        theta,
        phi,
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        chain_alice: args
            .chain_alice
            .or(file.chain_alice)
            .unwrap_or(DEFAULT_CHAIN),
        chain_bob: args.chain_bob.or(file.chain_bob).unwrap_or(DEFAULT_CHAIN),
        tolerance: Tolerance(tolerance),
        format: args.format.or(file.format).unwrap_or_default(),
        output: args.output.clone().or_else(|| file.output.clone()),
    })
}
