//! Command-line and config-file parsing.
//!
//! Precedence is flags, then the TOML file given by `--config`, then defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use qst_core::oracle::MAX_SWAP_REGISTER;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qst",
    version,
    about = "Protected state transfer through an XX spin chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandKind>,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    /// Free-fermion fidelity over a (N, g_I/g_C) grid (default)
    Sweep,
    /// Run every verification check and write a JSON report
    Verify,
    /// Many-body brute-force fidelities next to the closed forms
    Oracle,
    /// Predicted and measured swap signs of every effective basis state
    Phases,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingChoice {
    Dfs,
    Ndfs,
    Both,
    /// `dfs`, `ndfs` and the four remaining subspaces (oracle only)
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `tau` or an explicit evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSetting {
    Tau,
    Explicit(f64),
}

impl FromStr for TimeSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("tau") {
            return Ok(TimeSetting::Tau);
        }
        s.parse::<f64>()
            .map(TimeSetting::Explicit)
            .map_err(|_| format!("expected `tau` or a number, got `{s}`"))
    }
}

impl<'de> Deserialize<'de> for TimeSetting {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(t) => Ok(TimeSetting::Explicit(t)),
            Raw::Word(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Flags shared by every subcommand; all optional so unset flags fall
/// through to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the fields below
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Register size
    #[arg(long = "n", global = true)]
    pub n: Option<usize>,
    /// Odd channel lengths, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub channel_lengths: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub ratio_min: Option<f64>,
    #[arg(long, global = true)]
    pub ratio_max: Option<f64>,
    #[arg(long, global = true)]
    pub ratio_steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub spacing: Option<Spacing>,
    #[arg(long, global = true, value_enum)]
    pub encoding: Option<EncodingChoice>,
    /// `tau` or an explicit time
    #[arg(long, global = true)]
    pub time: Option<TimeSetting>,
    /// Collective dephasing strength (oracle)
    #[arg(long, global = true)]
    pub sigma_lambda: Option<f64>,
    /// Relative Gaussian error on intraregister couplings (sweep)
    #[arg(long, global = true)]
    pub disorder_sigma: Option<f64>,
    /// Monte Carlo samples for dephasing or disorder
    #[arg(long, global = true)]
    pub shots: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent)
    #[arg(long = "output", short = 'o', global = true, value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Replace every verification tolerance
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

/// Config-file schema; same names as the flags, in snake case.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandKind>,
    pub n: Option<usize>,
    pub channel_lengths: Option<Vec<usize>>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_steps: Option<usize>,
    pub spacing: Option<Spacing>,
    pub encoding: Option<EncodingChoice>,
    pub time: Option<TimeSetting>,
    pub sigma_lambda: Option<f64>,
    pub disorder_sigma: Option<f64>,
    pub shots: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

pub const DEFAULT_CHANNEL_LENGTHS: [usize; 3] = [101, 151, 201];
/// The many-body oracle is capped at 12 sites, so its default is `N = 3`.
pub const DEFAULT_ORACLE_CHANNEL_LENGTHS: [usize; 1] = [3];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: usize,
    pub channel_lengths: Vec<usize>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_steps: usize,
    pub spacing: Spacing,
    pub encoding: EncodingChoice,
    pub time: TimeSetting,
    pub sigma_lambda: f64,
    pub disorder_sigma: f64,
    pub shots: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    /// Parses `argv` (including the program name) into a validated config.
    pub fn parse_from<I, T>(argv: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
        Self::from_cli(cli)
    }

    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(cli.command, cli.args, file)
    }

    pub fn merge(
        command: Option<CommandKind>,
        flags: RunArgs,
        file: FileConfig,
    ) -> Result<Self, CliError> {
        let command = command.or(file.command).unwrap_or(CommandKind::Sweep);
        let default_lengths = match command {
            CommandKind::Oracle => DEFAULT_ORACLE_CHANNEL_LENGTHS.to_vec(),
            _ => DEFAULT_CHANNEL_LENGTHS.to_vec(),
        };
        let cfg = RunConfig {
            command,
            n: flags.n.or(file.n).unwrap_or(2),
            channel_lengths: flags
                .channel_lengths
                .or(file.channel_lengths)
                .unwrap_or(default_lengths),
            ratio_min: flags.ratio_min.or(file.ratio_min).unwrap_or(1e-3),
            ratio_max: flags.ratio_max.or(file.ratio_max).unwrap_or(1.0),
            ratio_steps: flags.ratio_steps.or(file.ratio_steps).unwrap_or(40),
            spacing: flags.spacing.or(file.spacing).unwrap_or(Spacing::Log),
            encoding: flags
                .encoding
                .or(file.encoding)
                .unwrap_or(EncodingChoice::Both),
            time: flags.time.or(file.time).unwrap_or(TimeSetting::Tau),
            sigma_lambda: flags.sigma_lambda.or(file.sigma_lambda).unwrap_or(0.0),
            disorder_sigma: flags.disorder_sigma.or(file.disorder_sigma).unwrap_or(0.0),
            shots: flags.shots.or(file.shots).unwrap_or(200),
            seed: flags.seed.or(file.seed).unwrap_or(42),
            output_path: flags.output_path.or(file.output_path),
            format: flags.format.or(file.format).unwrap_or(Format::Csv),
            tolerance: flags.tolerance.or(file.tolerance),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.channel_lengths.is_empty() {
            return usage("channel_lengths must not be empty".into());
        }
        if let Some(len) = self.channel_lengths.iter().find(|&&len| len % 2 == 0) {
            return usage(format!("channel length must be odd, got {len}"));
        }
        if self.n == 0 {
            return usage("n must be positive".into());
        }
        if self.ratio_steps == 0 || self.shots == 0 {
            return usage("ratio_steps and shots must be positive".into());
        }
        if !(self.ratio_min.is_finite() && self.ratio_max.is_finite() && self.ratio_min > 0.0) {
            return usage(format!(
                "ratio_min must be positive, got {}",
                self.ratio_min
            ));
        }
        if self.ratio_min > self.ratio_max
            || (self.ratio_min == self.ratio_max && self.ratio_steps > 1)
        {
            return usage(format!(
                "ratio_min ({}) must be below ratio_max ({})",
                self.ratio_min, self.ratio_max
            ));
        }
        if let TimeSetting::Explicit(t) = self.time {
            if !(t.is_finite() && t >= 0.0) {
                return usage(format!("time must be >= 0, got {t}"));
            }
        }
        for (name, v) in [
            ("sigma_lambda", self.sigma_lambda),
            ("disorder_sigma", self.disorder_sigma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return usage(format!("{name} must be >= 0, got {v}"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return usage(format!("tolerance must be >= 0, got {t}"));
            }
        }
        match self.command {
            CommandKind::Sweep | CommandKind::Oracle if self.n != 2 => usage(format!(
                "fidelities are defined for n = 2, got n = {}",
                self.n
            )),
            CommandKind::Sweep if self.encoding == EncodingChoice::All => {
                usage("encoding `all` needs the oracle command".into())
            }
            CommandKind::Phases if self.n > MAX_SWAP_REGISTER => usage(format!(
                "phase table supports n <= {MAX_SWAP_REGISTER}, got n = {}",
                self.n
            )),
            CommandKind::Verify if self.shots < 2 => {
                usage("verify needs at least two shots".into())
            }
            _ => Ok(()),
        }
    }
}
