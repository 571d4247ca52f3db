use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tsbs,
    Squeezed,
    Homodyne,
    Embed,
    Herald,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Model::Tsbs => "tsbs",
            Model::Squeezed => "squeezed",
            Model::Homodyne => "homodyne",
            Model::Embed => "embed",
            Model::Herald => "herald",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Settings shared by every command. Each one may also come from the
/// `--config` TOML file; flags take precedence.
#[derive(Args, Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Model to run
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Number of modes M per side
    #[arg(long)]
    pub modes: Option<usize>,
    /// Number of photons N per side (matrix size for `embed`)
    #[arg(long)]
    pub photons: Option<usize>,
    /// Squeezing: t = tanh ξ for tsbs and herald, ξ for squeezed, homodyne and embed
    #[arg(long, allow_negative_numbers = true)]
    pub squeezing: Option<f64>,
    /// Phase-space box parameter η (homodyne)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Seed for random interferometers and samples
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (standard output if absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Number of shots (sample)
    #[arg(long)]
    pub shots: Option<usize>,
    /// Comma-separated parameter values (scan)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
    /// Gauss–Legendre order per axis for box integrals
    #[arg(long)]
    pub order: Option<usize>,
}

impl Settings {
    /// `self` with unset fields taken from `base`.
    fn over(self, base: Settings) -> Settings {
        Settings {
            model: self.model.or(base.model),
            modes: self.modes.or(base.modes),
            photons: self.photons.or(base.photons),
            squeezing: self.squeezing.or(base.squeezing),
            eta: self.eta.or(base.eta),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            shots: self.shots.or(base.shots),
            grid: self.grid.or(base.grid),
            order: self.order.or(base.order),
        }
    }
}

/// A fully resolved and validated configuration.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    #[serde(rename = "M")]
    pub modes: usize,
    #[serde(rename = "N")]
    pub photons: usize,
    pub squeezing: f64,
    pub eta: f64,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub shots: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<f64>,
    pub order: usize,
}

impl ExperimentConfig {
    pub fn resolve(flags: Settings, file: Option<&Path>) -> Result<Self, CliError> {
        let base = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Invalid(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    CliError::Invalid(format!("bad config {}: {e}", path.display()))
                })?
            }
            None => Settings::default(),
        };
        let s = flags.over(base);
        let model = s
            .model
            .ok_or_else(|| CliError::Invalid("no model given (use --model)".into()))?;
        let cfg = ExperimentConfig {
            model,
            modes: s.modes.unwrap_or(2),
            photons: s.photons.unwrap_or(1),
            squeezing: s.squeezing.unwrap_or(0.3),
            eta: s.eta.unwrap_or(0.1),
            seed: s.seed.unwrap_or(0),
            out: s.out,
            format: s.format.unwrap_or(Format::Json),
            shots: s.shots.unwrap_or(1000),
            grid: s.grid.unwrap_or_default(),
            order: s.order.unwrap_or(16),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let invalid = |m: String| Err(CliError::Invalid(m));
        if self.modes == 0 {
            return invalid("M must be positive".into());
        }
        if self.model != Model::Embed && self.photons > self.modes {
            return invalid(format!("N = {} exceeds M = {}", self.photons, self.modes));
        }
        if matches!(self.model, Model::Tsbs | Model::Herald) && !(0.0..1.0).contains(&self.squeezing) {
            return invalid(format!("t = {} outside [0, 1)", self.squeezing));
        }
        if !self.squeezing.is_finite() {
            return invalid("squeezing must be finite".into());
        }
        // ξ = 0 leaves nothing to normalize the origin checks by
        if matches!(self.model, Model::Squeezed | Model::Homodyne | Model::Embed) && self.squeezing <= 0.0 {
            return invalid(format!("xi = {} must be positive", self.squeezing));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return invalid(format!("eta = {} must be positive", self.eta));
        }
        Ok(())
    }
}
