//! Command-line flags and the equivalent JSON config file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "keane", version, about = "Keane interval exchanges: construction, measures, dimension and recurrence reports")]
pub struct Cli {
    /// Read the whole run configuration from a JSON file instead of flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Where a parameter sequence comes from.
#[derive(Debug, Clone, Default, Args)]
pub struct SeqSource {
    /// Rule name: explicit, minimal-admissible, generic, appendix, alpha2,
    /// alpha3, flip11, flip-0, ... or a full tag such as flip(1,0).
    #[arg(long)]
    pub rule: Option<String>,
    /// Exponent for the alpha2 and alpha3 rules, as p/q or a decimal.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Starting value n_1.
    #[arg(long)]
    pub n1: Option<u64>,
    /// JSON parameter sequence to read.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Generate or validate a parameter sequence and print it as JSON.
    Params {
        #[command(flatten)]
        source: SeqSource,
        /// Number of pairs to generate.
        #[arg(long = "K")]
        depth: Option<usize>,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the measure lemma suite and the induction oracle.
    Verify {
        #[command(flatten)]
        source: SeqSource,
        /// Highest level checked.
        #[arg(long = "K-max", default_value_t = 3)]
        k_max: usize,
        /// Truncation depth of the enclosures.
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Significant digits of decimal columns.
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
    /// Dimension-bound sequences for dim(λ2, d_λ3) or dim(λ3, d_λ2).
    Dimension {
        #[command(flatten)]
        source: SeqSource,
        /// 2 for dim(λ2, d_λ3), 3 for dim(λ3, d_λ2).
        #[arg(long)]
        direction: usize,
        /// Highest level k of the sequence.
        #[arg(long = "K")]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Significant digits of the logarithm quotients.
        #[arg(long, default_value_t = 50)]
        digits: usize,
    },
    /// Phase fraction, covering condition and complement mass at level k.
    Generic {
        #[command(flatten)]
        source: SeqSource,
        #[arg(long)]
        k: usize,
        /// Threshold ε for b_{k,1}/t_k < ε.
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Recurrence statistic n^α d(T^n x, y) for sampled pairs under the
    /// appendix parameters.
    Recurrence {
        /// Starting value n_1 of the appendix rule.
        #[arg(long)]
        n1: Option<u64>,
        /// JSON parameter sequence to use instead of the appendix rule.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Depth of the exchange.
        #[arg(long = "K", default_value_t = 3)]
        depth: usize,
        /// Tower level used to enclose d; defaults to K - 2.
        #[arg(long)]
        level: Option<usize>,
        /// Horizon.
        #[arg(long = "N")]
        horizon: u64,
        /// Exponent of n.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Seed of the sampling generator.
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
}

/// JSON mirror of the flags. Keys match the long flag names.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub rule: Option<String>,
    pub alpha: Option<String>,
    pub n1: Option<u64>,
    pub file: Option<PathBuf>,
    #[serde(rename = "K")]
    pub depth: Option<usize>,
    #[serde(rename = "K-max")]
    pub k_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub r: Option<usize>,
    pub format: Option<Format>,
    pub digits: Option<usize>,
    pub direction: Option<usize>,
    pub k: Option<usize>,
    pub eps: Option<String>,
    pub level: Option<usize>,
    #[serde(rename = "N")]
    pub horizon: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn into_command(self) -> Result<Command, String> {
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| format!("config is missing \"{name}\""));
        let source = SeqSource { rule: self.rule.clone(), alpha: self.alpha.clone(), n1: self.n1, file: self.file.clone() };
        let used = |ok: &[bool]| -> Result<(), String> {
            if ok.iter().all(|&b| b) {
                Ok(())
            } else {
                Err(format!("config has keys that do not apply to \"{}\"", self.command))
            }
        };
        match self.command.as_str() {
            "params" => {
                used(&[self.k_max.is_none(), self.r.is_none(), self.direction.is_none(), self.k.is_none(), self.seed.is_none()])?;
                Ok(Command::Params { source, depth: self.depth, out: self.out })
            }
            "verify" => {
                used(&[self.out.is_none(), self.seed.is_none(), self.direction.is_none()])?;
                Ok(Command::Verify {
                    source,
                    k_max: self.k_max.unwrap_or(3),
                    r: self.r.unwrap_or(3),
                    format: self.format.unwrap_or(Format::Csv),
                    digits: self.digits.unwrap_or(12),
                })
            }
            "dimension" => {
                used(&[self.out.is_none(), self.seed.is_none()])?;
                Ok(Command::Dimension {
                    source,
                    direction: need(self.direction, "direction")?,
                    k_max: need(self.depth, "K")?,
                    format: self.format.unwrap_or(Format::Csv),
                    digits: self.digits.unwrap_or(50),
                })
            }
            "generic" => {
                used(&[self.out.is_none(), self.seed.is_none()])?;
                Ok(Command::Generic {
                    source,
                    k: need(self.k, "k")?,
                    eps: self.eps.ok_or("config is missing \"eps\"")?,
                    format: self.format.unwrap_or(Format::Json),
                })
            }
            "recurrence" => {
                used(&[self.rule.is_none(), self.out.is_none()])?;
                Ok(Command::Recurrence {
                    n1: self.n1,
                    file: self.file,
                    depth: self.depth.unwrap_or(3),
                    level: self.level,
                    horizon: self.horizon.ok_or("config is missing \"N\"")?,
                    alpha: self.alpha.ok_or("config is missing \"alpha\"")?,
                    samples: self.samples.unwrap_or(1),
                    seed: self.seed.ok_or("recurrence requires \"seed\"")?,
                    format: self.format.unwrap_or(Format::Csv),
                    digits: self.digits.unwrap_or(12),
                })
            }
            other => Err(format!("unknown command {other:?}")),
        }
    }
}
