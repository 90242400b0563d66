use std::path::PathBuf;

use clap::ValueEnum;
use lo_core::instances::{generate_instance, InstanceSpec};
use lo_core::numeric::parse_int;
use lo_core::{Density, Gap, Word};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    AllEqual,
    Ap,
    Dissociated,
    GapSample,
    RandomBounded,
}

/// Word selection shared by every command that takes an instance.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct InstanceArgs {
    /// Generated instance family.
    #[arg(long, value_enum, conflicts_with_all = ["file", "word"])]
    pub instance: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Repeated value of an all-equal word.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub value: String,
    /// Dimensions of the GAP sampled by gap-sample, comma separated.
    #[arg(long = "gap-dims", value_delimiter = ',')]
    pub gap_dims: Vec<String>,
    #[arg(long = "gap-steps", value_delimiter = ',', allow_hyphen_values = true)]
    pub gap_steps: Vec<i64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Entry bound of random-bounded.
    #[arg(long, default_value_t = 10)]
    pub bound: u64,
    /// Instance file `{"steps": ["..."], "mu": "p/q"}`.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Explicit word, comma separated.
    #[arg(long = "word", value_delimiter = ',', allow_hyphen_values = true)]
    pub word: Vec<String>,
    /// Density p/q; defaults to the file's value, else 1.
    #[arg(long)]
    pub mu: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub steps: Vec<StepValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepValue {
    Text(String),
    Int(i64),
}

pub struct Instance {
    pub word: Word,
    pub mu: Density,
    pub descriptor: String,
}

pub fn parse_gap(dims: &[String], steps: &[i64]) -> Result<Gap, CliError> {
    if dims.len() != steps.len() {
        return Err(CliError::Usage(format!(
            "{} dimensions but {} steps",
            dims.len(),
            steps.len()
        )));
    }
    let dims = dims
        .iter()
        .map(|d| crate::config::rational(d, "dimension"))
        .collect::<Result<Vec<_>, _>>()?;
    Gap::new(dims, steps.to_vec()).map_err(CliError::Core)
}

fn density(text: &str) -> Result<Density, CliError> {
    text.parse::<Density>()
        .map_err(|e| CliError::Usage(format!("mu: {e}")))
}

impl InstanceArgs {
    pub fn spec(&self) -> Result<Option<InstanceSpec>, CliError> {
        let Some(family) = self.instance else {
            return Ok(None);
        };
        let n = self
            .n
            .ok_or_else(|| CliError::Usage("--n is required with --instance".into()))?;
        Ok(Some(match family {
            Family::AllEqual => InstanceSpec::AllEqual {
                n,
                value: parse_int(&self.value).map_err(|e| CliError::Usage(format!("value: {e}")))?,
            },
            Family::Ap => InstanceSpec::Ap { n },
            Family::Dissociated => InstanceSpec::Dissociated { n },
            Family::GapSample => InstanceSpec::GapSample {
                gap: parse_gap(&self.gap_dims, &self.gap_steps)?,
                n,
                seed: self.seed,
            },
            Family::RandomBounded => InstanceSpec::RandomBounded {
                n,
                bound: self.bound,
                seed: self.seed,
            },
        }))
    }

    pub fn resolve(&self, guard: usize) -> Result<Instance, CliError> {
        let flag_mu = self.mu.as_deref().map(density).transpose()?;
        if let Some(spec) = self.spec()? {
            return Ok(Instance {
                word: generate_instance(&spec, guard)?,
                mu: flag_mu.unwrap_or(Density::ONE),
                descriptor: spec.to_string(),
            });
        }
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let invalid = |e: serde_json::Error| CliError::Usage(format!("invalid instance file {}: {e}", path.display()));
            let mut value: serde_json::Value = serde_json::from_str(&text).map_err(invalid)?;
            // the output of `lo generate` is accepted as is
            if let Some(report) = value.get_mut("report") {
                value = report.take();
            }
            let file: InstanceFile = serde_json::from_value(value).map_err(invalid)?;
            let steps = file
                .steps
                .iter()
                .map(|s| match s {
                    StepValue::Text(t) => parse_int(t).map_err(CliError::Core),
                    StepValue::Int(i) => Ok(BigInt::from(*i)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mu = match (flag_mu, &file.mu) {
                (Some(m), _) => m,
                (None, Some(t)) => density(t)?,
                (None, None) => Density::ONE,
            };
            return Ok(Instance {
                word: Word::new(steps),
                mu,
                descriptor: format!("file({})", path.display()),
            });
        }
        if !self.word.is_empty() {
            let steps = self
                .word
                .iter()
                .map(|t| parse_int(t.trim()).map_err(CliError::Core))
                .collect::<Result<Vec<_>, _>>()?;
            let word = Word::new(steps);
            return Ok(Instance {
                descriptor: format!("word{word}"),
                word,
                mu: flag_mu.unwrap_or(Density::ONE),
            });
        }
        Err(CliError::Usage(
            "no instance given: use --instance, --file or --word".into(),
        ))
    }
}
