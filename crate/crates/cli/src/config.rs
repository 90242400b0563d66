use std::path::Path;

use lo_core::inverse::{Caps, InverseConfig};
use lo_core::numeric::parse_rational;
use lo_core::{Density, Limits};
use num_rational::BigRational;
use serde::Deserialize;

use crate::CliError;

/// Key/value configuration file. Rationals are written as strings such as `"1/64"`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "K")]
    pub big_k: Option<String>,
    #[serde(rename = "C0")]
    pub c0: Option<String>,
    pub eps: Option<String>,
    pub slack: Option<String>,
    pub c_min: Option<String>,
    pub l_min: Option<u64>,
    pub guard: Option<usize>,
    pub support_cap: Option<usize>,
    pub max_iterations: Option<usize>,
    pub step_cap_factor: Option<usize>,
    pub a_max: Option<u64>,
    pub m_max: Option<u64>,
    pub c_max: Option<u64>,
    pub embed_ratio_budget: Option<String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Limits from the file, with `LO_GUARD` overriding the enumeration guard.
    pub fn limits(&self, guard_env: Option<usize>) -> Limits {
        let mut limits = Limits::default();
        if let Some(c) = self.support_cap {
            limits.support_cap = c;
        }
        if let Some(g) = guard_env.or(self.guard) {
            limits.enumeration_guard = g;
        }
        limits
    }
}

pub fn rational(text: &str, what: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

fn pick(flag: &Option<String>, file: &Option<String>, what: &str) -> Result<Option<BigRational>, CliError> {
    flag.as_ref()
        .or(file.as_ref())
        .map(|t| rational(t, what))
        .transpose()
}

/// Flags of the inverse commands; each overrides the matching config key.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct InverseFlags {
    /// Growth factor K of a bad extension.
    #[arg(long = "K", value_name = "RATIONAL")]
    pub big_k: Option<String>,
    /// Constant C0 of the precondition P >= C0 k^-d.
    #[arg(long = "C0", value_name = "RATIONAL")]
    pub c0: Option<String>,
    #[arg(long, value_name = "RATIONAL")]
    pub slack: Option<String>,
    #[arg(long = "c-min", value_name = "RATIONAL")]
    pub c_min: Option<String>,
    #[arg(long = "l-min")]
    pub l_min: Option<u64>,
    #[arg(long = "max-iterations")]
    pub max_iterations: Option<usize>,
}

pub fn inverse_config(
    d: usize,
    k: u64,
    mu: Density,
    eps: Option<&String>,
    flags: &InverseFlags,
    file: &ConfigFile,
    limits: Limits,
) -> Result<InverseConfig, CliError> {
    let mut cfg = InverseConfig::new(d, k, mu);
    cfg.limits = limits;
    if let Some(x) = pick(&flags.big_k, &file.big_k, "K")? {
        cfg.big_k = x;
    }
    if let Some(x) = pick(&flags.c0, &file.c0, "C0")? {
        cfg.c0 = x;
    }
    if let Some(x) = pick(&eps.cloned(), &file.eps, "eps")? {
        cfg.eps = x;
    }
    if let Some(x) = pick(&flags.slack, &file.slack, "slack")? {
        cfg.slack = x;
    }
    if let Some(x) = pick(&flags.c_min, &file.c_min, "c_min")? {
        cfg.c_min = x;
    }
    cfg.l_min = flags.l_min.or(file.l_min);
    let defaults = Caps::default();
    cfg.caps = Caps {
        max_iterations: flags
            .max_iterations
            .or(file.max_iterations)
            .unwrap_or(defaults.max_iterations),
        step_cap_factor: file.step_cap_factor.unwrap_or(defaults.step_cap_factor),
        a_max: file.a_max.unwrap_or(defaults.a_max),
        m_max: file.m_max.unwrap_or(defaults.m_max),
        c_max: file.c_max.unwrap_or(defaults.c_max),
        embed_ratio_budget: match &file.embed_ratio_budget {
            Some(t) => rational(t, "embed_ratio_budget")?,
            None => defaults.embed_ratio_budget,
        },
    };
    Ok(cfg)
}
