//! Run configuration: one JSON schema shared by all subcommands, with
//! per-subcommand required-section checks.

use crate::CliError;
use gwre::{two_poly_family, Environment, OffspringPgf};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    Extended,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberSpec {
    pub weight: f64,
    pub probs: Vec<f64>,
}

/// Exactly one of the two forms must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub two_poly: Option<f64>,
    pub members: Option<Vec<MemberSpec>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.min > 0.0 && self.step > 0.0 && self.max > self.min) {
            return Err(CliError::Config(format!(
                "bad grid: need 0 < min < max and step > 0, got min={} max={} step={}",
                self.min, self.max, self.step
            )));
        }
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.min + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSection {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudesSection {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(default)]
    pub richardson: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub x: GridSpec,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    pub t: usize,
    pub y_max: f64,
    pub dy: f64,
    pub x: GridSpec,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub t: u32,
    pub trials: u64,
    pub seed: u64,
    pub bins: usize,
    /// Histogram window; defaults to [0, 5).
    pub x: Option<SimulateRange>,
    /// Starting population; defaults to 1.
    pub initial: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub environment: EnvSpec,
    pub phi: Option<PhiSection>,
    pub amplitudes: Option<AmplitudesSection>,
    pub density: Option<DensitySection>,
    pub reference: Option<ReferenceSection>,
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub precision: Precision,
    pub threads: Option<usize>,
}

/// Parsed + validated configuration with the environment built.
#[derive(Debug)]
pub struct RunConfig {
    pub env: Environment,
    pub env_label: String,
    pub raw: RawConfig,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let raw: RawConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;

    let (env, env_label) = match (&raw.environment.two_poly, &raw.environment.members) {
        (Some(p), None) => (
            two_poly_family(*p).map_err(|e| CliError::Config(e.to_string()))?,
            format!("two_poly:{p}"),
        ),
        (None, Some(members)) => {
            let mut built = Vec::with_capacity(members.len());
            let mut label = String::from("members:");
            for (i, m) in members.iter().enumerate() {
                let pgf = OffspringPgf::new(m.probs.clone())
                    .map_err(|e| CliError::Config(format!("member {i}: {e}")))?;
                label.push_str(&format!(
                    "[{};{}]",
                    m.weight,
                    m.probs
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                ));
                built.push((m.weight, pgf));
            }
            (
                Environment::new(built).map_err(|e| CliError::Config(e.to_string()))?,
                label,
            )
        }
        _ => {
            return Err(CliError::Config(
                "environment must have exactly one of \"two_poly\" or \"members\"".into(),
            ))
        }
    };

    let violations = env.validate();
    if !violations.is_empty() {
        let list = violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::Config(format!("invalid environment: {list}")));
    }

    Ok(RunConfig {
        env,
        env_label,
        raw,
    })
}

impl RunConfig {
    pub fn phi_section(&self) -> Result<&PhiSection, CliError> {
        self.raw
            .phi
            .as_ref()
            .ok_or_else(|| CliError::Config("this subcommand needs a \"phi\" section".into()))
    }

    /// Table dimensions for amplitude/density runs: explicit "phi" section
    /// when present, otherwise J from the caller and the stock depth 2000.
    pub fn table_dims(&self, j_needed: usize, n_needed: usize) -> (usize, usize) {
        match &self.raw.phi {
            Some(s) => (s.j.max(j_needed), s.n.max(n_needed)),
            None => (j_needed.max(19), n_needed.max(2000)),
        }
    }
}
