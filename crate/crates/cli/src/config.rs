//! Run configuration: a single JSON document per run. Command-line flags
//! only locate the config and override the output directory, so the config
//! file is the complete, archivable record of a run.

use std::fs;
use std::path::Path;

use kdvflat_core::pde::{Discretization, Scheme};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    NullControl,
    Reach,
    Simulate,
    Airy,
    Verify,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Identically zero initial state.
    Zero,
    /// `sin(pi x)` on [-1, 0].
    SinPi,
    /// Power-basis polynomial `sum c_k x^k`.
    Poly { c: Vec<f64> },
    /// One sample per line, matching the solver grid length.
    Samples { path: String },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Zero
    }
}

impl ProfileSpec {
    pub fn values(&self, x_grid: &[f64]) -> Result<Vec<f64>, CliError> {
        match self {
            ProfileSpec::Zero => Ok(vec![0.0; x_grid.len()]),
            ProfileSpec::SinPi => Ok(x_grid
                .iter()
                .map(|x| (core::f64::consts::PI * x).sin())
                .collect()),
            ProfileSpec::Poly { c } => Ok(x_grid
                .iter()
                .map(|x| c.iter().rev().fold(0.0, |acc, v| acc * x + v))
                .collect()),
            ProfileSpec::Samples { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
                let vals: Result<Vec<f64>, _> = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(str::parse::<f64>)
                    .collect();
                let vals =
                    vals.map_err(|e| CliError::Config(format!("bad sample in {path}: {e}")))?;
                if vals.len() != x_grid.len() {
                    return Err(CliError::Config(format!(
                        "{path} has {} samples, solver grid has {}",
                        vals.len(),
                        x_grid.len()
                    )));
                }
                Ok(vals)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Shipped examples: "x2", "x5", "fig1".
    Named { name: String },
    /// Coefficients of the target against the generating functions.
    Coeffs { b: Vec<f64> },
    /// Power-basis polynomial target; coefficients are extracted from it.
    Poly { c: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeSpec {
    Chebyshev,
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscretizationSpec {
    pub scheme: SchemeSpec,
    pub n_x: usize,
    pub n_t: usize,
    pub theta: f64,
    pub n_startup: usize,
}

impl Default for DiscretizationSpec {
    fn default() -> Self {
        Self {
            scheme: SchemeSpec::Chebyshev,
            n_x: 64,
            n_t: 600,
            theta: 0.5,
            n_startup: 4,
        }
    }
}

impl DiscretizationSpec {
    pub fn build(&self) -> Result<Discretization, CliError> {
        let scheme = match self.scheme {
            SchemeSpec::Chebyshev => Scheme::Chebyshev,
            SchemeSpec::FiniteDifference => Scheme::FiniteDifference,
        };
        Ok(Discretization::new(scheme, self.n_x, self.n_t)
            .with_theta(self.theta)
            .with_startup(self.n_startup))
    }
}

fn default_t_final() -> f64 {
    1.0
}
fn default_tau() -> f64 {
    0.5
}
fn default_s() -> f64 {
    2.0
}
fn default_m() -> f64 {
    1.0
}
fn default_trace_depth() -> usize {
    6
}
fn default_seed() -> u64 {
    0x5eed
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_m")]
    pub m: f64,
    /// Series truncation order; defaults to 12 for null-control and
    /// `b.len() + 4` for reach.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    #[serde(default = "default_trace_depth")]
    pub trace_depth: usize,
    #[serde(default)]
    pub y0: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub discretization: DiscretizationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Sample count for the randomized verify sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.a >= 0.0) {
            return Err(CliError::Config("drift coefficient a must be >= 0".into()));
        }
        if !(self.tau > 0.0 && self.tau < self.t_final) {
            return Err(CliError::Config("need 0 < tau < t_final".into()));
        }
        if self.command == Command::NullControl && !(1.5..3.0).contains(&self.s) {
            return Err(CliError::Config(
                "null-control needs step order s in [3/2, 3)".into(),
            ));
        }
        if self.n_trunc == Some(0) {
            return Err(CliError::Config("truncation order must be >= 1".into()));
        }
        if self.command == Command::Reach && self.target.is_none() {
            return Err(CliError::Config("reach needs a target".into()));
        }
        Ok(())
    }
}
