//! Scenario files. One JSON document per run; the record shape depends on
//! the command.

use serde::Deserialize;

use maxsemi::timeseries::Init;
use maxsemi::{DistSpec, LaplaceTransformSpec};

fn default_grid_size() -> usize {
    2001
}

fn default_burn_in() -> usize {
    maxsemi::timeseries::DEFAULT_BURN_IN
}

fn default_tau() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MakeDistConfig {
    pub dist: DistSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub dist: DistSpec,
    /// Points at which to tabulate the cdf; defaults to a support grid.
    #[serde(default)]
    pub x: Option<Vec<f64>>,
    /// Levels at which to tabulate the quantile; defaults to 99 levels.
    #[serde(default)]
    pub u: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub dist: DistSpec,
    pub n: usize,
    pub seed: u64,
    /// Draw from `cdf^tau` instead of the law itself.
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub format: SampleFormat,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub dist: DistSpec,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimEpConfig {
    pub dist: DistSpec,
    pub times: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimCompoundEpConfig {
    pub dist: DistSpec,
    /// Law of the subordinator at time 1.
    pub phi: LaplaceTransformSpec,
    pub times: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimAr1Config {
    pub rho: f64,
    /// Present only for the modified scheme.
    #[serde(default)]
    pub p: Option<f64>,
    pub marginal: DistSpec,
    pub length: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default)]
    pub init: Init,
    /// Draws for the geometric-maximum check of the modified scheme;
    /// defaults to `replicates`.
    #[serde(default)]
    pub geometric_n: Option<usize>,
}
