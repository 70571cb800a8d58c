//! Run configuration: strict JSON, unknown fields rejected.
//!
//! ```json
//! {
//!   "horizon": 5,
//!   "suite": {
//!     "functionals": [{"kind": "total_const", "value": 0}],
//!     "operators": []
//!   }
//! }
//! ```
//!
//! Optional fields: `snapshot_every` (0 = never), `seed` (for randomized
//! functionals without their own seed), `output`, `validation` (probe grid)
//! and `reduction` (the Ψ end-to-end check parameters).

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::suites::{
    build_suite, BitRule, FunctionalSuite, OperatorSuite, ProbeGrid, SuiteError, SuiteSpec,
};
use crate::{Density, Nat};

/// Default cap on the probe grid derived from the horizon.
pub const DEFAULT_PROBE_LIMIT: Nat = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(deserialize_with = "non_negative_horizon")]
    pub horizon: Nat,
    #[serde(default)]
    pub snapshot_every: Nat,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub suite: SuiteSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<ProbeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionSpec>,
}

/// Parameters of the Ψ end-to-end check: operators `W_{e0}`, `W_{e1}`
/// should enumerate descriptions of `target`; the domain of Ψ below
/// `bound` must reach density `threshold` (written `[numer, denom]`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionSpec {
    pub e0: Nat,
    pub e1: Nat,
    pub target: BitRule,
    pub bound: Nat,
    pub threshold: Density,
}

fn non_negative_horizon<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
    let h = i128::deserialize(d)?;
    if h < 0 {
        return Err(serde::de::Error::custom(format!(
            "horizon must be >= 0, got {h}"
        )));
    }
    Nat::try_from(h).map_err(|_| serde::de::Error::custom("horizon too large"))
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config rejected: {0}")]
    Semantic(#[from] SuiteError),
    #[error("config rejected: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Minimal config around a suite.
    pub fn new(horizon: Nat, suite: SuiteSpec) -> Self {
        RunConfig {
            horizon,
            snapshot_every: 0,
            seed: 0,
            output: None,
            suite,
            validation: None,
            reduction: None,
        }
    }

    pub fn probe_grid(&self) -> ProbeGrid {
        self.validation.unwrap_or_else(|| {
            let span = (self.horizon + 1).min(DEFAULT_PROBE_LIMIT);
            ProbeGrid {
                indices: self.suite.functionals.len(),
                points: span,
                stages: span,
            }
        })
    }

    /// Compiles and validates the suites.
    pub fn build(&self) -> Result<(FunctionalSuite, OperatorSuite), SuiteError> {
        build_suite(&self.suite, self.seed, self.probe_grid())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a config.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = serde_json::from_str(text)?;
    if let Some(r) = &config.reduction {
        if *r.threshold.denom() == 0 || r.threshold > Density::from_integer(1) {
            return Err(ConfigError::Invalid(
                "reduction threshold must lie in [0, 1]".into(),
            ));
        }
        if r.bound == 0 {
            return Err(ConfigError::Invalid(
                "reduction bound must be positive".into(),
            ));
        }
    }
    config.build()?;
    Ok(config)
}
