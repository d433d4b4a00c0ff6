//! Run metadata written next to every output set.
//!
//! The manifest holds only what determines the output bytes. Wall-clock
//! timing and the worker count are reported on stderr instead, so reruns
//! reproduce the manifest exactly.

use serde::{Deserialize, Serialize};

use crate::config::render_config;
use crate::experiment::ExperimentConfig;
use crate::paths::GENERATOR_TAG;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub initial_ledger_value: String,
    pub std_denominator: String,
    pub tie_break: String,
    pub terminal_delta: String,
    pub compounding: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            initial_ledger_value: "PV0 = delta0 * S0 * (1 - k)".into(),
            std_denominator: "n - 1".into(),
            tie_break: "NA > RA > WA".into(),
            terminal_delta: "indicator(S_T > K), 0.5 at S_T = K".into(),
            compounding: "(1 + r dt) per step in the ledger, exp(-rT) final discount".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub artifact_version: String,
    pub command: String,
    pub master_seed: u64,
    pub generator: String,
    pub conventions: Conventions,
    /// Canonical config text; feeding it back to the parser reproduces `config`.
    pub config_text: String,
    pub config: ExperimentConfig,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, outputs: &[&str]) -> Self {
        RunManifest {
            artifact: env!("CARGO_PKG_NAME").into(),
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            master_seed: config.master_seed,
            generator: GENERATOR_TAG.into(),
            conventions: Conventions::default(),
            config_text: render_config(config),
            config: config.clone(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
