//! JSON scenario files with explicit unit-suffixed keys.
//!
//! ```json
//! { "e_elec_nj_per_bit": 50, "e_fs_pj_per_bit_m2": 10, "e0_j": 0.5,
//!   "protocol": "rleach", "kopt_mode": "literal_clamp" }
//! ```
//!
//! Every key is optional; missing keys take the defaults below. Unknown keys
//! are rejected.

use crate::model::{
    validate_config, BsPosition, ConfigViolation, KoptMode, NoChFallback, Position, Protocol,
    ProtocolParams, RadioParams, ScenarioConfig, ValidatedConfig,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Base-station placement as written in a config file: `"center"` or
/// `{"x_m": .., "y_m": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BsSpec {
    Named(BsName),
    At { x_m: f64, y_m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsName {
    Center,
}

/// A scenario exactly as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub seed: u64,
    pub n_nodes: usize,
    pub field_m: f64,
    pub bs_position: BsSpec,
    pub packet_bits: u64,
    pub e0_j: f64,
    pub e_elec_nj_per_bit: f64,
    pub e_fs_pj_per_bit_m2: f64,
    pub e_mp_pj_per_bit_m4: f64,
    pub e_da_nj_per_bit: f64,
    pub protocol: Protocol,
    pub p_ch: f64,
    pub kopt_mode: KoptMode,
    pub kopt_override: Option<f64>,
    pub no_ch_fallback: NoChFallback,
    pub max_rounds: u64,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let proto = ProtocolParams::default();
        let scenario = ScenarioConfig::default();
        Self {
            seed: scenario.seed,
            n_nodes: scenario.n_nodes,
            field_m: scenario.field_m,
            bs_position: BsSpec::Named(BsName::Center),
            packet_bits: scenario.packet_bits,
            e0_j: scenario.e0_joules,
            e_elec_nj_per_bit: 50.0,
            e_fs_pj_per_bit_m2: 10.0,
            e_mp_pj_per_bit_m4: 0.0013,
            e_da_nj_per_bit: 5.0,
            protocol: proto.protocol,
            p_ch: proto.p_ch,
            kopt_mode: proto.kopt_mode,
            kopt_override: proto.kopt_override,
            no_ch_fallback: scenario.no_ch_fallback,
            max_rounds: scenario.max_rounds,
        }
    }
}

impl ConfigFile {
    pub fn to_scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            seed: self.seed,
            n_nodes: self.n_nodes,
            field_m: self.field_m,
            bs_position: match self.bs_position {
                BsSpec::Named(BsName::Center) => BsPosition::Center,
                BsSpec::At { x_m, y_m } => BsPosition::At(Position::new(x_m, y_m)),
            },
            packet_bits: self.packet_bits,
            e0_joules: self.e0_j,
            radio: RadioParams::from_units(
                self.e_elec_nj_per_bit,
                self.e_fs_pj_per_bit_m2,
                self.e_mp_pj_per_bit_m4,
                self.e_da_nj_per_bit,
            ),
            proto: ProtocolParams {
                protocol: self.protocol,
                p_ch: self.p_ch,
                kopt_mode: self.kopt_mode,
                kopt_override: self.kopt_override,
            },
            max_rounds: self.max_rounds,
            no_ch_fallback: self.no_ch_fallback,
        }
    }

    pub fn validate(&self) -> Result<ValidatedConfig, ConfigError> {
        validate_config(self.to_scenario()).map_err(|v| ConfigError::Invalid(v.iter().map(KeyViolation::from).collect()))
    }
}

/// A violated invariant, named by its config-file key.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyViolation {
    pub key: &'static str,
    pub detail: String,
}

impl From<&ConfigViolation> for KeyViolation {
    fn from(v: &ConfigViolation) -> Self {
        let key = match v.field {
            "e0_joules" => "e0_j",
            "radio.e_elec" => "e_elec_nj_per_bit",
            "radio.e_fs" => "e_fs_pj_per_bit_m2",
            "radio.e_mp" => "e_mp_pj_per_bit_m4",
            "radio.e_da" => "e_da_nj_per_bit",
            other => other,
        };
        Self {
            key,
            detail: format!("{} ({})", v.reason, v.value),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {}", .0.iter().map(|v| format!("{}: {}", v.key, v.detail)).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<KeyViolation>),
}

pub fn parse_config_file(text: &str, path: &Path) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub fn read_config_file(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config_file(&text, path)
}

/// Reads, converts and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ValidatedConfig, ConfigError> {
    read_config_file(path)?.validate()
}
