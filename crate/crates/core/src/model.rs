//! Domain types shared by every part of the simulator.
//!
//! All quantities are SI internally: joules, bits, meters. The JSON loader in
//! [`crate::cli::config`] is the only place that deals with pJ/nJ magnitudes.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A point in the deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// First-order radio coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Electronics energy per bit, transmit and receive (J/bit).
    pub e_elec: f64,
    /// Free-space amplifier coefficient (J/bit/m^2).
    pub e_fs: f64,
    /// Multipath amplifier coefficient (J/bit/m^4).
    pub e_mp: f64,
    /// Data aggregation energy per bit per signal (J/bit).
    pub e_da: f64,
}

pub const NANO: f64 = 1e-9;
pub const PICO: f64 = 1e-12;

impl RadioParams {
    /// Builds coefficients from nJ/bit, pJ/bit/m^2, pJ/bit/m^4 and nJ/bit.
    pub fn from_units(e_elec_nj: f64, e_fs_pj: f64, e_mp_pj: f64, e_da_nj: f64) -> Self {
        Self {
            e_elec: e_elec_nj * NANO,
            e_fs: e_fs_pj * PICO,
            e_mp: e_mp_pj * PICO,
            e_da: e_da_nj * NANO,
        }
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        Self::from_units(50.0, 10.0, 0.0013, 5.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Leach,
    Rleach,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Leach => "leach",
            Protocol::Rleach => "rleach",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "leach" => Ok(Protocol::Leach),
            "rleach" => Ok(Protocol::Rleach),
            other => Err(format!("unknown value `{other}` (expected one of: leach, rleach)")),
        }
    }
}

/// How the optimal-cluster-count factor enters the residual-energy threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KoptMode {
    /// Multiply by `k_opt` directly and clamp the result to `[0, 1]`.
    LiteralClamp,
    /// Multiply by `k_opt / n_alive`.
    Normalized,
    /// Drop the factor entirely; only the energy ratio remains.
    Off,
}

impl KoptMode {
    pub fn as_str(self) -> &'static str {
        match self {
            KoptMode::LiteralClamp => "literal_clamp",
            KoptMode::Normalized => "normalized",
            KoptMode::Off => "off",
        }
    }
}

impl fmt::Display for KoptMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KoptMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "literal_clamp" => Ok(KoptMode::LiteralClamp),
            "normalized" => Ok(KoptMode::Normalized),
            "off" => Ok(KoptMode::Off),
            other => Err(format!("unknown value `{other}` (expected one of: literal_clamp, normalized, off)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub protocol: Protocol,
    /// Desired cluster-head fraction.
    pub p_ch: f64,
    pub kopt_mode: KoptMode,
    pub kopt_override: Option<f64>,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            protocol: Protocol::Rleach,
            p_ch: 0.05,
            kopt_mode: KoptMode::LiteralClamp,
            kopt_override: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsPosition {
    Center,
    At(Position),
}

/// What happens in a round in which nobody is elected cluster head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoChFallback {
    /// Every alive node sends its own packet straight to the base station.
    DirectToBs,
    /// Nobody transmits.
    Idle,
}

impl NoChFallback {
    pub fn as_str(self) -> &'static str {
        match self {
            NoChFallback::DirectToBs => "direct_to_bs",
            NoChFallback::Idle => "idle",
        }
    }
}

impl fmt::Display for NoChFallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoChFallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct_to_bs" => Ok(NoChFallback::DirectToBs),
            "idle" => Ok(NoChFallback::Idle),
            other => Err(format!("unknown value `{other}` (expected one of: direct_to_bs, idle)")),
        }
    }
}

/// Full description of one simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_nodes: usize,
    /// Side length of the square deployment field (m).
    pub field_m: f64,
    pub bs_position: BsPosition,
    pub packet_bits: u64,
    /// Initial energy of every node (J).
    pub e0_joules: f64,
    pub radio: RadioParams,
    pub proto: ProtocolParams,
    pub max_rounds: u64,
    pub no_ch_fallback: NoChFallback,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_nodes: 100,
            field_m: 100.0,
            bs_position: BsPosition::Center,
            packet_bits: 4000,
            e0_joules: 0.5,
            radio: RadioParams::default(),
            proto: ProtocolParams::default(),
            max_rounds: 20_000,
            no_ch_fallback: NoChFallback::DirectToBs,
        }
    }
}

/// One violated invariant: the offending field path and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigViolation {
    pub field: &'static str,
    pub value: String,
    pub reason: &'static str,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.reason)
    }
}

/// A scenario whose invariants have been checked and whose base-station
/// position has been resolved to explicit coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedConfig(ScenarioConfig);

impl ValidatedConfig {
    pub fn get(&self) -> &ScenarioConfig {
        &self.0
    }

    pub fn into_inner(self) -> ScenarioConfig {
        self.0
    }

    /// Resolved base-station coordinates.
    pub fn bs(&self) -> Position {
        match self.0.bs_position {
            BsPosition::At(p) => p,
            BsPosition::Center => unreachable!("resolved during validation"),
        }
    }

    /// Same scenario with a different protocol; every other invariant is
    /// untouched so no re-validation is needed.
    pub fn with_protocol(&self, protocol: Protocol) -> Self {
        let mut cfg = self.0.clone();
        cfg.proto.protocol = protocol;
        Self(cfg)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut cfg = self.0.clone();
        cfg.seed = seed;
        Self(cfg)
    }
}

impl std::ops::Deref for ValidatedConfig {
    type Target = ScenarioConfig;

    fn deref(&self) -> &ScenarioConfig {
        &self.0
    }
}

fn positive(
    out: &mut Vec<ConfigViolation>,
    field: &'static str,
    value: f64,
) {
    if !(value.is_finite() && value > 0.0) {
        out.push(ConfigViolation {
            field,
            value: value.to_string(),
            reason: "must be finite and > 0",
        });
    }
}

/// Checks every scenario invariant, collecting all violations rather than
/// stopping at the first one.
pub fn validate_config(cfg: ScenarioConfig) -> Result<ValidatedConfig, Vec<ConfigViolation>> {
    let mut errs = Vec::new();

    if cfg.n_nodes < 1 {
        errs.push(ConfigViolation {
            field: "n_nodes",
            value: cfg.n_nodes.to_string(),
            reason: "must be >= 1",
        });
    }
    if cfg.packet_bits < 1 {
        errs.push(ConfigViolation {
            field: "packet_bits",
            value: cfg.packet_bits.to_string(),
            reason: "must be >= 1",
        });
    }
    if cfg.max_rounds < 1 {
        errs.push(ConfigViolation {
            field: "max_rounds",
            value: cfg.max_rounds.to_string(),
            reason: "must be >= 1",
        });
    }
    positive(&mut errs, "e0_joules", cfg.e0_joules);
    positive(&mut errs, "field_m", cfg.field_m);
    positive(&mut errs, "radio.e_elec", cfg.radio.e_elec);
    positive(&mut errs, "radio.e_fs", cfg.radio.e_fs);
    positive(&mut errs, "radio.e_mp", cfg.radio.e_mp);
    positive(&mut errs, "radio.e_da", cfg.radio.e_da);
    if cfg.radio.e_fs > 0.0 && cfg.radio.e_mp > 0.0 {
        let d0_sq = cfg.radio.e_fs / cfg.radio.e_mp;
        if !(d0_sq.is_finite() && d0_sq > 0.0) {
            errs.push(ConfigViolation {
                field: "radio.e_fs",
                value: format!("{} / {}", cfg.radio.e_fs, cfg.radio.e_mp),
                reason: "e_fs / e_mp must give a finite positive crossover",
            });
        }
    }

    let p = cfg.proto.p_ch;
    if !(p > 0.0 && p <= 1.0) {
        errs.push(ConfigViolation {
            field: "p_ch",
            value: p.to_string(),
            reason: "must lie in (0, 1]",
        });
    }
    if let Some(k) = cfg.proto.kopt_override {
        positive(&mut errs, "kopt_override", k);
    }

    let bs = match cfg.bs_position {
        BsPosition::Center => Position::new(cfg.field_m / 2.0, cfg.field_m / 2.0),
        BsPosition::At(p) => p,
    };
    if !(bs.x.is_finite() && bs.y.is_finite()) {
        errs.push(ConfigViolation {
            field: "bs_position",
            value: format!("({}, {})", bs.x, bs.y),
            reason: "coordinates must be finite",
        });
    }

    if errs.is_empty() {
        Ok(ValidatedConfig(ScenarioConfig {
            bs_position: BsPosition::At(bs),
            ..cfg
        }))
    } else {
        Err(errs)
    }
}

/// What a node does in the current round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    None,
    ClusterHead,
    /// Member of the cluster led by the given node id.
    Member(usize),
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: usize,
    pub pos: Position,
    /// Residual energy (J).
    pub energy: f64,
    pub alive: bool,
    pub role: Role,
    /// Not yet served as cluster head in the current epoch.
    pub ch_eligible: bool,
}

impl Node {
    pub fn new(id: usize, pos: Position, energy: f64) -> Self {
        Self {
            id,
            pos,
            energy,
            alive: true,
            role: Role::None,
            ch_eligible: true,
        }
    }
}
