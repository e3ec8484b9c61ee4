//! Cluster-head election: the classic rotating threshold, the residual-energy
//! weighted variant, and per-epoch eligibility bookkeeping.

use crate::model::{KoptMode, Node, Protocol, ScenarioConfig};
use serde::Serialize;
use std::collections::BTreeSet;
use std::f64::consts::PI;

/// Number of rounds in one rotation epoch, `ceil(1/p)`.
///
/// The small slack keeps `1/0.05` from rounding up to 21 when the quotient
/// lands one ulp above an integer.
pub fn epoch_length(p: f64) -> u64 {
    ((1.0 / p) - 1e-9).ceil().max(1.0) as u64
}

/// Probability that an alive node is elected in a given round, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Threshold(f64);

impl Threshold {
    pub const ZERO: Threshold = Threshold(0.0);

    fn clamped(v: f64) -> Self {
        Threshold(if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Unclamped rotating threshold `p / (1 - p * (r mod L))`.
fn rotating_base(p: f64, round: u64) -> f64 {
    let r_mod = (round % epoch_length(p)) as f64;
    let raw = p / (1.0 - p * r_mod);
    // Last round of an integer-length epoch is analytically exactly 1.
    if (raw - 1.0).abs() < 1e-9 {
        1.0
    } else {
        raw
    }
}

pub fn leach_threshold(p: f64, round: u64, eligible: bool) -> Threshold {
    if !eligible {
        return Threshold::ZERO;
    }
    Threshold::clamped(rotating_base(p, round))
}

#[allow(clippy::too_many_arguments)]
pub fn rleach_threshold(
    p: f64,
    round: u64,
    eligible: bool,
    e_residual: f64,
    e_initial: f64,
    k_opt: f64,
    mode: KoptMode,
    n_alive: usize,
) -> Threshold {
    if !eligible || e_residual <= 0.0 {
        return Threshold::ZERO;
    }
    let weight = match mode {
        KoptMode::LiteralClamp => k_opt,
        KoptMode::Normalized => k_opt / n_alive.max(1) as f64,
        KoptMode::Off => 1.0,
    };
    Threshold::clamped(rotating_base(p, round) * (e_residual / e_initial) * weight)
}

/// Where the optimal cluster count came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KoptSource {
    Formula,
    Override,
}

/// Optimal number of clusters for a single-hop network,
/// `sqrt(n / 2pi) * sqrt(e_fs / e_mp) * M / d_bs^2`, unless overridden.
pub fn compute_k_opt(cfg: &ScenarioConfig, mean_d_to_bs: f64) -> (f64, KoptSource) {
    if let Some(k) = cfg.proto.kopt_override {
        return (k, KoptSource::Override);
    }
    let n = cfg.n_nodes as f64;
    let k = (n / (2.0 * PI)).sqrt() * (cfg.radio.e_fs / cfg.radio.e_mp).sqrt() * cfg.field_m
        / (mean_d_to_bs * mean_d_to_bs);
    (k, KoptSource::Formula)
}

/// Rotation bookkeeping: which nodes have already led a cluster this epoch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochState {
    pub round: u64,
    pub epoch_length: u64,
    pub served_this_epoch: BTreeSet<usize>,
}

impl EpochState {
    pub fn new(p: f64) -> Self {
        Self {
            round: 0,
            epoch_length: epoch_length(p),
            served_this_epoch: BTreeSet::new(),
        }
    }

    pub fn at_epoch_start(&self) -> bool {
        self.round.is_multiple_of(self.epoch_length)
    }
}

/// Parameters that fix the threshold function for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectionRule {
    pub protocol: Protocol,
    pub p: f64,
    pub e_initial: f64,
    pub k_opt: f64,
    pub mode: KoptMode,
}

impl ElectionRule {
    /// Threshold for `node` in the epoch's current round.
    ///
    /// The residual-energy variant forms its very first round with the plain
    /// rotating threshold, since no node has spent energy yet.
    pub fn threshold(&self, node: &Node, round: u64, n_alive: usize) -> Threshold {
        if !node.alive {
            return Threshold::ZERO;
        }
        match self.protocol {
            Protocol::Rleach if round > 0 => rleach_threshold(
                self.p,
                round,
                node.ch_eligible,
                node.energy,
                self.e_initial,
                self.k_opt,
                self.mode,
                n_alive,
            ),
            _ => leach_threshold(self.p, round, node.ch_eligible),
        }
    }
}

/// Resets eligibility at epoch boundaries and drops dead nodes from the
/// served set. Must run before thresholds are evaluated for a round.
pub fn refresh_eligibility(nodes: &mut [Node], epoch: &mut EpochState) {
    if epoch.at_epoch_start() {
        epoch.served_this_epoch.clear();
        for node in nodes.iter_mut().filter(|n| n.alive) {
            node.ch_eligible = true;
        }
    }
    epoch
        .served_this_epoch
        .retain(|&id| nodes.get(id).is_some_and(|n| n.alive));
}

/// Elects this round's cluster heads.
///
/// `draws` holds one uniform `[0, 1)` value per alive node, in node-id order.
/// A node is elected iff its draw is strictly below its threshold. Elected
/// nodes become ineligible for the rest of the epoch.
pub fn elect_cluster_heads(
    nodes: &mut [Node],
    epoch: &mut EpochState,
    rule: &ElectionRule,
    draws: &[f64],
) -> Vec<usize> {
    refresh_eligibility(nodes, epoch);
    let n_alive = nodes.iter().filter(|n| n.alive).count();
    assert_eq!(draws.len(), n_alive, "exactly one draw per alive node");

    let round = epoch.round;
    let elected: Vec<usize> = nodes
        .iter()
        .filter(|n| n.alive)
        .zip(draws)
        .filter(|(node, &draw)| draw < rule.threshold(node, round, n_alive).value())
        .map(|(node, _)| node.id)
        .collect();

    for &id in &elected {
        nodes[id].ch_eligible = false;
        epoch.served_this_epoch.insert(id);
    }
    elected
}
