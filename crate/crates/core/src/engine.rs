//! Round-by-round simulation: deployment, set-up (election and cluster
//! formation), steady-state energy charges, and death bookkeeping.
//!
//! Random draws are consumed in a fixed order: two per node at deployment
//! (x then y, by node id), then one per alive node per round, by node id.

use crate::election::{compute_k_opt, elect_cluster_heads, ElectionRule, EpochState, KoptSource};
use crate::metrics::{summarize, RunSummary};
use crate::model::{distance, NoChFallback, Node, Position, Role, ValidatedConfig};
use crate::radio::{aggregation_energy, rx_energy, tx_energy, EnergyCost};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Seeded generator used for every run. ChaCha8 output is value-stable
/// across `rand_chacha` releases.
pub type SimRng = ChaCha8Rng;

/// Resolved optimal-cluster-count weighting for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KoptInfo {
    pub value: f64,
    pub source: KoptSource,
    /// Mean node-to-base-station distance at deployment (m).
    pub mean_d_to_bs: f64,
}

/// The mutable world of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub cfg: ValidatedConfig,
    pub nodes: Vec<Node>,
    pub epoch: EpochState,
    pub round: u64,
    pub bs: Position,
    pub cum_packets_bs: u64,
    pub cum_packets_ch: u64,
    pub cum_dissipated: f64,
    pub kopt: KoptInfo,
    pub rng: SimRng,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: u64,
    pub alive_before: usize,
    pub cluster_heads: Vec<usize>,
    pub ch_count: usize,
    pub direct_count: usize,
    pub packets_to_bs: u64,
    pub packets_to_ch: u64,
    /// Energy actually drawn from batteries this round (J).
    pub dissipated_j: f64,
    /// Charges that could not be paid because a battery ran dry (J).
    pub shortfall_j: f64,
    /// Sum of residual energy after the round (J).
    pub total_residual_j: f64,
    pub deaths: Vec<usize>,
}

impl RoundReport {
    pub fn alive_after(&self) -> usize {
        self.alive_before - self.deaths.len()
    }
}

/// Deploys `n_nodes` uniformly over the square field from the seeded stream.
pub fn place_nodes(cfg: &ValidatedConfig) -> NetworkState {
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let m = cfg.field_m;
    let nodes: Vec<Node> = (0..cfg.n_nodes)
        .map(|id| {
            let x = rng.random::<f64>() * m;
            let y = rng.random::<f64>() * m;
            Node::new(id, Position::new(x, y), cfg.e0_joules)
        })
        .collect();

    let bs = cfg.bs();
    let mean_d_to_bs =
        nodes.iter().map(|n| distance(n.pos, bs)).sum::<f64>() / nodes.len() as f64;
    let (value, source) = if mean_d_to_bs > 0.0 || cfg.proto.kopt_override.is_some() {
        compute_k_opt(cfg, mean_d_to_bs)
    } else {
        // Every node sits on the base station; one cluster per node.
        (cfg.n_nodes as f64, KoptSource::Formula)
    };

    NetworkState {
        epoch: EpochState::new(cfg.proto.p_ch),
        cfg: cfg.clone(),
        nodes,
        round: 0,
        bs,
        cum_packets_bs: 0,
        cum_packets_ch: 0,
        cum_dissipated: 0.0,
        kopt: KoptInfo {
            value,
            source,
            mean_d_to_bs,
        },
        rng,
    }
}

/// Roles for this round. With at least one cluster head every other alive
/// node joins the nearest head (ties go to the lowest id); otherwise the
/// fallback decides.
pub fn assign_clusters(nodes: &[Node], chs: &[usize], fallback: NoChFallback) -> Vec<Role> {
    let mut heads = chs.to_vec();
    heads.sort_unstable();

    nodes
        .iter()
        .map(|node| {
            if !node.alive {
                return Role::None;
            }
            if heads.is_empty() {
                return match fallback {
                    NoChFallback::DirectToBs => Role::Direct,
                    NoChFallback::Idle => Role::None,
                };
            }
            if heads.binary_search(&node.id).is_ok() {
                return Role::ClusterHead;
            }
            let mut best = heads[0];
            let mut best_d = distance(node.pos, nodes[best].pos);
            for &h in &heads[1..] {
                let d = distance(node.pos, nodes[h].pos);
                if d < best_d {
                    best = h;
                    best_d = d;
                }
            }
            Role::Member(best)
        })
        .collect()
}

struct Ledger {
    paid: f64,
    shortfall: f64,
}

impl Ledger {
    fn charge(&mut self, node: &mut Node, cost: EnergyCost) {
        let cost = cost.joules();
        let paid = cost.min(node.energy);
        node.energy -= paid;
        if node.energy <= 0.0 {
            node.energy = 0.0;
        }
        self.paid += paid;
        self.shortfall += cost - paid;
    }
}

impl NetworkState {
    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn total_residual(&self) -> f64 {
        self.nodes.iter().map(|n| n.energy).sum()
    }

    pub fn election_rule(&self) -> ElectionRule {
        ElectionRule {
            protocol: self.cfg.proto.protocol,
            p: self.cfg.proto.p_ch,
            e_initial: self.cfg.e0_joules,
            k_opt: self.kopt.value,
            mode: self.cfg.proto.kopt_mode,
        }
    }

    /// Plays one round, drawing election numbers from the run's generator.
    ///
    /// Panics if no node is alive.
    pub fn run_round(&mut self) -> RoundReport {
        let alive = self.alive_count();
        let draws: Vec<f64> = (0..alive).map(|_| self.rng.random::<f64>()).collect();
        self.run_round_with_draws(&draws)
    }

    /// Plays one round with caller-supplied election draws (one per alive
    /// node, in id order).
    pub fn run_round_with_draws(&mut self, draws: &[f64]) -> RoundReport {
        let alive_before = self.alive_count();
        assert!(alive_before > 0, "run_round called with no alive nodes");

        let rule = self.election_rule();
        let chs = elect_cluster_heads(&mut self.nodes, &mut self.epoch, &rule, draws);
        let roles = assign_clusters(&self.nodes, &chs, self.cfg.no_ch_fallback);
        for (node, role) in self.nodes.iter_mut().zip(&roles) {
            node.role = *role;
        }

        let radio = self.cfg.radio;
        let k = self.cfg.packet_bits;
        let bs = self.bs;
        let mut ledger = Ledger {
            paid: 0.0,
            shortfall: 0.0,
        };

        // Members first, in id order.
        let mut members_of = vec![0usize; self.nodes.len()];
        let mut packets_to_ch = 0u64;
        for i in 0..self.nodes.len() {
            if let Role::Member(h) = self.nodes[i].role {
                let d = distance(self.nodes[i].pos, self.nodes[h].pos);
                ledger.charge(&mut self.nodes[i], tx_energy(&radio, k, d));
                members_of[h] += 1;
                packets_to_ch += 1;
            }
        }

        let mut packets_to_bs = 0u64;
        for &h in &chs {
            let node = &mut self.nodes[h];
            let m = members_of[h];
            let cost = EnergyCost::ZERO
                + rx_energy(&radio, k * m as u64)
                + aggregation_energy(&radio, k, m + 1)
                + tx_energy(&radio, k, distance(node.pos, bs));
            ledger.charge(node, cost);
            packets_to_bs += 1;
        }

        let mut direct_count = 0;
        for node in self.nodes.iter_mut().filter(|n| n.role == Role::Direct) {
            let cost = tx_energy(&radio, k, distance(node.pos, bs));
            ledger.charge(node, cost);
            direct_count += 1;
            packets_to_bs += 1;
        }

        let mut deaths = Vec::new();
        for node in self.nodes.iter_mut().filter(|n| n.alive && n.energy <= 0.0) {
            node.alive = false;
            node.energy = 0.0;
            node.ch_eligible = false;
            deaths.push(node.id);
        }

        self.cum_packets_bs += packets_to_bs;
        self.cum_packets_ch += packets_to_ch;
        self.cum_dissipated += ledger.paid;

        let report = RoundReport {
            round: self.round,
            alive_before,
            ch_count: chs.len(),
            cluster_heads: chs,
            direct_count,
            packets_to_bs,
            packets_to_ch,
            dissipated_j: ledger.paid,
            shortfall_j: ledger.shortfall,
            total_residual_j: self.total_residual(),
            deaths,
        };

        self.round += 1;
        self.epoch.round = self.round;
        report
    }
}

/// Runs until every node is dead or `max_rounds` rounds have been played.
pub fn run_simulation(cfg: &ValidatedConfig) -> RunSummary {
    let mut state = place_nodes(cfg);
    let mut reports = Vec::new();
    while state.alive_count() > 0 && state.round < cfg.max_rounds {
        reports.push(state.run_round());
    }
    summarize(cfg.clone(), state.kopt, reports)
}
