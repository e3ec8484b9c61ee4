//! Shared test fixtures.

use leach_sim::engine::place_nodes;
use leach_sim::model::{validate_config, BsPosition, Position, Protocol, Role, ScenarioConfig};

/// Straight-line recomputation of a 3-node, two-round trace.
///
/// Nodes at (10,50), (20,50), (50,90); base station at (50,150), outside the
/// field so cluster-head uplinks from nodes 0 and 1 cross into the d^4
/// regime. LEACH with p = 0.5 (two-round epochs), 4000-bit packets,
/// E0 = 1.5 mJ.
///
/// Round 0, draws (0.3, 0.7, 0.9), thresholds all 0.5: node 0 heads; 1 and 2
/// join it. Round 1, draws (0.1, 0.95, 0.2), thresholds (0, 1, 1): nodes 1
/// and 2 head; node 0 joins node 1 (10 m vs 56.6 m) and runs dry mid-send.
struct Oracle {
    energy: [f64; 3],
    dissipated: [f64; 2],
    shortfall: [f64; 2],
}

fn oracle() -> Oracle {
    let k = 4000.0;
    let e_elec = 50e-9;
    let e_fs: f64 = 10e-12;
    let e_mp = 0.0013e-12;
    let e_da = 5e-9;
    let d0 = (e_fs / e_mp).sqrt();
    let tx = |d: f64| {
        if d <= d0 {
            k * e_elec + k * e_fs * d * d
        } else {
            k * e_elec + k * e_mp * d * d * d * d
        }
    };
    let e0 = 1.5e-3;

    // distances
    let d01 = 10.0;
    let d02 = (40.0f64 * 40.0 + 40.0 * 40.0).sqrt();
    let d0_bs = (40.0f64 * 40.0 + 100.0 * 100.0).sqrt();
    let d1_bs = (30.0f64 * 30.0 + 100.0 * 100.0).sqrt();
    let d2_bs = 60.0;
    assert!(d0_bs > d0 && d1_bs > d0 && d2_bs < d0);

    // round 0
    let n1_r0 = tx(d01);
    let n2_r0 = tx(d02);
    let n0_r0 = 2.0 * k * e_elec + 3.0 * k * e_da + tx(d0_bs);
    let after0 = [e0 - n0_r0, e0 - n1_r0, e0 - n2_r0];
    assert!(after0.iter().all(|&e| e > 0.0));

    // round 1: node 0 member of node 1, node 2 lone head
    let n0_cost = tx(d01);
    let n0_paid = n0_cost.min(after0[0]);
    let n1_cost = k * e_elec + 2.0 * k * e_da + tx(d1_bs);
    let n2_cost = k * e_da + tx(d2_bs);
    assert!(n0_paid < n0_cost && n1_cost < after0[1] && n2_cost < after0[2]);

    Oracle {
        energy: [0.0, after0[1] - n1_cost, after0[2] - n2_cost],
        dissipated: [n0_r0 + n1_r0 + n2_r0, n0_paid + n1_cost + n2_cost],
        shortfall: [0.0, n0_cost - n0_paid],
    }
}

pub fn check_three_node_trace() {
    let want = oracle();

    let mut cfg = ScenarioConfig {
        n_nodes: 3,
        e0_joules: 1.5e-3,
        bs_position: BsPosition::At(Position::new(50.0, 150.0)),
        ..ScenarioConfig::default()
    };
    cfg.proto.protocol = Protocol::Leach;
    cfg.proto.p_ch = 0.5;
    let cfg = validate_config(cfg).unwrap();
    let mut s = place_nodes(&cfg);
    s.nodes[0].pos = Position::new(10.0, 50.0);
    s.nodes[1].pos = Position::new(20.0, 50.0);
    s.nodes[2].pos = Position::new(50.0, 90.0);

    let r0 = s.run_round_with_draws(&[0.3, 0.7, 0.9]);
    assert_eq!(r0.cluster_heads, vec![0]);
    assert_eq!(
        s.nodes.iter().map(|n| n.role).collect::<Vec<_>>(),
        vec![Role::ClusterHead, Role::Member(0), Role::Member(0)]
    );
    assert_eq!((r0.packets_to_bs, r0.packets_to_ch, r0.direct_count), (1, 2, 0));
    assert!(r0.deaths.is_empty());
    assert!((r0.dissipated_j - want.dissipated[0]).abs() < 1e-15);
    assert_eq!(r0.shortfall_j, want.shortfall[0]);

    let r1 = s.run_round_with_draws(&[0.1, 0.95, 0.2]);
    assert_eq!(r1.cluster_heads, vec![1, 2]);
    assert_eq!(
        s.nodes.iter().map(|n| n.role).collect::<Vec<_>>(),
        vec![Role::Member(1), Role::ClusterHead, Role::ClusterHead]
    );
    assert_eq!((r1.packets_to_bs, r1.packets_to_ch), (2, 1));
    assert_eq!(r1.deaths, vec![0]);
    assert!((r1.dissipated_j - want.dissipated[1]).abs() < 1e-15);
    assert!((r1.shortfall_j - want.shortfall[1]).abs() < 1e-15);
    for (node, e) in s.nodes.iter().zip(want.energy) {
        assert!((node.energy - e).abs() < 1e-15, "node {} {} vs {}", node.id, node.energy, e);
    }
    assert!(!s.nodes[0].alive && s.nodes[0].energy == 0.0);
    assert_eq!((s.cum_packets_bs, s.cum_packets_ch), (3, 3));
}
