//! First-order radio energy model with a free-space / multipath crossover.

use crate::model::RadioParams;
use serde::Serialize;
use std::ops::{Add, AddAssign};

/// Non-negative amount of energy in joules.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct EnergyCost(f64);

impl EnergyCost {
    pub const ZERO: EnergyCost = EnergyCost(0.0);

    pub fn joules(self) -> f64 {
        self.0
    }
}

impl Add for EnergyCost {
    type Output = EnergyCost;

    fn add(self, rhs: EnergyCost) -> EnergyCost {
        EnergyCost(self.0 + rhs.0)
    }
}

impl AddAssign for EnergyCost {
    fn add_assign(&mut self, rhs: EnergyCost) {
        self.0 += rhs.0;
    }
}

/// Distance at which the d^2 and d^4 amplifier terms coincide.
pub fn crossover_distance(radio: &RadioParams) -> f64 {
    (radio.e_fs / radio.e_mp).sqrt()
}

/// Energy to transmit `bits` over `d` meters. `d == d0` uses free space.
pub fn tx_energy(radio: &RadioParams, bits: u64, d: f64) -> EnergyCost {
    let k = bits as f64;
    let amp = if d <= crossover_distance(radio) {
        radio.e_fs * k * d * d
    } else {
        radio.e_mp * k * d * d * d * d
    };
    EnergyCost(radio.e_elec * k + amp)
}

pub fn rx_energy(radio: &RadioParams, bits: u64) -> EnergyCost {
    EnergyCost(radio.e_elec * bits as f64)
}

/// Fusion cost at a cluster head; `signals` counts the head's own reading.
pub fn aggregation_energy(radio: &RadioParams, bits: u64, signals: usize) -> EnergyCost {
    EnergyCost(radio.e_da * bits as f64 * signals as f64)
}
