//! Evaluation quantities derived from round reports: lifetime markers,
//! residual-energy and throughput series, and paired protocol comparisons.

use crate::engine::{KoptInfo, RoundReport};
use crate::model::ValidatedConfig;
use serde::Serialize;
use thiserror::Error;

/// Rounds (counted as completed rounds) at which the first node, half of
/// the nodes, and the last node had died.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LifetimeMarkers {
    pub fnd: Option<u64>,
    pub hnd: Option<u64>,
    pub lnd: Option<u64>,
    pub stability_period: Option<u64>,
    pub lifetime_span: Option<u64>,
}

/// `alive_series[i]` is the alive count after `i` completed rounds.
pub fn lifetime_markers(alive_series: &[usize], n: usize) -> LifetimeMarkers {
    let first = |pred: &dyn Fn(usize) -> bool| {
        alive_series
            .iter()
            .position(|&a| pred(a))
            .map(|i| i as u64)
    };
    let fnd = first(&|a| a < n);
    let hnd = first(&|a| a <= n / 2);
    let lnd = first(&|a| a == 0);
    LifetimeMarkers {
        fnd,
        hnd,
        lnd,
        stability_period: fnd,
        lifetime_span: fnd.zip(lnd).map(|(f, l)| l - f),
    }
}

/// Alive count before the first round followed by the count after each round.
pub fn alive_series(reports: &[RoundReport]) -> Vec<usize> {
    match reports.first() {
        None => Vec::new(),
        Some(first) => std::iter::once(first.alive_before)
            .chain(reports.iter().map(RoundReport::alive_after))
            .collect(),
    }
}

/// Average residual energy per deployed node, starting with the untouched
/// network and then after each round. Dead nodes count as zero.
pub fn residual_energy_series(reports: &[RoundReport], n: usize) -> Vec<f64> {
    let n = n as f64;
    match reports.first() {
        None => Vec::new(),
        Some(first) => std::iter::once(first.total_residual_j + first.dissipated_j)
            .chain(reports.iter().map(|r| r.total_residual_j))
            .map(|e| e / n)
            .collect(),
    }
}

/// Cumulative packets delivered to the base station after each round.
pub fn throughput_series(reports: &[RoundReport]) -> Vec<u64> {
    reports
        .iter()
        .scan(0u64, |acc, r| {
            *acc += r.packets_to_bs;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub markers: LifetimeMarkers,
    pub total_packets_bs: u64,
    pub total_packets_ch: u64,
    pub kopt: KoptInfo,
    pub config_echo: ValidatedConfig,
    pub rounds: Vec<RoundReport>,
}

impl RunSummary {
    pub fn alive_series(&self) -> Vec<usize> {
        alive_series(&self.rounds)
    }

    pub fn residual_series(&self) -> Vec<f64> {
        residual_energy_series(&self.rounds, self.config_echo.n_nodes)
    }
}

pub fn summarize(cfg: ValidatedConfig, kopt: KoptInfo, rounds: Vec<RoundReport>) -> RunSummary {
    let markers = lifetime_markers(&alive_series(&rounds), cfg.n_nodes);
    RunSummary {
        seed: cfg.seed,
        markers,
        total_packets_bs: rounds.iter().map(|r| r.packets_to_bs).sum(),
        total_packets_ch: rounds.iter().map(|r| r.packets_to_ch).sum(),
        kopt,
        config_echo: cfg,
        rounds,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CompareError {
    #[error("cannot compare empty run lists")]
    Empty,
    #[error("run lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("run {index}: baseline seed {baseline} paired with candidate seed {candidate}")]
    SeedMismatch {
        index: usize,
        baseline: u64,
        candidate: u64,
    },
}

/// Candidate-over-baseline ratios for one seed. `None` when the baseline
/// value is zero or a marker was never reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRatios {
    pub seed: u64,
    pub fnd: Option<f64>,
    pub hnd: Option<f64>,
    pub lnd: Option<f64>,
    pub packets_bs: Option<f64>,
    pub residual_auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: Option<f64>,
    pub se: Option<f64>,
    /// Number of seeds that contributed a defined ratio.
    pub count: usize,
}

impl MeanSe {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().collect();
        let count = v.len();
        if count == 0 {
            return Self {
                mean: None,
                se: None,
                count,
            };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let se = if count > 1 {
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean: Some(mean),
            se: Some(se),
            count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRatios {
    pub fnd: MeanSe,
    pub hnd: MeanSe,
    pub lnd: MeanSe,
    pub packets_bs: MeanSe,
    pub residual_auc: MeanSe,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub baseline: String,
    pub candidate: String,
    pub kopt_mode: String,
    pub no_ch_fallback: String,
    pub per_seed: Vec<SeedRatios>,
    pub mean: MeanRatios,
}

/// Means and standard errors of one protocol's markers over a seed batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolAggregate {
    pub protocol: String,
    pub seeds: usize,
    pub fnd: MeanSe,
    pub hnd: MeanSe,
    pub lnd: MeanSe,
    pub packets_bs: MeanSe,
}

pub fn aggregate(runs: &[RunSummary]) -> ProtocolAggregate {
    let marker = |f: fn(&LifetimeMarkers) -> Option<u64>| {
        MeanSe::of(runs.iter().filter_map(|r| f(&r.markers)).map(|v| v as f64))
    };
    ProtocolAggregate {
        protocol: runs
            .first()
            .map(|r| r.config_echo.proto.protocol.to_string())
            .unwrap_or_default(),
        seeds: runs.len(),
        fnd: marker(|m| m.fnd),
        hnd: marker(|m| m.hnd),
        lnd: marker(|m| m.lnd),
        packets_bs: MeanSe::of(runs.iter().map(|r| r.total_packets_bs as f64)),
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

fn marker_ratio(b: Option<u64>, a: Option<u64>) -> Option<f64> {
    ratio(b? as f64, a? as f64)
}

/// Sum of the average-residual series over indices `0..=upto`, holding the
/// last value once a run has ended.
fn residual_area(series: &[f64], upto: usize) -> f64 {
    let last = series.last().copied().unwrap_or(0.0);
    (0..=upto)
        .map(|i| series.get(i).copied().unwrap_or(last))
        .sum()
}

/// Per-seed and mean ratios of `candidate` over `baseline`, paired by seed.
///
/// The residual-energy area is taken up to the baseline's last-node-death
/// round (or the end of its series if every node survived).
pub fn compare_runs(
    baseline: &[RunSummary],
    candidate: &[RunSummary],
) -> Result<ComparisonTable, CompareError> {
    if baseline.is_empty() || candidate.is_empty() {
        return Err(CompareError::Empty);
    }
    if baseline.len() != candidate.len() {
        return Err(CompareError::LengthMismatch(baseline.len(), candidate.len()));
    }

    let mut per_seed = Vec::with_capacity(baseline.len());
    for (index, (a, b)) in baseline.iter().zip(candidate).enumerate() {
        if a.seed != b.seed {
            return Err(CompareError::SeedMismatch {
                index,
                baseline: a.seed,
                candidate: b.seed,
            });
        }
        let (ra, rb) = (a.residual_series(), b.residual_series());
        let upto = a
            .markers
            .lnd
            .map(|l| l as usize)
            .unwrap_or(ra.len().saturating_sub(1));
        per_seed.push(SeedRatios {
            seed: a.seed,
            fnd: marker_ratio(b.markers.fnd, a.markers.fnd),
            hnd: marker_ratio(b.markers.hnd, a.markers.hnd),
            lnd: marker_ratio(b.markers.lnd, a.markers.lnd),
            packets_bs: ratio(b.total_packets_bs as f64, a.total_packets_bs as f64),
            residual_auc: ratio(residual_area(&rb, upto), residual_area(&ra, upto)),
        });
    }

    let stat = |f: fn(&SeedRatios) -> Option<f64>| MeanSe::of(per_seed.iter().filter_map(f));
    let mean = MeanRatios {
        fnd: stat(|s| s.fnd),
        hnd: stat(|s| s.hnd),
        lnd: stat(|s| s.lnd),
        packets_bs: stat(|s| s.packets_bs),
        residual_auc: stat(|s| s.residual_auc),
    };

    let cfg = &candidate[0].config_echo;
    Ok(ComparisonTable {
        baseline: baseline[0].config_echo.proto.protocol.to_string(),
        candidate: cfg.proto.protocol.to_string(),
        kopt_mode: cfg.proto.kopt_mode.to_string(),
        no_ch_fallback: cfg.no_ch_fallback.to_string(),
        per_seed,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(alive_before: usize, deaths: usize, packets: u64, residual: f64, dissipated: f64) -> RoundReport {
        RoundReport {
            round: 0,
            alive_before,
            cluster_heads: vec![],
            ch_count: 0,
            direct_count: 0,
            packets_to_bs: packets,
            packets_to_ch: 0,
            dissipated_j: dissipated,
            shortfall_j: 0.0,
            total_residual_j: residual,
            deaths: (0..deaths).collect(),
        }
    }

    #[test]
    fn marker_examples() {
        let m = lifetime_markers(&[4, 4, 3, 2, 2, 1, 0], 4);
        assert_eq!((m.fnd, m.hnd, m.lnd), (Some(2), Some(3), Some(6)));
        assert_eq!(m.stability_period, Some(2));
        assert_eq!(m.lifetime_span, Some(4));

        let m = lifetime_markers(&[5, 5, 5], 5);
        assert_eq!(m, LifetimeMarkers::default());

        let m = lifetime_markers(&[1, 0], 1);
        assert_eq!((m.fnd, m.hnd, m.lnd), (Some(1), Some(1), Some(1)));
    }

    #[test]
    fn hnd_rounds_half_down() {
        let m = lifetime_markers(&[5, 3, 2, 0], 5);
        assert_eq!(m.hnd, Some(2));
    }

    #[test]
    fn residual_examples() {
        let rs = [report(4, 0, 4, 2.0 - 0.3, 0.3)];
        let s = residual_energy_series(&rs, 4);
        assert_eq!(s[0], 0.5);
        assert!((s[1] - (0.5 - 0.3 / 4.0)).abs() < 1e-15);

        let rs = [report(2, 2, 2, 0.0, 1.0)];
        assert_eq!(residual_energy_series(&rs, 2).last(), Some(&0.0));
        assert!(residual_energy_series(&[], 3).is_empty());
    }

    #[test]
    fn throughput_examples() {
        let rs = [report(5, 0, 5, 0.0, 0.0), report(5, 0, 5, 0.0, 0.0), report(5, 1, 4, 0.0, 0.0)];
        assert_eq!(throughput_series(&rs), vec![5, 10, 14]);
        assert!(throughput_series(&[]).is_empty());
    }

    #[test]
    fn alive_series_prepends_initial() {
        let rs = [report(4, 1, 0, 0.0, 0.0), report(3, 3, 0, 0.0, 0.0)];
        assert_eq!(alive_series(&rs), vec![4, 3, 0]);
    }

    #[test]
    fn mean_se() {
        let s = MeanSe::of([1.0, 2.0, 3.0]);
        assert_eq!(s.mean, Some(2.0));
        assert!((s.se.unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(MeanSe::of([]).mean, None);
        assert_eq!(MeanSe::of([4.0]).se, Some(0.0));
    }

    #[test]
    fn residual_area_pads_with_last_value() {
        assert_eq!(residual_area(&[3.0, 2.0], 3), 3.0 + 2.0 + 2.0 + 2.0);
        assert_eq!(residual_area(&[3.0, 2.0, 1.0], 1), 5.0);
    }
}
