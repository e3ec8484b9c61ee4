//! CSV, JSON and gnuplot-style data emission.
//!
//! Every file carries the generator version, the scenario as loaded, and the
//! seeds behind it: JSON embeds them, CSV and `.dat` files start with `#`
//! comment lines.

use super::CliError;
use crate::metrics::{throughput_series, RunSummary};
use crate::model::Protocol;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const GENERATOR: &str = concat!("leach-sim ", env!("CARGO_PKG_VERSION"));

/// Fixed-point decimal with 15 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.15}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(path.to_owned())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_owned(),
        source,
    })
}

/// `#` comment block shared by every text output.
pub fn metadata_header(lines: &[(&str, String)]) -> String {
    let mut out = format!("# generator: {GENERATOR}\n");
    for (key, value) in lines {
        let _ = writeln!(out, "# {key}: {value}");
    }
    out
}

pub const ROUND_CSV_HEADER: &str = "round,alive,ch_count,direct_count,packets_to_bs_cum,packets_to_ch_cum,dissipated_j,total_residual_j,avg_residual_j";

/// One row for the untouched network, then one per completed round.
pub fn round_csv(summary: &RunSummary, meta: &str) -> String {
    let n = summary.config_echo.n_nodes;
    let residual = summary.residual_series();
    let mut out = String::from(meta);
    out.push_str(ROUND_CSV_HEADER);
    out.push('\n');

    let initial_total = residual.first().map(|r| r * n as f64).unwrap_or(summary.config_echo.e0_joules * n as f64);
    let _ = writeln!(
        out,
        "0,{n},0,0,0,0,{},{},{}",
        fmt_sig(0.0),
        fmt_sig(initial_total),
        fmt_sig(initial_total / n as f64)
    );

    let (mut to_bs, mut to_ch) = (0u64, 0u64);
    for (i, r) in summary.rounds.iter().enumerate() {
        to_bs += r.packets_to_bs;
        to_ch += r.packets_to_ch;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            i + 1,
            r.alive_after(),
            r.ch_count,
            r.direct_count,
            to_bs,
            to_ch,
            fmt_sig(r.dissipated_j),
            fmt_sig(r.total_residual_j),
            fmt_sig(residual[i + 1]),
        );
    }
    out
}

fn padded_mean(series: &[Vec<f64>]) -> Vec<f64> {
    let len = series.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let sum: f64 = series
                .iter()
                .map(|s| s.get(i).or(s.last()).copied().unwrap_or(0.0))
                .sum();
            sum / series.len() as f64
        })
        .collect()
}

/// Which per-round quantity a plot-data file tracks.
#[derive(Debug, Clone, Copy)]
pub enum PlotSeries {
    Alive,
    PacketsToBs,
    AvgResidual,
}

impl PlotSeries {
    pub const ALL: [PlotSeries; 3] = [PlotSeries::Alive, PlotSeries::PacketsToBs, PlotSeries::AvgResidual];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotSeries::Alive => "lifetime.dat",
            PlotSeries::PacketsToBs => "packets.dat",
            PlotSeries::AvgResidual => "energy.dat",
        }
    }

    fn label(self) -> &'static str {
        match self {
            PlotSeries::Alive => "mean alive nodes",
            PlotSeries::PacketsToBs => "mean cumulative packets received at base station",
            PlotSeries::AvgResidual => "mean average residual energy per node (J)",
        }
    }

    fn extract(self, run: &RunSummary) -> Vec<f64> {
        match self {
            PlotSeries::Alive => run.alive_series().into_iter().map(|a| a as f64).collect(),
            PlotSeries::PacketsToBs => std::iter::once(0.0)
                .chain(throughput_series(&run.rounds).into_iter().map(|p| p as f64))
                .collect(),
            PlotSeries::AvgResidual => run.residual_series(),
        }
    }
}

/// Two-column `round value` blocks, one per protocol, separated by two blank
/// lines so gnuplot can address them with `index`.
pub fn plot_data(series: PlotSeries, groups: &[(Protocol, &[RunSummary])], meta: &str) -> String {
    let mut out = String::from(meta);
    let _ = writeln!(out, "# columns: round, {}", series.label());
    for (i, (protocol, runs)) in groups.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# protocol: {protocol} ({} seeds)", runs.len());
        let per_run: Vec<Vec<f64>> = runs.iter().map(|r| series.extract(r)).collect();
        for (round, v) in padded_mean(&per_run).iter().enumerate() {
            let _ = writeln!(out, "{round} {}", fmt_sig(*v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(0.5), "0.500000000000000");
        assert_eq!(fmt_sig(2.2e-4), "0.000220000000000000");
        assert_eq!(fmt_sig(1234.5), "1234.50000000000");
        assert_eq!(fmt_sig(0.0), "0.000000000000000");
        assert!(!fmt_sig(1e-7).contains('e'));
    }

    #[test]
    fn padded_mean_holds_last() {
        let m = padded_mean(&[vec![4.0, 2.0], vec![4.0, 3.0, 1.0]]);
        assert_eq!(m, vec![4.0, 2.5, 1.5]);
    }
}
