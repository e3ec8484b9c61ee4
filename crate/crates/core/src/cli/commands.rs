//! The `run`, `compare` and `sweep` subcommands.
//!
//! Seeds fan out across the rayon pool; results are always collected back in
//! seed-list order so files do not depend on scheduling.

use super::config::ConfigFile;
use super::output::{
    ensure_dir, fmt_opt, metadata_header, plot_data, round_csv, write_file, PlotSeries,
    GENERATOR,
};
use super::CliError;
use crate::engine::run_simulation;
use crate::metrics::{aggregate, compare_runs, ComparisonTable, ProtocolAggregate, RunSummary};
use crate::model::{Protocol, ValidatedConfig};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Emit {
    RoundCsv,
    SummaryJson,
    PlotDat,
}

impl Emit {
    pub fn all() -> BTreeSet<Emit> {
        BTreeSet::from([Emit::RoundCsv, Emit::SummaryJson, Emit::PlotDat])
    }
}

/// Everything a batch needs: the scenario, the seeds, and where to write.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub file: ConfigFile,
    pub scenario: ValidatedConfig,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
}

impl RunManifest {
    pub fn new(
        file: ConfigFile,
        seeds: Vec<u64>,
        output_dir: PathBuf,
        emit: BTreeSet<Emit>,
    ) -> Result<Self, CliError> {
        if seeds.is_empty() {
            return Err(CliError::Manifest("seed list is empty".into()));
        }
        let distinct: BTreeSet<_> = seeds.iter().collect();
        if distinct.len() != seeds.len() {
            return Err(CliError::Manifest("seeds must be pairwise distinct".into()));
        }
        let scenario = file.validate()?;
        Ok(Self {
            file,
            scenario,
            seeds,
            output_dir,
            emit,
        })
    }

    fn seeds_line(&self) -> String {
        self.seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    fn config_line(file: &ConfigFile) -> String {
        serde_json::to_string(file).expect("config serializes")
    }
}

/// One simulation per seed, in seed-list order.
pub fn run_batch(cfg: &ValidatedConfig, seeds: &[u64]) -> Vec<RunSummary> {
    seeds
        .par_iter()
        .map(|&seed| run_simulation(&cfg.with_seed(seed)))
        .collect()
}

#[derive(Serialize)]
struct RunFile<'a> {
    generator: &'static str,
    config: &'a ConfigFile,
    summary: &'a RunSummary,
}

fn write_run_files(
    dir: &Path,
    file: &ConfigFile,
    runs: &[RunSummary],
    emit: &BTreeSet<Emit>,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for run in runs {
        let file = ConfigFile {
            seed: run.seed,
            protocol: run.config_echo.proto.protocol,
            ..file.clone()
        };
        if emit.contains(&Emit::RoundCsv) {
            let kopt = &run.kopt;
            let meta = metadata_header(&[
                ("seed", run.seed.to_string()),
                ("config", RunManifest::config_line(&file)),
                (
                    "k_opt",
                    format!(
                        "{} ({:?}, mean_d_to_bs={})",
                        kopt.value, kopt.source, kopt.mean_d_to_bs
                    ),
                ),
            ]);
            let path = dir.join(format!("run_{}.csv", run.seed));
            written.push(write_file(&path, &round_csv(run, &meta))?);
        }
        if emit.contains(&Emit::SummaryJson) {
            let body = RunFile {
                generator: GENERATOR,
                config: &file,
                summary: run,
            };
            let json = serde_json::to_string_pretty(&body).expect("summary serializes") + "\n";
            let path = dir.join(format!("run_{}.json", run.seed));
            written.push(write_file(&path, &json)?);
        }
    }
    Ok(written)
}

fn write_plot_files(
    dir: &Path,
    meta: &str,
    groups: &[(Protocol, &[RunSummary])],
) -> Result<Vec<PathBuf>, CliError> {
    PlotSeries::ALL
        .iter()
        .map(|&s| write_file(&dir.join(s.file_name()), &plot_data(s, groups, meta)))
        .collect()
}

/// `sim run`: one simulation per seed with the configured protocol.
pub fn cmd_run(m: &RunManifest) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(&m.output_dir)?;
    let runs = run_batch(&m.scenario, &m.seeds);
    for r in &runs {
        println!(
            "{} seed {}: fnd={} hnd={} lnd={} packets_bs={} k_opt={:.4}",
            r.config_echo.proto.protocol,
            r.seed,
            marker(r.markers.fnd),
            marker(r.markers.hnd),
            marker(r.markers.lnd),
            r.total_packets_bs,
            r.kopt.value,
        );
    }
    let mut written = write_run_files(&m.output_dir, &m.file, &runs, &m.emit)?;
    if m.emit.contains(&Emit::PlotDat) {
        let meta = metadata_header(&[
            ("seeds", m.seeds_line()),
            ("config", RunManifest::config_line(&m.file)),
        ]);
        written.extend(write_plot_files(
            &m.output_dir,
            &meta,
            &[(m.scenario.proto.protocol, &runs)],
        )?);
    }
    Ok(written)
}

fn marker(m: Option<u64>) -> String {
    m.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

/// Both protocols over the same seed list.
#[derive(Debug, Clone)]
pub struct ComparisonRuns {
    pub leach: Vec<RunSummary>,
    pub rleach: Vec<RunSummary>,
    pub table: ComparisonTable,
    pub aggregates: [ProtocolAggregate; 2],
}

pub fn compare_batch(cfg: &ValidatedConfig, seeds: &[u64]) -> Result<ComparisonRuns, CliError> {
    let leach = run_batch(&cfg.with_protocol(Protocol::Leach), seeds);
    let rleach = run_batch(&cfg.with_protocol(Protocol::Rleach), seeds);
    let table = compare_runs(&leach, &rleach)?;
    let aggregates = [aggregate(&leach), aggregate(&rleach)];
    Ok(ComparisonRuns {
        leach,
        rleach,
        table,
        aggregates,
    })
}

#[derive(Serialize)]
struct CompareFile<'a> {
    generator: &'static str,
    config: &'a ConfigFile,
    seeds: &'a [u64],
    kopt_mode: String,
    no_ch_fallback: String,
    k_opt_per_seed: Vec<f64>,
    aggregates: &'a [ProtocolAggregate; 2],
    comparison: &'a ComparisonTable,
}

fn compare_csv(c: &ComparisonRuns, meta: &str) -> String {
    let mut out = String::from(meta);
    out.push_str("seed,leach_fnd,rleach_fnd,fnd_ratio,leach_hnd,rleach_hnd,hnd_ratio,leach_lnd,rleach_lnd,lnd_ratio,leach_packets_bs,rleach_packets_bs,packets_bs_ratio,residual_auc_ratio\n");
    for ((a, b), r) in c.leach.iter().zip(&c.rleach).zip(&c.table.per_seed) {
        let m = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            m(a.markers.fnd),
            m(b.markers.fnd),
            fmt_opt(r.fnd),
            m(a.markers.hnd),
            m(b.markers.hnd),
            fmt_opt(r.hnd),
            m(a.markers.lnd),
            m(b.markers.lnd),
            fmt_opt(r.lnd),
            a.total_packets_bs,
            b.total_packets_bs,
            fmt_opt(r.packets_bs),
            fmt_opt(r.residual_auc),
        );
    }
    let mean = &c.table.mean;
    for (label, pick) in [
        ("mean", (|s: &crate::metrics::MeanSe| s.mean) as fn(&crate::metrics::MeanSe) -> Option<f64>),
        ("se", |s| s.se),
    ] {
        let _ = writeln!(
            out,
            "{label},,,{},,,{},,,{},,,{},{}",
            fmt_opt(pick(&mean.fnd)),
            fmt_opt(pick(&mean.hnd)),
            fmt_opt(pick(&mean.lnd)),
            fmt_opt(pick(&mean.packets_bs)),
            fmt_opt(pick(&mean.residual_auc)),
        );
    }
    out
}

/// `sim compare`: paired LEACH vs residual-energy LEACH over one seed list.
pub fn cmd_compare(m: &RunManifest) -> Result<(ComparisonRuns, Vec<PathBuf>), CliError> {
    ensure_dir(&m.output_dir)?;
    let c = compare_batch(&m.scenario, &m.seeds)?;
    let mut written = Vec::new();

    let meta = metadata_header(&[
        ("seeds", m.seeds_line()),
        ("config", RunManifest::config_line(&m.file)),
        ("kopt_mode", m.scenario.proto.kopt_mode.to_string()),
        ("no_ch_fallback", m.scenario.no_ch_fallback.to_string()),
    ]);

    let body = CompareFile {
        generator: GENERATOR,
        config: &m.file,
        seeds: &m.seeds,
        kopt_mode: m.scenario.proto.kopt_mode.to_string(),
        no_ch_fallback: m.scenario.no_ch_fallback.to_string(),
        k_opt_per_seed: c.rleach.iter().map(|r| r.kopt.value).collect(),
        aggregates: &c.aggregates,
        comparison: &c.table,
    };
    let json = serde_json::to_string_pretty(&body).expect("comparison serializes") + "\n";
    written.push(write_file(&m.output_dir.join("compare.json"), &json)?);
    written.push(write_file(&m.output_dir.join("compare.csv"), &compare_csv(&c, &meta))?);

    if m.emit.contains(&Emit::PlotDat) {
        written.extend(write_plot_files(
            &m.output_dir,
            &meta,
            &[(Protocol::Leach, &c.leach), (Protocol::Rleach, &c.rleach)],
        )?);
    }
    for (protocol, runs) in [(Protocol::Leach, &c.leach), (Protocol::Rleach, &c.rleach)] {
        if m.emit.contains(&Emit::RoundCsv) || m.emit.contains(&Emit::SummaryJson) {
            let dir = m.output_dir.join(protocol.as_str());
            ensure_dir(&dir)?;
            written.extend(write_run_files(&dir, &m.file, runs, &m.emit)?);
        }
    }

    let mean = &c.table.mean;
    println!(
        "{} vs leach over {} seeds (kopt_mode={}): fnd x{} lnd x{} packets_bs x{} residual_auc x{}",
        c.table.candidate,
        m.seeds.len(),
        c.table.kopt_mode,
        fmt_ratio(mean.fnd.mean),
        fmt_ratio(mean.lnd.mean),
        fmt_ratio(mean.packets_bs.mean),
        fmt_ratio(mean.residual_auc.mean),
    );
    Ok((c, written))
}

fn fmt_ratio(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into())
}

/// The scenario parameter a sweep varies.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    E0(Vec<f64>),
    PacketBits(Vec<u64>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::E0(_) => "e0_j",
            SweepAxis::PacketBits(_) => "packet_bits",
        }
    }

    /// Axis points as (value, config with that value applied).
    fn points(&self, base: &ConfigFile) -> Vec<(f64, ConfigFile)> {
        match self {
            SweepAxis::E0(v) => v
                .iter()
                .map(|&e0| (e0, ConfigFile { e0_j: e0, ..base.clone() }))
                .collect(),
            SweepAxis::PacketBits(v) => v
                .iter()
                .map(|&k| (k as f64, ConfigFile { packet_bits: k, ..base.clone() }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub runs: ComparisonRuns,
}

pub const SWEEP_CSV_HEADER: &str =
    "axis_value,protocol,mean_fnd,mean_hnd,mean_lnd,mean_packets_bs,se_fnd,se_hnd,se_lnd";

/// `sim sweep`: a full comparison at each axis point.
pub fn cmd_sweep(m: &RunManifest, axis: &SweepAxis) -> Result<(Vec<SweepPoint>, Vec<PathBuf>), CliError> {
    let points = axis.points(&m.file);
    if points.is_empty() {
        return Err(CliError::Manifest("sweep axis has no values".into()));
    }
    ensure_dir(&m.output_dir)?;

    let mut results = Vec::with_capacity(points.len());
    for (value, file) in &points {
        let cfg = file.validate()?;
        results.push(SweepPoint {
            axis_value: *value,
            runs: compare_batch(&cfg, &m.seeds)?,
        });
    }
    results.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));

    let meta = metadata_header(&[
        ("axis", axis.name().to_string()),
        ("seeds", m.seeds_line()),
        ("config", RunManifest::config_line(&m.file)),
        ("kopt_mode", m.scenario.proto.kopt_mode.to_string()),
        ("no_ch_fallback", m.scenario.no_ch_fallback.to_string()),
    ]);

    let mut summary = meta.clone();
    summary.push_str(SWEEP_CSV_HEADER);
    summary.push('\n');
    let mut per_seed = meta;
    per_seed.push_str("axis_value,protocol,seed,fnd,hnd,lnd,packets_bs\n");

    for point in &results {
        for agg in &point.runs.aggregates {
            let _ = writeln!(
                summary,
                "{},{},{},{},{},{},{},{},{}",
                point.axis_value,
                agg.protocol,
                fmt_opt(agg.fnd.mean),
                fmt_opt(agg.hnd.mean),
                fmt_opt(agg.lnd.mean),
                fmt_opt(agg.packets_bs.mean),
                fmt_opt(agg.fnd.se),
                fmt_opt(agg.hnd.se),
                fmt_opt(agg.lnd.se),
            );
        }
        for runs in [&point.runs.leach, &point.runs.rleach] {
            let mut sorted: Vec<&RunSummary> = runs.iter().collect();
            sorted.sort_by_key(|r| r.seed);
            for r in sorted {
                let mk = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(
                    per_seed,
                    "{},{},{},{},{},{},{}",
                    point.axis_value,
                    r.config_echo.proto.protocol,
                    r.seed,
                    mk(r.markers.fnd),
                    mk(r.markers.hnd),
                    mk(r.markers.lnd),
                    r.total_packets_bs,
                );
            }
        }
        println!(
            "{}={}: leach fnd={} lnd={} | rleach fnd={} lnd={}",
            axis.name(),
            point.axis_value,
            fmt_mean(point.runs.aggregates[0].fnd.mean),
            fmt_mean(point.runs.aggregates[0].lnd.mean),
            fmt_mean(point.runs.aggregates[1].fnd.mean),
            fmt_mean(point.runs.aggregates[1].lnd.mean),
        );
    }

    let written = vec![
        write_file(&m.output_dir.join("sweep.csv"), &summary)?,
        write_file(&m.output_dir.join("sweep_runs.csv"), &per_seed)?,
    ];
    Ok((results, written))
}

fn fmt_mean(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.1}")).unwrap_or_else(|| "-".into())
}
