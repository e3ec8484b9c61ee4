//! Command-line front end: `sim run|compare|sweep`.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 I/O error.

pub mod commands;
pub mod config;
pub mod output;

use crate::metrics::CompareError;
use crate::model::{KoptMode, NoChFallback, Protocol};
use clap::{Args, Parser, Subcommand};
use commands::{cmd_compare, cmd_run, cmd_sweep, Emit, RunManifest, SweepAxis};
use config::{read_config_file, ConfigError, ConfigFile};
use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

/// `N` for seeds `1..=N`, or a comma-separated list of explicit seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSpec(pub Vec<u64>);

impl FromStr for SeedSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad seed `{t}`: {e}"))
        };
        if s.contains(',') {
            let seeds = s
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(parse)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SeedSpec(seeds))
        } else {
            let n = parse(s)?;
            if n == 0 {
                return Err("seed count must be at least 1".into());
            }
            Ok(SeedSpec((1..=n).collect()))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sim", version, about = "LEACH / residual-energy LEACH network simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the configured protocol once per seed.
    Run(CommonArgs),
    /// Run both protocols on the same seeds and tabulate ratios.
    Compare(CommonArgs),
    /// Repeat the comparison across initial energies or packet sizes.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON scenario file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed count `N` (seeds 1..=N) or a comma-separated list; defaults to the config seed.
    #[arg(long)]
    pub seeds: Option<SeedSpec>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// `leach` or `rleach`; overrides the config file (ignored by compare and sweep)
    #[arg(long)]
    pub protocol: Option<Protocol>,
    /// `literal_clamp`, `normalized` or `off`; overrides the config file
    #[arg(long)]
    pub kopt_mode: Option<KoptMode>,
    /// Zero-cluster-head rounds: `direct_to_bs` or `idle`
    #[arg(long)]
    pub fallback: Option<NoChFallback>,
    /// Outputs to write (round-csv, summary-json, plot-dat); all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub emit: Vec<Emit>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial energies in joules, e.g. `0.25,0.5,1`.
    #[arg(long, value_delimiter = ',', conflicts_with = "packet_bits", required_unless_present = "packet_bits")]
    pub e0: Vec<f64>,
    /// Packet sizes in bits.
    #[arg(long, value_delimiter = ',')]
    pub packet_bits: Vec<u64>,
}

impl CommonArgs {
    pub fn manifest(&self) -> Result<RunManifest, CliError> {
        let mut file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        if let Some(p) = self.protocol {
            file.protocol = p;
        }
        if let Some(m) = self.kopt_mode {
            file.kopt_mode = m;
        }
        if let Some(f) = self.fallback {
            file.no_ch_fallback = f;
        }
        let seeds = match &self.seeds {
            Some(SeedSpec(s)) => s.clone(),
            None => vec![file.seed],
        };
        let emit = if self.emit.is_empty() {
            Emit::all()
        } else {
            self.emit.iter().copied().collect()
        };
        RunManifest::new(file, seeds, self.out.clone(), emit)
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => cmd_run(&args.manifest()?).map(drop),
        Command::Compare(args) => cmd_compare(&args.manifest()?).map(drop),
        Command::Sweep(args) => {
            let axis = if args.e0.is_empty() {
                SweepAxis::PacketBits(args.packet_bits.clone())
            } else {
                SweepAxis::E0(args.e0.clone())
            };
            cmd_sweep(&args.common.manifest()?, &axis).map(drop)
        }
    }
}

/// Parses arguments, runs the subcommand, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
