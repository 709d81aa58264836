use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qaoa_experiments::{resolve_graph, run, ExperimentKind, ExperimentSpec, SweepTarget};
use qaoa_noise::noise::NoiseSeries;
use qaoa_noise::DeviceModel;

/// Noisy QAOA MaxCut experiments. Each command writes one CSV table.
#[derive(Parser)]
#[command(name = "qaoa-noise", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimized FOM for every graph, noise series and p.
    FomTable(Options),
    /// Optimized FOM with T1 scaled by each multiplier.
    T1Sweep(Options),
    /// Optimized FOM with T2 scaled by each multiplier.
    T2Sweep(Options),
    /// Optimized FOM with the single-qubit gate error scaled by each multiplier.
    Ge1Sweep(Options),
    /// Optimized FOM with the two-qubit gate error scaled by each multiplier.
    Ge2Sweep(Options),
    /// Expectation over the full (gamma, beta) grid at p = 1.
    Landscape(Options),
    /// <Z> after RY(theta) on one qubit, with and without noise.
    Motivation(Options),
    /// Circuit and cost-layer latencies.
    LatencyReport(Options),
}

#[derive(Args)]
struct Options {
    /// Built-in graph name or edge-list file; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    graph: Vec<String>,
    #[arg(long)]
    p_min: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    /// Noise series: PURE, GE, T1, T2, COMBINED.
    #[arg(long, value_delimiter = ',')]
    series: Vec<NoiseSeries>,
    /// Sweep multipliers, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    multipliers: Vec<f64>,
    /// Grid points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML device description; missing keys keep their defaults.
    #[arg(long)]
    device_config: Option<PathBuf>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Differential-evolution generation limit.
    #[arg(long)]
    max_generations: Option<usize>,
    /// Differential-evolution population size.
    #[arg(long)]
    population: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Options) {
        match self {
            Self::FomTable(o) => (ExperimentKind::FomTable, o),
            Self::T1Sweep(o) => (ExperimentKind::Sweep(SweepTarget::T1), o),
            Self::T2Sweep(o) => (ExperimentKind::Sweep(SweepTarget::T2), o),
            Self::Ge1Sweep(o) => (ExperimentKind::Sweep(SweepTarget::Ge1), o),
            Self::Ge2Sweep(o) => (ExperimentKind::Sweep(SweepTarget::Ge2), o),
            Self::Landscape(o) => (ExperimentKind::Landscape, o),
            Self::Motivation(o) => (ExperimentKind::Motivation, o),
            Self::LatencyReport(o) => (ExperimentKind::LatencyReport, o),
        }
    }
}

fn build_spec(kind: ExperimentKind, o: &Options) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::defaults(kind)?;
    if !o.graph.is_empty() {
        spec.graphs = o.graph.iter().map(|g| resolve_graph(g)).collect::<Result<_>>()?;
    }
    if let Some(p) = o.p_min {
        spec.p_min = p;
    }
    if let Some(p) = o.p_max {
        spec.p_max = p;
    }
    if !o.series.is_empty() {
        spec.series = o.series.clone();
    }
    if !o.multipliers.is_empty() {
        spec.multipliers = o.multipliers.clone();
    }
    if let Some(r) = o.resolution {
        spec.resolution = r;
    }
    if let Some(path) = &o.device_config {
        spec.device = DeviceModel::load(path).with_context(|| format!("loading device config {}", path.display()))?;
    }
    if let Some(g) = o.max_generations {
        spec.optimizer.max_generations = g;
    }
    if o.population.is_some() {
        spec.optimizer.population = o.population;
    }
    spec.seed = o.seed;
    spec.validate()?;
    Ok(spec)
}

fn execute(cli: Cli) -> Result<()> {
    let (kind, options) = cli.command.split();
    let spec = build_spec(kind, &options)?;
    let report = run(&spec)?;
    match &options.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut out = BufWriter::new(file);
            report.write_csv(&spec, &mut out)?;
            out.flush()?;
            eprintln!("wrote {} rows to {}", report.len(), path.display());
        }
        None => report.write_csv(&spec, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
