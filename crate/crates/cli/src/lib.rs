//! Experiment harness for noisy QAOA MaxCut studies.
//!
//! An [`ExperimentSpec`] names an experiment kind, the graphs, the QAOA
//! depths, the noise series and the device; [`run`] executes it and returns
//! a [`Report`] that serializes to CSV. Optimized cells are independent and
//! run in parallel, each with a seed derived from the base seed and the
//! cell's position, so output never depends on scheduling.

pub mod output;
pub mod runners;
pub mod spec;

pub use output::Report;
pub use runners::{
    cell_seed, optimize_cell, run_fom_table, run_landscape, run_latency_report, run_motivation, run_multiplier_sweep,
    LandscapeRow, LatencyRow, MotivationRow, ResultRow,
};
pub use spec::{resolve_graph, ExperimentKind, ExperimentSpec, NamedGraph, SweepTarget};

pub fn run(spec: &ExperimentSpec) -> anyhow::Result<Report> {
    Ok(match spec.kind {
        ExperimentKind::FomTable => Report::Results(run_fom_table(spec)?),
        ExperimentKind::Sweep(_) => Report::Results(run_multiplier_sweep(spec)?),
        ExperimentKind::Landscape => Report::Landscape(run_landscape(spec)?),
        ExperimentKind::Motivation => Report::Motivation(run_motivation(spec)?),
        ExperimentKind::LatencyReport => Report::Latency(run_latency_report(spec)?),
    })
}
