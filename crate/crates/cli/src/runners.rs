use anyhow::{bail, Result};
use qaoa_noise::gates::{GateKind, GateOp};
use qaoa_noise::noise::{simulate_circuit, NoiseSeries};
use qaoa_noise::optimize::{differential_evolution, grid_scan, linspace};
use qaoa_noise::qaoa::{
    build_qaoa_circuit, circuit_latency, cost_fidelity_estimate, cost_hamiltonian_latency, MaxCutProblem,
};
use qaoa_noise::{Bounds, DeConfig, DensityMatrix, DeviceModel, QaoaParams};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::spec::{ExperimentKind, ExperimentSpec, NamedGraph, SweepTarget};

/// One optimized (graph, p, series, multiplier) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub graph: String,
    pub p: usize,
    pub series: String,
    pub multiplier: f64,
    pub best_gammas: String,
    pub best_betas: String,
    pub expectation: f64,
    pub c_max: f64,
    pub fom: f64,
    pub latency_ns: u64,
    pub chet_ns: u64,
    pub chet_over_t1: f64,
    pub chet_over_t2: f64,
    pub seed: u64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub gamma: f64,
    pub beta: f64,
    pub series: String,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotivationRow {
    pub theta: f64,
    pub series: String,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyRow {
    pub graph: String,
    pub p: usize,
    pub n_edges: usize,
    pub latency_ns: u64,
    pub chet_ns: u64,
    pub chet_over_t1: f64,
    pub chet_over_t2: f64,
    /// `(1 - err_2q)^(2|E|)` for a single cost layer.
    pub cost_fidelity_estimate: f64,
}

/// Seed of cell `index` under `base`. Each cell reads its own ChaCha stream,
/// so seeds do not depend on the order cells are run in.
pub fn cell_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

fn join_angles(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// Runs differential evolution on the FOM of one cell and re-evaluates the
/// winner for reporting.
#[allow(clippy::too_many_arguments)]
pub fn optimize_cell(
    experiment: &str,
    named: &NamedGraph,
    p: usize,
    series: NoiseSeries,
    multiplier: f64,
    device: &DeviceModel,
    optimizer: &DeConfig,
    seed: u64,
) -> Result<ResultRow> {
    let problem = MaxCutProblem::new(named.graph.clone())?;
    let toggles = series.toggles();
    let objective = |x: &[f64]| match QaoaParams::from_vector(x) {
        Ok(params) => problem
            .evaluate(&params, device, toggles)
            .map_or(f64::INFINITY, |r| r.fom),
        Err(_) => f64::INFINITY,
    };
    let config = DeConfig {
        seed,
        ..optimizer.clone()
    };
    let result = differential_evolution(objective, &Bounds::qaoa(p)?, &config)?;
    let params = QaoaParams::from_vector(&result.best_params)?;
    let record = problem.evaluate(&params, device, toggles)?;
    let chet = cost_hamiltonian_latency(&named.graph, device);
    Ok(ResultRow {
        experiment: experiment.to_string(),
        graph: named.label.clone(),
        p,
        series: series.to_string(),
        multiplier,
        best_gammas: join_angles(params.gammas()),
        best_betas: join_angles(params.betas()),
        expectation: record.expectation,
        c_max: problem.c_max(),
        fom: record.fom,
        latency_ns: record.latency_ns,
        chet_ns: chet,
        chet_over_t1: chet as f64 / device.t1_ns(),
        chet_over_t2: chet as f64 / device.t2_ns(),
        seed,
        evaluations: result.evaluations,
    })
}

struct Cell<'a> {
    graph: &'a NamedGraph,
    p: usize,
    series: NoiseSeries,
    multiplier: f64,
}

fn run_cells(spec: &ExperimentSpec, cells: Vec<Cell<'_>>, sweep: Option<SweepTarget>) -> Result<Vec<ResultRow>> {
    let id = spec.kind.id();
    cells
        .into_par_iter()
        .enumerate()
        .map(|(i, c)| {
            let device = match sweep {
                Some(target) => target.apply(&spec.device, c.multiplier),
                None => spec.device.clone(),
            };
            let seed = cell_seed(spec.seed, i as u64);
            optimize_cell(id, c.graph, c.p, c.series, c.multiplier, &device, &spec.optimizer, seed)
        })
        .collect()
}

/// Every graph × series × p at the spec's device, one row per cell.
pub fn run_fom_table(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut cells = Vec::new();
    for graph in &spec.graphs {
        for &series in &spec.series {
            for p in spec.p_values() {
                cells.push(Cell {
                    graph,
                    p,
                    series,
                    multiplier: 1.0,
                });
            }
        }
    }
    run_cells(spec, cells, None)
}

/// Every graph × multiplier × series × p with one device parameter scaled
/// by the multiplier.
pub fn run_multiplier_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let ExperimentKind::Sweep(target) = spec.kind else {
        bail!("{} is not a multiplier sweep", spec.kind);
    };
    let mut cells = Vec::new();
    for graph in &spec.graphs {
        for &multiplier in &spec.multipliers {
            for &series in &spec.series {
                for p in spec.p_values() {
                    cells.push(Cell {
                        graph,
                        p,
                        series,
                        multiplier,
                    });
                }
            }
        }
    }
    run_cells(spec, cells, Some(target))
}

/// `E_1(γ, β)` on a `resolution × resolution` grid for the first graph of
/// the spec, once per series. γ varies slowest.
pub fn run_landscape(spec: &ExperimentSpec) -> Result<Vec<LandscapeRow>> {
    spec.validate()?;
    if spec.graphs.len() != 1 {
        bail!("a landscape takes exactly one graph");
    }
    let problem = MaxCutProblem::new(spec.graphs[0].graph.clone())?;
    let bounds = Bounds::qaoa(1)?;
    let mut rows = Vec::new();
    for &series in &spec.series {
        let toggles = series.toggles();
        let landscape = grid_scan(
            |x: &[f64]| {
                QaoaParams::from_vector(x)
                    .and_then(|params| problem.expectation(&params, &spec.device, toggles))
                    .unwrap_or(f64::NAN)
            },
            &bounds,
            spec.resolution,
        )?;
        for (i, &expectation) in landscape.values.iter().enumerate() {
            let point = landscape.point(i);
            rows.push(LandscapeRow {
                gamma: point[0],
                beta: point[1],
                series: series.to_string(),
                expectation,
            });
        }
    }
    Ok(rows)
}

/// `⟨σ_z⟩` after `RY(θ)|0⟩` for θ on an even grid over `[0, 2π]`.
pub fn run_motivation(spec: &ExperimentSpec) -> Result<Vec<MotivationRow>> {
    spec.validate()?;
    let sigma_z = [1.0, -1.0];
    let initial = DensityMatrix::zero_state(1)?;
    let mut rows = Vec::new();
    for &series in &spec.series {
        for theta in linspace(0.0, std::f64::consts::TAU, spec.resolution) {
            let gate = GateOp::single(GateKind::Ry(theta), 0);
            let rho = simulate_circuit(&[gate], &spec.device, series.toggles(), &initial)?;
            rows.push(MotivationRow {
                theta,
                series: series.to_string(),
                expectation: rho.expectation_diag(&sigma_z)?,
            });
        }
    }
    Ok(rows)
}

/// Circuit and cost-layer timings per graph × p.
pub fn run_latency_report(spec: &ExperimentSpec) -> Result<Vec<LatencyRow>> {
    spec.validate()?;
    let device = &spec.device;
    let mut rows = Vec::new();
    for named in &spec.graphs {
        let chet = cost_hamiltonian_latency(&named.graph, device);
        let fidelity = cost_fidelity_estimate(named.graph.n_edges(), device.gate_error_2q())?;
        for p in spec.p_values() {
            // Durations do not depend on the angles.
            let params = QaoaParams::new(vec![0.0; p], vec![0.0; p])?;
            rows.push(LatencyRow {
                graph: named.label.clone(),
                p,
                n_edges: named.graph.n_edges(),
                latency_ns: circuit_latency(&build_qaoa_circuit(&named.graph, &params), device),
                chet_ns: chet,
                chet_over_t1: chet as f64 / device.t1_ns(),
                chet_over_t2: chet as f64 / device.t2_ns(),
                cost_fidelity_estimate: fidelity,
            });
        }
    }
    Ok(rows)
}
