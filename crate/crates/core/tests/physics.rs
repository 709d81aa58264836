use std::f64::consts::PI;

use qaoa_noise::noise::NoiseSeries;
use qaoa_noise::optimize::{grid_scan, linspace};
use qaoa_noise::qaoa::{
    cost_diagonal, cost_layer_state_fidelity, estimate_expectation_from_samples, max_cut_brute_force, sample_counts,
    MaxCutProblem, BUILTIN_GRAPHS,
};
use qaoa_noise::{Bounds, DeviceModel, Graph, NoiseToggles, QaoaParams};

#[test]
fn brute_force_values_of_builtins() {
    let expected = [("2n-edge", 1.0), ("4n-yutsis", 4.0), ("6n-yutsis", 9.0), ("6n-prism", 7.0), ("4n-irregular", 3.0)];
    for (name, value) in expected {
        let g = Graph::builtin(name).unwrap();
        assert_eq!(max_cut_brute_force(&g).unwrap().value, value, "{name}");
        // Independent enumeration over every subset.
        let n = g.n_nodes();
        let best = (0usize..1 << n)
            .map(|z| g.edges().iter().filter(|e| (z >> e.u & 1) != (z >> e.v & 1)).map(|e| e.weight).sum::<f64>())
            .fold(f64::MIN, f64::max);
        assert_eq!(best, value, "{name}");
    }
}

#[test]
fn zero_gamma_row_gives_mean_cost() {
    let device = DeviceModel::default();
    for name in BUILTIN_GRAPHS {
        let problem = MaxCutProblem::new(Graph::builtin(name).unwrap()).unwrap();
        let mean = problem.cost().mean();
        for beta in linspace(0.0, PI, 7) {
            let params = QaoaParams::new(vec![0.0], vec![beta]).unwrap();
            let e = problem.expectation(&params, &device, NoiseToggles::NONE).unwrap();
            assert!((e - mean).abs() < 1e-12, "{name} beta={beta}");
        }
    }
}

#[test]
fn layer_fidelity_falls_as_elapsed_time_grows() {
    let g = Graph::builtin("4n-yutsis").unwrap();
    let device = DeviceModel::default();
    let relax = NoiseSeries::T1.toggles();
    let t1_ns = device.t1_ns();
    let layer_ns = qaoa_noise::qaoa::cost_hamiltonian_latency(&g, &device) as f64;
    let mut last = f64::INFINITY;
    for ratio in linspace(0.0, 2.0, 20) {
        // Scale time so one layer lasts `ratio · T1`.
        let f = cost_layer_state_fidelity(&g, 0.7, &device, relax, ratio * t1_ns / layer_ns).unwrap();
        assert!(f <= last + 1e-12, "ratio {ratio}: {f} > {last}");
        last = f;
    }
    assert!(last < 0.9);
}

#[test]
fn sampled_counts_agree_with_populations() {
    let problem = MaxCutProblem::new(Graph::builtin("4n-irregular").unwrap()).unwrap();
    let params = QaoaParams::new(vec![1.1], vec![0.4]).unwrap();
    let rho = problem.final_state(&params, &DeviceModel::default(), NoiseToggles::ALL).unwrap();
    let shots = 1_000_000u64;
    let counts = sample_counts(&rho, shots, 5).unwrap();
    assert_eq!(counts.values().sum::<u64>(), shots);
    for (z, p) in rho.populations().into_iter().enumerate() {
        let bits = qaoa_noise::Bitstring::from_index(z, 4);
        let k = counts.get(&bits).copied().unwrap_or(0) as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((k - shots as f64 * p).abs() <= 3.0 * sigma.max(1.0), "{bits}: {k} vs {}", shots as f64 * p);
    }
    let exact = rho.expectation_diag(&cost_diagonal(problem.graph()).unwrap().values).unwrap();
    let estimate = estimate_expectation_from_samples(&counts, problem.graph()).unwrap();
    let spread = problem.cost().values.iter().map(|c| (c - exact).powi(2)).fold(0.0, f64::max).sqrt();
    assert!((estimate - exact).abs() <= 3.0 * spread / (shots as f64).sqrt());
}

#[test]
fn k4_noiseless_landscape_peak() {
    let problem = MaxCutProblem::new(Graph::builtin("4n-yutsis").unwrap()).unwrap();
    let device = DeviceModel::default();
    let land = grid_scan(
        |x: &[f64]| problem.expectation(&QaoaParams::from_vector(x).unwrap(), &device, NoiseToggles::NONE).unwrap(),
        &Bounds::qaoa(1).unwrap(),
        50,
    )
    .unwrap();
    let peak = land.values[land.argmax()];
    assert!((peak - 3.7).abs() <= 0.05, "{peak}");
}

#[test]
fn noise_only_lowers_the_landscape_peak() {
    let problem = MaxCutProblem::new(Graph::builtin("4n-yutsis").unwrap()).unwrap();
    let device = DeviceModel::default();
    let peak = |series: NoiseSeries| {
        let land = grid_scan(
            |x: &[f64]| problem.expectation(&QaoaParams::from_vector(x).unwrap(), &device, series.toggles()).unwrap(),
            &Bounds::qaoa(1).unwrap(),
            25,
        )
        .unwrap();
        land.values[land.argmax()]
    };
    let pure = peak(NoiseSeries::Pure);
    for series in [NoiseSeries::GateError, NoiseSeries::T1, NoiseSeries::T2, NoiseSeries::Combined] {
        assert!(peak(series) < pure, "{series}");
    }
}
