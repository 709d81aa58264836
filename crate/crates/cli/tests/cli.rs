use std::fs;
use std::process::Command;

use qaoa_experiments::{run, ExperimentKind, ExperimentSpec, Report, SweepTarget};
use qaoa_noise::noise::NoiseSeries;
use qaoa_noise::qaoa::cost_diagonal;

const BIN: &str = env!("CARGO_BIN_EXE_qaoa-noise");

fn small_fom_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::defaults(ExperimentKind::FomTable).unwrap();
    spec.graphs = vec![qaoa_experiments::resolve_graph("4n-irregular").unwrap()];
    spec.p_max = 2;
    spec.series = vec![NoiseSeries::Pure, NoiseSeries::Combined];
    spec.optimizer.max_generations = 30;
    spec.seed = 11;
    spec
}

#[test]
fn reruns_are_byte_identical() {
    let spec = small_fom_spec();
    let a = run(&spec).unwrap().to_csv_string(&spec).unwrap();
    let b = run(&spec).unwrap().to_csv_string(&spec).unwrap();
    assert_eq!(a, b);
    let mut other = spec.clone();
    other.seed = 12;
    assert_ne!(a, run(&other).unwrap().to_csv_string(&other).unwrap());
}

#[test]
fn result_rows_are_consistent() {
    let spec = small_fom_spec();
    let Report::Results(rows) = run(&spec).unwrap() else { panic!("expected result rows") };
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((r.fom - (1.0 - r.expectation / r.c_max)).abs() <= 1e-9);
        assert!(r.expectation >= 0.0 && r.expectation <= r.c_max);
        assert_eq!(r.best_gammas.split(';').count(), r.p);
        assert_eq!(r.c_max, 3.0);
    }
    // Noise never helps at matched depth.
    for p in 1..=2 {
        let fom = |s: &str| rows.iter().find(|r| r.p == p && r.series == s).unwrap().fom;
        assert!(fom("COMBINED") >= fom("PURE"));
    }
}

#[test]
fn csv_header_and_metadata() {
    let spec = small_fom_spec();
    let text = run(&spec).unwrap().to_csv_string(&spec).unwrap();
    let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "experiment,graph,p,series,multiplier,best_gammas,best_betas,expectation,c_max,fom,latency_ns,chet_ns,\
         chet_over_t1,chet_over_t2,seed,evaluations"
    );
    assert!(text.contains("# optimizer p=2: differential-evolution rand/1/bin population=60"));
    assert!(text.contains("# base_seed: 11"));
}

#[test]
fn sweep_scales_the_chosen_parameter() {
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Sweep(SweepTarget::T1)).unwrap();
    spec.graphs = vec![qaoa_experiments::resolve_graph("2n-edge").unwrap()];
    spec.p_max = 1;
    spec.multipliers = vec![0.5, 2.0];
    spec.optimizer.max_generations = 20;
    let Report::Results(rows) = run(&spec).unwrap() else { panic!() };
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.series == "T1" && r.experiment == "t1-sweep"));
    assert!((rows[0].chet_over_t1 / rows[1].chet_over_t1 - 4.0).abs() < 1e-12);
    assert_eq!(rows[0].chet_over_t2, rows[1].chet_over_t2);
}

#[test]
fn zero_gamma_landscape_row_is_the_mean_cost() {
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Landscape).unwrap();
    spec.resolution = 9;
    let Report::Landscape(rows) = run(&spec).unwrap() else { panic!() };
    assert_eq!(rows.len(), 2 * 81);
    let mean = cost_diagonal(&spec.graphs[0].graph).unwrap().mean();
    let zero_row: Vec<_> = rows.iter().filter(|r| r.gamma == 0.0).collect();
    assert_eq!(zero_row.len(), 2 * 9);
    for r in zero_row.iter().filter(|r| r.series == "PURE") {
        assert!((r.expectation - mean).abs() < 1e-12);
    }
}

#[test]
fn motivation_extremes() {
    let spec = ExperimentSpec::defaults(ExperimentKind::Motivation).unwrap();
    let Report::Motivation(rows) = run(&spec).unwrap() else { panic!() };
    let pure: Vec<_> = rows.iter().filter(|r| r.series == "PURE").collect();
    assert_eq!(pure.len(), 100);
    assert_eq!(pure[0].theta, 0.0);
    assert!((pure[0].expectation - 1.0).abs() < 1e-12);
    let noisy_min = rows
        .iter()
        .filter(|r| r.series == "COMBINED")
        .map(|r| r.expectation)
        .fold(f64::INFINITY, f64::min);
    assert!(noisy_min > -1.0);
}

#[test]
fn latency_report_values() {
    let mut spec = ExperimentSpec::defaults(ExperimentKind::LatencyReport).unwrap();
    spec.graphs = vec![qaoa_experiments::resolve_graph("4n-yutsis").unwrap()];
    spec.p_max = 2;
    let Report::Latency(rows) = run(&spec).unwrap() else { panic!() };
    assert_eq!(rows[0].latency_ns, 9360);
    assert_eq!(rows[1].latency_ns, 18480);
    assert_eq!(rows[0].chet_ns, 8640);
    assert!((rows[0].cost_fidelity_estimate - 0.613).abs() < 5e-4);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Landscape).unwrap();
    spec.p_max = 2;
    assert!(spec.validate().is_err());
    let mut spec = ExperimentSpec::defaults(ExperimentKind::FomTable).unwrap();
    spec.p_min = 0;
    assert!(spec.validate().is_err());
    spec.p_min = 3;
    spec.p_max = 2;
    assert!(spec.validate().is_err());
    let mut spec = ExperimentSpec::defaults(ExperimentKind::Sweep(SweepTarget::Ge2)).unwrap();
    spec.multipliers = vec![1.0, 0.0];
    assert!(spec.validate().is_err());
    assert!(qaoa_experiments::resolve_graph("no-such-graph").is_err());
    assert!("t3-sweep".parse::<ExperimentKind>().is_err());
    assert_eq!("ge2-sweep".parse::<ExperimentKind>().unwrap(), ExperimentKind::Sweep(SweepTarget::Ge2));
}

#[test]
fn binary_writes_csv_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("path3.txt");
    fs::write(&graph, "# a path on three nodes\n3 2\n0 1\n1 2 2.5\n").unwrap();
    let device = dir.path().join("device.toml");
    fs::write(&device, "t1_us = 30.0\nerr_2q = 0.02\n").unwrap();
    let out = dir.path().join("fom.csv");
    let status = Command::new(BIN)
        .args(["fom-table", "--p-max", "1", "--series", "PURE,T1", "--max-generations", "10", "--seed", "4"])
        .arg("--graph")
        .arg(&graph)
        .arg("--device-config")
        .arg(&device)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("t1_us=30 t2_us=20 err_1q=0.0015 err_2q=0.02"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",3.5,")), "c_max of the weighted path is 3.5");
}

#[test]
fn binary_rejects_bad_input() {
    for args in [
        vec!["fom-table", "--graph", "missing-graph"],
        vec!["landscape", "--p-max", "3"],
        vec!["t2-sweep", "--multipliers", "1,-2"],
        vec!["fom-table", "--series", "LOUD"],
    ] {
        let out = Command::new(BIN).args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let device = dir.path().join("bad.toml");
    fs::write(&device, "t1_us = -4.0\n").unwrap();
    let out = Command::new(BIN)
        .args(["latency-report", "--device-config"])
        .arg(&device)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t1_us"));
}

#[test]
fn binary_output_is_reproducible() {
    let args = ["ge2-sweep", "--graph", "2n-edge", "--p-max", "2", "--multipliers", "0.5,1", "--max-generations", "15"];
    let a = Command::new(BIN).args(args).output().unwrap();
    let b = Command::new(BIN).args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
