//! Noise channels and the noisy circuit simulator.
//!
//! Every gate is followed, in this order, by gate error (depolarizing on the
//! gate's own qubits), relaxation (amplitude damping on every qubit for the
//! gate's duration) and dephasing (phase damping on every qubit for the
//! gate's duration). Virtual U1/RZ gates take no time and carry no error.
//!
//! A gate error rate `e` is realized as a depolarizing channel of strength
//! `p = 2e`. With `e = 0.04` on a CNOT this turns the diagonal
//! `(0, 0.5, 0, 0.5)` of a CNOT·U1·CNOT block into
//! `(0.0384, 0.4616, 0.0384, 0.4616)`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{duration_of, duration_with, matrix_of, single_qubit_entries, GateKind, GateOp};
use crate::kernels;
use crate::linalg::{kron, ComplexMatrix, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateDurations {
    pub u1: u64,
    pub u2: u64,
    pub u3: u64,
    pub cnot: u64,
}

impl Default for GateDurations {
    fn default() -> Self {
        Self {
            u1: 0,
            u2: 60,
            u3: 120,
            cnot: 720,
        }
    }
}

/// Multipliers applied on top of the base device parameters, for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseScales {
    pub t1: f64,
    pub t2: f64,
    pub ge1: f64,
    pub ge2: f64,
}

impl Default for NoiseScales {
    fn default() -> Self {
        Self {
            t1: 1.0,
            t2: 1.0,
            ge1: 1.0,
            ge2: 1.0,
        }
    }
}

/// Timing and noise parameters of a fully connected device with identical
/// qubits. Defaults model a 6-qubit machine with T1 = 45 µs, T2 = 20 µs and
/// gate errors of 1.5e-3 (single qubit) and 4e-2 (CNOT).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceModel {
    pub n_qubits: usize,
    pub t1_us: f64,
    pub t2_us: f64,
    pub err_1q: f64,
    pub err_2q: f64,
    pub durations_ns: GateDurations,
    pub scales: NoiseScales,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self {
            n_qubits: 6,
            t1_us: 45.0,
            t2_us: 20.0,
            err_1q: 1.5e-3,
            err_2q: 4e-2,
            durations_ns: GateDurations::default(),
            scales: NoiseScales::default(),
        }
    }
}

impl DeviceModel {
    /// Parses the TOML device description. Missing keys take defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let device: Self = toml::from_str(text).map_err(|e| Error::InvalidDevice(e.to_string()))?;
        device.validate()?;
        Ok(device)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("device model serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && !v.is_nan() {
                Ok(())
            } else {
                Err(Error::InvalidDevice(format!("{name} must be positive, got {v}")))
            }
        };
        positive("t1_us", self.t1_us)?;
        positive("t2_us", self.t2_us)?;
        positive("scales.t1", self.scales.t1)?;
        positive("scales.t2", self.scales.t2)?;
        for (name, v) in [("scales.ge1", self.scales.ge1), ("scales.ge2", self.scales.ge2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidDevice(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (what, v) in [
            ("err_1q", self.err_1q),
            ("err_2q", self.err_2q),
            ("depolarizing strength 2·err_1q", self.depolarizing_1q()),
            ("depolarizing strength 2·err_2q", self.depolarizing_2q()),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidDevice(format!("{what} = {v} is outside [0, 1]")));
            }
        }
        if self.n_qubits == 0 || self.n_qubits > crate::MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: self.n_qubits,
                max: crate::MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn t1_ns(&self) -> f64 {
        self.t1_us * 1e3 * self.scales.t1
    }

    pub fn t2_ns(&self) -> f64 {
        self.t2_us * 1e3 * self.scales.t2
    }

    pub fn gate_error_1q(&self) -> f64 {
        self.err_1q * self.scales.ge1
    }

    pub fn gate_error_2q(&self) -> f64 {
        self.err_2q * self.scales.ge2
    }

    fn depolarizing_1q(&self) -> f64 {
        2.0 * self.gate_error_1q()
    }

    fn depolarizing_2q(&self) -> f64 {
        2.0 * self.gate_error_2q()
    }

    /// Depolarizing strength applied after `kind`; zero for virtual gates.
    pub fn depolarizing_strength(&self, kind: &GateKind) -> f64 {
        if kind.is_virtual() {
            0.0
        } else if kind.arity() == 2 {
            self.depolarizing_2q()
        } else {
            self.depolarizing_1q()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct NoiseToggles {
    pub gate_error: bool,
    pub relaxation: bool,
    pub dephasing: bool,
}

impl NoiseToggles {
    pub const NONE: Self = Self {
        gate_error: false,
        relaxation: false,
        dephasing: false,
    };

    pub const ALL: Self = Self {
        gate_error: true,
        relaxation: true,
        dephasing: true,
    };

    pub fn is_noiseless(&self) -> bool {
        !(self.gate_error || self.relaxation || self.dephasing)
    }
}

/// The noise configurations compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseSeries {
    Pure,
    GateError,
    T1,
    T2,
    Combined,
}

impl NoiseSeries {
    pub const ALL: [NoiseSeries; 5] = [
        NoiseSeries::Pure,
        NoiseSeries::GateError,
        NoiseSeries::T1,
        NoiseSeries::T2,
        NoiseSeries::Combined,
    ];

    pub fn toggles(self) -> NoiseToggles {
        match self {
            NoiseSeries::Pure => NoiseToggles::NONE,
            NoiseSeries::GateError => NoiseToggles {
                gate_error: true,
                ..NoiseToggles::NONE
            },
            NoiseSeries::T1 => NoiseToggles {
                relaxation: true,
                ..NoiseToggles::NONE
            },
            NoiseSeries::T2 => NoiseToggles {
                dephasing: true,
                ..NoiseToggles::NONE
            },
            NoiseSeries::Combined => NoiseToggles::ALL,
        }
    }
}

impl fmt::Display for NoiseSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseSeries::Pure => "PURE",
            NoiseSeries::GateError => "GE",
            NoiseSeries::T1 => "T1",
            NoiseSeries::T2 => "T2",
            NoiseSeries::Combined => "COMBINED",
        })
    }
}

impl FromStr for NoiseSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PURE" => Ok(NoiseSeries::Pure),
            "GE" => Ok(NoiseSeries::GateError),
            "T1" => Ok(NoiseSeries::T1),
            "T2" => Ok(NoiseSeries::T2),
            "COMBINED" => Ok(NoiseSeries::Combined),
            other => Err(Error::InvalidDevice(format!(
                "unknown noise series '{other}' (expected PURE, GE, T1, T2 or COMBINED)"
            ))),
        }
    }
}

fn check_probability(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { what, value })
    }
}

fn paulis() -> [ComplexMatrix; 4] {
    let i = Complex64::i();
    let o = Complex64::new(0.0, 0.0);
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real(&[[0.0, 1.0], [1.0, 0.0]]),
        ComplexMatrix::from_rows(&[[o, -i], [i, o]]),
        ComplexMatrix::from_real(&[[1.0, 0.0], [0.0, -1.0]]),
    ]
}

/// Pauli Kraus set of `ρ → (1-p) ρ + p I/2^n` on `n` ∈ {1, 2} qubits.
pub fn depolarizing_kraus(p: f64, n_qubits: usize) -> Result<Vec<ComplexMatrix>> {
    check_probability("depolarizing strength", p)?;
    if !(1..=2).contains(&n_qubits) {
        return Err(Error::InvalidGate(format!(
            "depolarizing channel defined on 1 or 2 qubits, got {n_qubits}"
        )));
    }
    let strings: Vec<ComplexMatrix> = match n_qubits {
        1 => paulis().to_vec(),
        _ => {
            let ps = paulis();
            ps.iter()
                .flat_map(|hi| ps.iter().map(move |lo| kron(hi, lo)))
                .collect()
        }
    };
    let count = strings.len() as f64;
    let identity_weight = (1.0 - p * (count - 1.0) / count).sqrt();
    let pauli_weight = (p / count).sqrt();
    Ok(strings
        .into_iter()
        .enumerate()
        .map(|(idx, s)| {
            let w = if idx == 0 { identity_weight } else { pauli_weight };
            s.scale(Complex64::new(w, 0.0))
        })
        .collect())
}

fn decay_strength(t_ns: f64, tau_ns: f64) -> Result<f64> {
    if t_ns.is_nan() || t_ns < 0.0 {
        return Err(Error::InvalidDevice(format!("elapsed time {t_ns} ns is negative")));
    }
    if tau_ns.is_nan() || tau_ns <= 0.0 {
        return Err(Error::InvalidDevice(format!("coherence time {tau_ns} ns is not positive")));
    }
    Ok(1.0 - (-t_ns / tau_ns).exp())
}

/// Amplitude damping for `t_ns` at relaxation time `t1_ns`, with
/// `γ = 1 - exp(-t/T1)`.
pub fn amplitude_damping_kraus(t_ns: f64, t1_ns: f64) -> Result<Vec<ComplexMatrix>> {
    let gamma = decay_strength(t_ns, t1_ns)?;
    Ok(vec![
        ComplexMatrix::from_real(&[[1.0, 0.0], [0.0, (1.0 - gamma).sqrt()]]),
        ComplexMatrix::from_real(&[[0.0, gamma.sqrt()], [0.0, 0.0]]),
    ])
}

/// Phase damping for `t_ns` at dephasing time `t2_ns`, with
/// `λ = 1 - exp(-t/T2)`.
pub fn phase_damping_kraus(t_ns: f64, t2_ns: f64) -> Result<Vec<ComplexMatrix>> {
    let lambda = decay_strength(t_ns, t2_ns)?;
    Ok(vec![
        ComplexMatrix::from_real(&[[1.0, 0.0], [0.0, (1.0 - lambda).sqrt()]]),
        ComplexMatrix::from_real(&[[0.0, 0.0], [0.0, lambda.sqrt()]]),
    ])
}

fn check_gate(gate: &GateOp, n_qubits: usize) -> Result<()> {
    gate.kind.validate()?;
    crate::linalg::check_targets(&gate.targets, n_qubits, 1 << gate.kind.arity())
}

/// One gate followed by its noise, built from explicit Kraus sets.
pub fn apply_noisy_gate(
    rho: &DensityMatrix,
    gate: &GateOp,
    device: &DeviceModel,
    toggles: NoiseToggles,
) -> Result<DensityMatrix> {
    check_gate(gate, rho.n_qubits())?;
    let mut out = rho.apply_unitary(&matrix_of(&gate.kind), &gate.targets)?;
    if toggles.gate_error && !gate.kind.is_virtual() {
        let p = device.depolarizing_strength(&gate.kind);
        let kraus = depolarizing_kraus(p, gate.targets.len())?;
        out = out.apply_kraus(&kraus, &gate.targets)?;
    }
    let t = duration_of(&gate.kind, device) as f64;
    if t > 0.0 {
        if toggles.relaxation {
            let kraus = amplitude_damping_kraus(t, device.t1_ns())?;
            for q in 0..rho.n_qubits() {
                out = out.apply_kraus(&kraus, &[q])?;
            }
        }
        if toggles.dephasing {
            let kraus = phase_damping_kraus(t, device.t2_ns())?;
            for q in 0..rho.n_qubits() {
                out = out.apply_kraus(&kraus, &[q])?;
            }
        }
    }
    Ok(out)
}

/// Runs `gates` one at a time from `initial`. The result equals folding
/// [`apply_noisy_gate`] over the list.
pub fn simulate_circuit(
    gates: &[GateOp],
    device: &DeviceModel,
    toggles: NoiseToggles,
    initial: &DensityMatrix,
) -> Result<DensityMatrix> {
    simulate_with_time_scale(gates, device, toggles, initial, 1.0)
}

/// Like [`simulate_circuit`], with every elapsed time multiplied by
/// `time_scale` before it enters the relaxation and dephasing channels.
/// Gate error is unaffected.
pub fn simulate_with_time_scale(
    gates: &[GateOp],
    device: &DeviceModel,
    toggles: NoiseToggles,
    initial: &DensityMatrix,
    time_scale: f64,
) -> Result<DensityMatrix> {
    if !(time_scale >= 0.0 && time_scale.is_finite()) {
        return Err(Error::InvalidDevice(format!("time scale {time_scale} is invalid")));
    }
    let n = initial.n_qubits();
    for gate in gates {
        check_gate(gate, n)?;
    }
    let mut sim = Simulator::new(initial.clone(), device, toggles, time_scale);
    for gate in gates {
        sim.apply(gate);
    }
    Ok(sim.finish())
}

/// Decoherence on a qubit commutes with gates that do not touch it, and
/// consecutive damping steps compose by adding their durations. The
/// simulator therefore keeps an idle-time account per qubit and only applies
/// relaxation/dephasing when a gate is about to act on the qubit, or at the
/// end of the circuit.
struct Simulator {
    rho: DensityMatrix,
    pending_ns: Vec<f64>,
    toggles: NoiseToggles,
    t1_ns: f64,
    t2_ns: f64,
    depol_1q: f64,
    depol_2q: f64,
    durations: GateDurations,
    time_scale: f64,
}

impl Simulator {
    fn new(rho: DensityMatrix, device: &DeviceModel, toggles: NoiseToggles, time_scale: f64) -> Self {
        let n = rho.n_qubits();
        Self {
            rho,
            pending_ns: vec![0.0; n],
            toggles,
            t1_ns: device.t1_ns(),
            t2_ns: device.t2_ns(),
            depol_1q: device.depolarizing_strength(&GateKind::H),
            depol_2q: device.depolarizing_strength(&GateKind::Cnot),
            durations: device.durations_ns,
            time_scale,
        }
    }

    fn flush(&mut self, q: usize) {
        let t = std::mem::take(&mut self.pending_ns[q]);
        if t <= 0.0 {
            return;
        }
        let gamma = if self.toggles.relaxation {
            1.0 - (-t / self.t1_ns).exp()
        } else {
            0.0
        };
        let lambda = if self.toggles.dephasing {
            1.0 - (-t / self.t2_ns).exp()
        } else {
            0.0
        };
        let dim = self.rho.dim();
        kernels::relax_dephase(self.rho.data_mut(), dim, q, gamma, lambda);
    }

    fn apply(&mut self, gate: &GateOp) {
        let dim = self.rho.dim();
        let kind = gate.kind;
        // Z rotations commute with both damping channels, so pending idle
        // time need not be settled before them.
        if !kind.is_virtual() {
            for &q in &gate.targets {
                self.flush(q);
            }
        }
        let data = self.rho.data_mut();
        match kind {
            GateKind::Cnot => kernels::apply_cnot(data, dim, gate.targets[0], gate.targets[1]),
            GateKind::U1(l) => kernels::apply_phase(data, dim, gate.targets[0], Complex64::from_polar(1.0, l)),
            other => {
                let u = single_qubit_entries(&other).expect("single-qubit gate");
                kernels::apply_1q(data, dim, gate.targets[0], &u);
            }
        }
        if self.toggles.gate_error && !kind.is_virtual() {
            let p = if kind.arity() == 2 { self.depol_2q } else { self.depol_1q };
            kernels::depolarize(self.rho.data_mut(), dim, &gate.targets, p);
        }
        if self.toggles.relaxation || self.toggles.dephasing {
            let t = duration_with(&kind, &self.durations) as f64 * self.time_scale;
            if t > 0.0 {
                self.pending_ns.iter_mut().for_each(|p| *p += t);
            }
        }
    }

    fn finish(mut self) -> DensityMatrix {
        for q in 0..self.pending_ns.len() {
            self.flush(q);
        }
        self.rho
    }
}

/// Noiseless state-vector evolution.
pub fn simulate_pure(gates: &[GateOp], initial: &PureState) -> Result<PureState> {
    let mut psi = initial.clone();
    for gate in gates {
        check_gate(gate, psi.n_qubits())?;
        psi.apply_unitary_mut(&matrix_of(&gate.kind), &gate.targets)?;
    }
    Ok(psi)
}
