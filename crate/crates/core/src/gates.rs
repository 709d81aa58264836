//! The native gate set (U1, U2, U3, CNOT) and derived gates expressed in it.
//!
//! Single-qubit gates follow the usual hardware-provider convention:
//!
//! ```text
//! U3(θ,φ,λ) = [[cos(θ/2),        -e^{iλ} sin(θ/2)     ],
//!              [e^{iφ} sin(θ/2),  e^{i(φ+λ)} cos(θ/2)]]
//! ```
//!
//! The CNOT matrix is written in the local little-endian basis of its
//! targets `[control, target]`: local bit 0 is the control, so it swaps the
//! local indices 1 and 3.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::noise::{DeviceModel, GateDurations};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    U1(f64),
    U2(f64, f64),
    U3(f64, f64, f64),
    Cnot,
    H,
    X,
    Rx(f64),
    Ry(f64),
    Rz(f64),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(
            self,
            GateKind::U1(_) | GateKind::U2(..) | GateKind::U3(..) | GateKind::Cnot
        )
    }

    /// Virtual frame changes: zero duration and no gate error.
    pub fn is_virtual(&self) -> bool {
        matches!(self, GateKind::U1(_) | GateKind::Rz(_))
    }

    fn angles(&self) -> Vec<f64> {
        match *self {
            GateKind::U1(a) | GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) => vec![a],
            GateKind::U2(a, b) => vec![a, b],
            GateKind::U3(a, b, c) => vec![a, b, c],
            GateKind::Cnot | GateKind::H | GateKind::X => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.angles().iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidGate(format!("{self} has a non-finite angle")));
        }
        Ok(())
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::U1(l) => write!(f, "U1({l})"),
            GateKind::U2(p, l) => write!(f, "U2({p}, {l})"),
            GateKind::U3(t, p, l) => write!(f, "U3({t}, {p}, {l})"),
            GateKind::Cnot => write!(f, "CNOT"),
            GateKind::H => write!(f, "H"),
            GateKind::X => write!(f, "X"),
            GateKind::Rx(t) => write!(f, "RX({t})"),
            GateKind::Ry(t) => write!(f, "RY({t})"),
            GateKind::Rz(t) => write!(f, "RZ({t})"),
        }
    }
}

/// A gate scheduled on specific qubits. For CNOT the control comes first.
///
/// Durations are not stored on the op: they are resolved against a
/// [`DeviceModel`] so that timing sweeps never need to rebuild circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        kind.validate()?;
        if targets.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{kind} acts on {} qubit(s), got targets {targets:?}",
                kind.arity()
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets));
        }
        Ok(Self { kind, targets })
    }

    pub fn single(kind: GateKind, qubit: usize) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self {
            kind,
            targets: vec![qubit],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        debug_assert_ne!(control, target);
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    pub fn duration_ns(&self, device: &DeviceModel) -> u64 {
        duration_of(&self.kind, device)
    }
}

fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

fn u3_entries(theta: f64, phi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -cis(lambda) * s],
        [cis(phi) * s, cis(phi + lambda) * c],
    ]
}

/// 2×2 entries of a single-qubit gate; `None` for CNOT.
pub(crate) fn single_qubit_entries(kind: &GateKind) -> Option<[[Complex64; 2]; 2]> {
    let m = match *kind {
        GateKind::U1(l) => [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), cis(l)],
        ],
        GateKind::U2(p, l) => u3_entries(FRAC_PI_2, p, l),
        GateKind::U3(t, p, l) => u3_entries(t, p, l),
        GateKind::H => u3_entries(FRAC_PI_2, 0.0, PI),
        GateKind::X => u3_entries(PI, 0.0, PI),
        GateKind::Rx(t) => u3_entries(t, -FRAC_PI_2, FRAC_PI_2),
        GateKind::Ry(t) => u3_entries(t, 0.0, 0.0),
        GateKind::Rz(t) => [
            [cis(-t / 2.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), cis(t / 2.0)],
        ],
        GateKind::Cnot => return None,
    };
    Some(m)
}

pub fn matrix_of(kind: &GateKind) -> ComplexMatrix {
    match single_qubit_entries(kind) {
        Some(m) => ComplexMatrix::from_rows(&m),
        None => ComplexMatrix::from_real(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]),
    }
}

/// Rewrites a gate into the native U1/U2/U3/CNOT set. The product of the
/// returned matrices equals `matrix_of(kind)` up to a global phase (only RZ
/// picks one up: `RZ(θ) = e^{-iθ/2} U1(θ)`).
pub fn decompose_to_native(kind: &GateKind) -> Vec<GateKind> {
    let native = match *kind {
        GateKind::H => GateKind::U2(0.0, PI),
        GateKind::X => GateKind::U3(PI, 0.0, PI),
        GateKind::Rx(t) => GateKind::U3(t, -FRAC_PI_2, FRAC_PI_2),
        GateKind::Ry(t) => GateKind::U3(t, 0.0, 0.0),
        GateKind::Rz(t) => GateKind::U1(t),
        native => native,
    };
    vec![native]
}

pub fn duration_of(kind: &GateKind, device: &DeviceModel) -> u64 {
    duration_with(kind, &device.durations_ns)
}

pub(crate) fn duration_with(kind: &GateKind, d: &GateDurations) -> u64 {
    match kind {
        GateKind::U1(_) => d.u1,
        GateKind::U2(..) => d.u2,
        GateKind::U3(..) => d.u3,
        GateKind::Cnot => d.cnot,
        derived => decompose_to_native(derived)
            .iter()
            .map(|k| duration_with(k, d))
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    fn all_kinds(a: f64, b: f64, c: f64) -> Vec<GateKind> {
        vec![
            GateKind::U1(a),
            GateKind::U2(a, b),
            GateKind::U3(a, b, c),
            GateKind::Cnot,
            GateKind::H,
            GateKind::X,
            GateKind::Rx(a),
            GateKind::Ry(b),
            GateKind::Rz(c),
        ]
    }

    /// `min_α max |e^{iα} A − B|`, with α fitted from the largest entry of A.
    fn phase_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        let (idx, _) = a
            .as_slice()
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .unwrap();
        let ratio = b.as_slice()[idx] / a.as_slice()[idx];
        let phase = ratio / ratio.norm();
        a.scale(phase).max_abs_diff(b)
    }

    #[test]
    fn u1_zero_is_identity() {
        assert!(matrix_of(&GateKind::U1(0.0)).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn x_as_u3_flips_zero() {
        let psi = PureState::basis(1, 0)
            .unwrap()
            .apply_unitary(&matrix_of(&GateKind::U3(PI, 0.0, PI)), &[0])
            .unwrap();
        assert!((psi.amplitudes()[1].norm() - 1.0).abs() < 1e-12);
        assert!(psi.amplitudes()[0].norm() < 1e-12);
    }

    #[test]
    fn rz_is_phased_u1() {
        for i in 0..50 {
            let theta = -7.0 + 0.29 * i as f64;
            let rz = matrix_of(&GateKind::Rz(theta));
            let u1 = matrix_of(&GateKind::U1(theta)).scale(cis(-theta / 2.0));
            assert!(rz.max_abs_diff(&u1) < 1e-12);
        }
    }

    #[test]
    fn standard_gates_match_textbook_forms() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = ComplexMatrix::from_real(&[[h, h], [h, -h]]);
        assert!(matrix_of(&GateKind::H).max_abs_diff(&hadamard) < 1e-15);
        let x = ComplexMatrix::from_real(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(matrix_of(&GateKind::X).max_abs_diff(&x) < 1e-15);
        let t = 0.7_f64;
        let (s, c) = (t / 2.0).sin_cos();
        let rx = ComplexMatrix::from_rows(&[
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ]);
        assert!(matrix_of(&GateKind::Rx(t)).max_abs_diff(&rx) < 1e-15);
        let ry = ComplexMatrix::from_real(&[[c, -s], [s, c]]);
        assert!(matrix_of(&GateKind::Ry(t)).max_abs_diff(&ry) < 1e-15);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_to_native(&GateKind::H), vec![GateKind::U2(0.0, PI)]);
        assert_eq!(
            decompose_to_native(&GateKind::Rx(0.4)),
            vec![GateKind::U3(0.4, -FRAC_PI_2, FRAC_PI_2)]
        );
        assert_eq!(decompose_to_native(&GateKind::Rz(1.3)), vec![GateKind::U1(1.3)]);
    }

    #[test]
    fn native_products_match_up_to_phase() {
        let mut seed = 0x2545_f491_4f6c_dd1d_u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 * PI - 2.0 * PI
        };
        for _ in 0..10_000 {
            let (a, b, c) = (next(), next(), next());
            for kind in all_kinds(a, b, c) {
                let m = matrix_of(&kind);
                assert!(m.unitarity_deviation() < 1e-12, "{kind} not unitary");
                let natives = decompose_to_native(&kind);
                assert!(natives.iter().all(GateKind::is_native));
                let product = natives
                    .iter()
                    .map(matrix_of)
                    .reduce(|acc, n| n.matmul(&acc).unwrap())
                    .unwrap();
                assert!(phase_distance(&product, &m) < 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn durations_follow_native_decomposition() {
        let device = DeviceModel::default();
        assert_eq!(duration_of(&GateKind::Cnot, &device), 720);
        assert_eq!(duration_of(&GateKind::Rz(0.3), &device), 0);
        assert_eq!(duration_of(&GateKind::H, &device), 60);
        assert_eq!(duration_of(&GateKind::U3(1.0, 2.0, 3.0), &device), 120);
        assert_eq!(duration_of(&GateKind::Rx(1.0), &device), 120);
        assert_eq!(duration_of(&GateKind::X, &device), 120);
        for kind in all_kinds(0.1, 0.2, 0.3) {
            let total: u64 = decompose_to_native(&kind)
                .iter()
                .map(|k| duration_of(k, &device))
                .sum();
            assert_eq!(total, duration_of(&kind, &device));
        }
    }

    #[test]
    fn gate_op_validation() {
        assert!(GateOp::new(GateKind::Cnot, vec![0]).is_err());
        assert!(GateOp::new(GateKind::Cnot, vec![1, 1]).is_err());
        assert!(GateOp::new(GateKind::H, vec![0, 1]).is_err());
        assert!(GateOp::new(GateKind::U1(f64::NAN), vec![0]).is_err());
        assert!(GateOp::new(GateKind::U3(1.0, f64::INFINITY, 0.0), vec![0]).is_err());
        assert!(GateOp::new(GateKind::Cnot, vec![0, 3]).is_ok());
    }
}
