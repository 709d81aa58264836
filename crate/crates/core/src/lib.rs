//! Noisy density-matrix simulation of QAOA for MaxCut.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: dense complex matrices, pure states and density matrices.
//! - [`gates`]: the native U1/U2/U3/CNOT gate set plus derived gates.
//! - [`noise`]: depolarizing, amplitude-damping and phase-damping channels,
//!   the device model and the noisy circuit simulator.
//! - [`qaoa`]: MaxCut graphs, the QAOA circuit, latency model and evaluation.
//! - [`optimize`]: differential evolution and exhaustive grid scans.
//!
//! # Qubit ordering
//!
//! Qubit `q` is bit `q` of a basis-state index, so qubit 0 is the least
//! significant bit. Every embedding of a local operator, every bitstring
//! conversion and every graph node uses this convention: node `i` of a graph
//! is qubit `i`.

pub mod error;
pub mod gates;
pub(crate) mod kernels;
pub mod linalg;
pub mod noise;
pub mod optimize;
pub mod qaoa;

pub use error::{Error, Result};
pub use gates::{GateKind, GateOp};
pub use linalg::{kron, ComplexMatrix, DensityMatrix, PureState};
pub use noise::{DeviceModel, NoiseToggles};
pub use num_complex::Complex64;
pub use optimize::{Bounds, DeConfig, Landscape, OptResult};
pub use qaoa::{Bitstring, CostDiagonal, EvalRecord, Graph, QaoaParams};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

/// Tolerance for structural invariants (unitarity, trace, Hermiticity).
pub const STRUCT_TOL: f64 = 1e-9;
