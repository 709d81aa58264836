//! Dense complex matrices, state vectors and density matrices.
//!
//! All operations here are pure: they take immutable inputs and return new
//! values. The in-place kernels used by the circuit simulator live in the
//! crate-private `kernels` module.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{MAX_QUBITS, STRUCT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense, row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails on a size mismatch or a
    /// non-finite entry.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<const C: usize>(rows: &[[Complex64; C]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            rows: rows.len(),
            cols: C,
            data,
        }
    }

    /// Real-valued convenience constructor.
    pub fn from_real<const C: usize>(rows: &[[f64; C]]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self {
            rows: rows.len(),
            cols: C,
            data,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub(crate) fn from_parts_unchecked(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// Largest elementwise modulus of `self - other`; infinite on a shape
    /// mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                let d = (self.data[r * n + c] - self.data[c * n + r].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// `max |U†U - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self
            .adjoint()
            .matmul(self)
            .expect("square matrix product is well formed");
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: self.cols,
            });
        }
        let n = self.rows;
        let m = DMatrix::from_row_slice(n, n, &self.data);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

/// Kronecker product `a ⊗ b`. Under the little-endian qubit ordering, `b`
/// acts on the low qubits and `a` on the high ones.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![ZERO; rows * cols];
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a.data[ar * a.cols + ac];
            for br in 0..b.rows {
                let r = ar * b.rows + br;
                for bc in 0..b.cols {
                    let c = ac * b.cols + bc;
                    data[r * cols + c] = s * b.data[br * b.cols + bc];
                }
            }
        }
    }
    ComplexMatrix::from_parts_unchecked(rows, cols, data)
}

pub(crate) fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Validates `targets` against an `n_qubits` register and a `k`-qubit
/// operator of dimension `op_dim`.
pub(crate) fn check_targets(targets: &[usize], n_qubits: usize, op_dim: usize) -> Result<()> {
    if 1usize << targets.len() != op_dim {
        return Err(Error::DimensionMismatch {
            expected: 1 << targets.len(),
            actual: op_dim,
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: t,
                n_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(targets.to_vec()));
        }
    }
    Ok(())
}

/// Index layout of a `k`-qubit operator embedded in a `2^n` space: the base
/// indices (all target bits clear) and the offset of every local index.
/// Local bit `j` maps to global qubit `targets[j]`.
pub(crate) struct Embedding {
    pub bases: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl Embedding {
    pub fn new(targets: &[usize], n_qubits: usize) -> Self {
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let bases = (0..1usize << n_qubits).filter(|i| i & mask == 0).collect();
        let offsets = (0..1usize << targets.len())
            .map(|l| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l >> j & 1 == 1)
                    .map(|(_, &t)| 1usize << t)
                    .sum()
            })
            .collect();
        Self { bases, offsets }
    }
}

/// `Ẽ A Ẽ†` for a local operator `e` embedded via `emb`, on a row-major
/// `dim × dim` buffer.
fn sandwich(a: &[Complex64], dim: usize, e: &ComplexMatrix, emb: &Embedding) -> Vec<Complex64> {
    let k = e.rows;
    let mut left = vec![ZERO; dim * dim];
    let mut buf = vec![ZERO; k];
    for &b in &emb.bases {
        for c in 0..dim {
            for (l, v) in buf.iter_mut().enumerate() {
                *v = a[(b + emb.offsets[l]) * dim + c];
            }
            for lp in 0..k {
                let coeffs = &e.data[lp * k..(lp + 1) * k];
                let acc: Complex64 = coeffs.iter().zip(&buf).map(|(u, v)| u * v).sum();
                left[(b + emb.offsets[lp]) * dim + c] = acc;
            }
        }
    }
    let mut out = vec![ZERO; dim * dim];
    for r in 0..dim {
        let row = &left[r * dim..(r + 1) * dim];
        for &b in &emb.bases {
            for (l, v) in buf.iter_mut().enumerate() {
                *v = row[b + emb.offsets[l]];
            }
            for lp in 0..k {
                let coeffs = &e.data[lp * k..(lp + 1) * k];
                let acc: Complex64 = coeffs.iter().zip(&buf).map(|(u, v)| v * u.conj()).sum();
                out[r * dim + b + emb.offsets[lp]] = acc;
            }
        }
    }
    out
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_register(n_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidState(format!("state norm² is {norm}")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// `|+⟩^⊗n`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: vec![a; dim],
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_unitary(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_mut(u, targets)?;
        Ok(out)
    }

    pub(crate) fn apply_unitary_mut(&mut self, u: &ComplexMatrix, targets: &[usize]) -> Result<()> {
        check_targets(targets, self.n_qubits, u.rows)?;
        let dev = u.unitarity_deviation();
        if dev > STRUCT_TOL {
            return Err(Error::NonUnitary { deviation: dev });
        }
        let emb = Embedding::new(targets, self.n_qubits);
        let k = u.rows;
        let mut buf = vec![ZERO; k];
        for &b in &emb.bases {
            for (l, v) in buf.iter_mut().enumerate() {
                *v = self.amplitudes[b + emb.offsets[l]];
            }
            for lp in 0..k {
                let coeffs = &u.data[lp * k..(lp + 1) * k];
                let acc: Complex64 = coeffs.iter().zip(&buf).map(|(x, y)| x * y).sum();
                self.amplitudes[b + emb.offsets[lp]] = acc;
            }
        }
        Ok(())
    }

    /// `⟨ψ|H|ψ⟩` for a Hermitian observable.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        check_observable(obs, self.dim())?;
        let n = self.dim();
        let mut acc = ZERO;
        for r in 0..n {
            let mut row = ZERO;
            for c in 0..n {
                row += obs.data[r * n + c] * self.amplitudes[c];
            }
            acc += self.amplitudes[r].conj() * row;
        }
        real_part(acc)
    }

    /// `Σ_z |ψ_z|² h_z` for a diagonal observable.
    pub fn expectation_diag(&self, diag_obs: &[f64]) -> Result<f64> {
        if diag_obs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: diag_obs.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(diag_obs)
            .map(|(a, h)| a.norm_sqr() * h)
            .sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.dim();
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[r * n + c] = self.amplitudes[r] * self.amplitudes[c].conj();
            }
        }
        DensityMatrix {
            n_qubits: self.n_qubits,
            mat: ComplexMatrix::from_parts_unchecked(n, n, data),
        }
    }
}

fn check_observable(obs: &ComplexMatrix, dim: usize) -> Result<()> {
    if obs.rows != dim || obs.cols != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: obs.rows.max(obs.cols),
        });
    }
    let dev = obs.hermiticity_deviation();
    if dev > STRUCT_TOL {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(())
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > STRUCT_TOL {
        return Err(Error::NonHermitian { deviation: z.im.abs() });
    }
    Ok(z.re)
}

/// A mixed quantum state on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking every density-matrix invariant,
    /// positivity included (an eigenvalue scan).
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() || !mat.rows.is_power_of_two() || mat.rows < 2 {
            return Err(Error::InvalidState(format!(
                "{}x{} is not a qubit-register shape",
                mat.rows, mat.cols
            )));
        }
        let n_qubits = mat.rows.trailing_zeros() as usize;
        check_register(n_qubits)?;
        let rho = Self { n_qubits, mat };
        rho.validate()?;
        Ok(rho)
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Ok(PureState::basis(n_qubits, 0)?.to_density())
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            mat: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        })
    }

    /// A diagonal (classical) state with the given populations.
    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        let diag: Vec<Complex64> = populations.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::from_matrix(ComplexMatrix::diagonal(&diag))
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, data: Vec<Complex64>) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            mat: ComplexMatrix::from_parts_unchecked(dim, dim, data),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.mat[(r, c)]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.mat.data
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.mat
            .hermitian_eigenvalues()
            .map(|ev| ev[0])
            .unwrap_or(f64::NAN)
    }

    /// Checks Hermiticity, unit trace and positivity to [`STRUCT_TOL`].
    pub fn validate(&self) -> Result<()> {
        let herm = self.mat.hermiticity_deviation();
        if herm > STRUCT_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > STRUCT_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev.is_nan() || min_ev < -STRUCT_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(())
    }

    /// `Ũ ρ Ũ†` with `u` embedded on `targets`.
    pub fn apply_unitary(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        check_targets(targets, self.n_qubits, u.rows)?;
        let dev = u.unitarity_deviation();
        if dev > STRUCT_TOL {
            return Err(Error::NonUnitary { deviation: dev });
        }
        let emb = Embedding::new(targets, self.n_qubits);
        let data = sandwich(&self.mat.data, self.dim(), u, &emb);
        Ok(Self::from_parts_unchecked(self.n_qubits, data))
    }

    /// Operator-sum evolution `Σ_k Ẽ_k ρ Ẽ_k†`.
    pub fn apply_kraus(&self, kraus: &[ComplexMatrix], targets: &[usize]) -> Result<Self> {
        let first = kraus.first().ok_or(Error::IncompleteKraus { deviation: 1.0 })?;
        for e in kraus {
            check_targets(targets, self.n_qubits, e.rows)?;
            if !e.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: e.rows,
                    actual: e.cols,
                });
            }
        }
        let dev = kraus_completeness_deviation(kraus, first.rows);
        if dev > STRUCT_TOL {
            return Err(Error::IncompleteKraus { deviation: dev });
        }
        let dim = self.dim();
        let emb = Embedding::new(targets, self.n_qubits);
        let mut acc = vec![ZERO; dim * dim];
        for e in kraus {
            let term = sandwich(&self.mat.data, dim, e, &emb);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
        }
        Ok(Self::from_parts_unchecked(self.n_qubits, acc))
    }

    /// `Tr(ρH)` for a Hermitian observable.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        check_observable(obs, self.dim())?;
        let n = self.dim();
        let mut acc = ZERO;
        for r in 0..n {
            for c in 0..n {
                acc += self.mat.data[r * n + c] * obs.data[c * n + r];
            }
        }
        real_part(acc)
    }

    /// `Σ_i h_i ρ_ii` for a diagonal observable.
    pub fn expectation_diag(&self, diag_obs: &[f64]) -> Result<f64> {
        if diag_obs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: diag_obs.len(),
            });
        }
        let n = self.dim();
        Ok(diag_obs
            .iter()
            .enumerate()
            .map(|(i, h)| h * self.mat.data[i * n + i].re)
            .sum())
    }

    /// `⟨ψ|ρ|ψ⟩`, the fidelity against a pure reference.
    pub fn fidelity_to_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        let n = self.dim();
        let a = &psi.amplitudes;
        let mut acc = ZERO;
        for r in 0..n {
            let row: Complex64 = self.mat.data[r * n..(r + 1) * n].iter().zip(a).map(|(m, x)| m * x).sum();
            acc += a[r].conj() * row;
        }
        if acc.im.abs() > STRUCT_TOL || acc.re < -STRUCT_TOL || acc.re > 1.0 + STRUCT_TOL {
            return Err(Error::InvalidState(format!("fidelity {acc} is not in [0, 1]")));
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }
}

/// `max |Σ E†E - I|`.
pub fn kraus_completeness_deviation(kraus: &[ComplexMatrix], dim: usize) -> f64 {
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in kraus {
        if e.rows != dim || e.cols != dim {
            return f64::INFINITY;
        }
        let g = e.adjoint().matmul(e).expect("square Kraus operator");
        sum = sum.add(&g).expect("same shape");
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(&[[0.0, 1.0], [1.0, 0.0]])
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(&[[1.0, 0.0], [0.0, -1.0]])
    }

    fn hadamard() -> ComplexMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(&[[h, h], [h, -h]])
    }

    fn cnot_lsb_control() -> ComplexMatrix {
        ComplexMatrix::from_real(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ])
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));

        let xi = kron(&pauli_x(), &i2);
        let expected = ComplexMatrix::from_real(&[
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(xi, expected);
    }

    #[test]
    fn kron_hadamards_make_uniform_superposition() {
        let hh = kron(&hadamard(), &hadamard());
        let psi = PureState::basis(2, 0).unwrap().apply_unitary(&hh, &[0, 1]).unwrap();
        for a in psi.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn new_rejects_bad_shapes_and_nan() {
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn unitary_examples() {
        let rho0 = DensityMatrix::zero_state(1).unwrap();
        let flipped = rho0.apply_unitary(&pauli_x(), &[0]).unwrap();
        assert_eq!(flipped.populations(), vec![0.0, 1.0]);

        let plus = rho0.apply_unitary(&hadamard(), &[0]).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert_abs_diff_eq!(plus.get(r, col).re, 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cnot_prepares_bell_state() {
        let rho = DensityMatrix::zero_state(2)
            .unwrap()
            .apply_unitary(&hadamard(), &[0])
            .unwrap()
            .apply_unitary(&cnot_lsb_control(), &[0, 1])
            .unwrap();
        let pops = rho.populations();
        let expected = [0.5, 0.0, 0.0, 0.5];
        for (p, e) in pops.iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rho.get(0, 3).re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn unitary_rejections() {
        let rho = DensityMatrix::zero_state(2).unwrap();
        let not_unitary = ComplexMatrix::from_real(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            rho.apply_unitary(&not_unitary, &[0]),
            Err(Error::NonUnitary { .. })
        ));
        assert!(matches!(
            rho.apply_unitary(&pauli_x(), &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            rho.apply_unitary(&cnot_lsb_control(), &[1, 1]),
            Err(Error::DuplicateTarget(_))
        ));
    }

    #[test]
    fn kraus_examples() {
        let rho = DensityMatrix::zero_state(1)
            .unwrap()
            .apply_unitary(&hadamard(), &[0])
            .unwrap();
        let same = rho.apply_kraus(&[ComplexMatrix::identity(2)], &[0]).unwrap();
        assert!(same.matrix().max_abs_diff(rho.matrix()) < 1e-15);

        let via_kraus = rho.apply_kraus(&[pauli_x()], &[0]).unwrap();
        let via_unitary = rho.apply_unitary(&pauli_x(), &[0]).unwrap();
        assert!(via_kraus.matrix().max_abs_diff(via_unitary.matrix()) < 1e-15);

        let full_damping = [
            ComplexMatrix::from_real(&[[1.0, 0.0], [0.0, 0.0]]),
            ComplexMatrix::from_real(&[[0.0, 1.0], [0.0, 0.0]]),
        ];
        let ground = rho.apply_kraus(&full_damping, &[0]).unwrap();
        assert!(ground
            .matrix()
            .max_abs_diff(DensityMatrix::zero_state(1).unwrap().matrix())
            < 1e-15);
    }

    #[test]
    fn incomplete_kraus_is_rejected() {
        let rho = DensityMatrix::zero_state(1).unwrap();
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(matches!(
            rho.apply_kraus(&[half], &[0]),
            Err(Error::IncompleteKraus { .. })
        ));
        assert!(rho.apply_kraus(&[], &[0]).is_err());
    }

    #[test]
    fn expectation_examples() {
        let psi = PureState::new(vec![c(0.8, 0.0), c(0.6, 0.0)]).unwrap();
        assert_abs_diff_eq!(psi.expectation(&pauli_z()).unwrap(), 0.28, epsilon = 1e-12);

        let zero = PureState::basis(1, 0).unwrap();
        assert_abs_diff_eq!(zero.expectation(&pauli_z()).unwrap(), 1.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(mixed.expectation(&pauli_z()).unwrap(), 0.0, epsilon = 1e-12);

        let not_herm = ComplexMatrix::from_real(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(
            mixed.expectation(&not_herm),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn expectation_diag_examples() {
        let cost = [0.0, 1.0, 1.0, 0.0];
        let rho11 = PureState::basis(2, 3).unwrap().to_density();
        assert_eq!(rho11.expectation_diag(&[0.0; 4]).unwrap(), 0.0);
        assert_eq!(rho11.expectation_diag(&cost).unwrap(), 0.0);
        // "01": node 0 → 0, node 1 → 1, i.e. index 0b10.
        let rho01 = PureState::basis(2, 0b10).unwrap().to_density();
        assert_eq!(rho01.expectation_diag(&cost).unwrap(), 1.0);
        assert!(rho01.expectation_diag(&[0.0; 3]).is_err());

        let as_matrix = rho01
            .expectation(&ComplexMatrix::diagonal(
                &cost.map(|x| c(x, 0.0)),
            ))
            .unwrap();
        assert_abs_diff_eq!(as_matrix, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let plus = PureState::plus(1).unwrap();
        assert_abs_diff_eq!(
            plus.to_density().fidelity_to_pure(&plus).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap().to_density();
        assert_abs_diff_eq!(one.fidelity_to_pure(&zero).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(mixed.fidelity_to_pure(&plus).unwrap(), 0.5, epsilon = 1e-12);
        assert!(mixed.fidelity_to_pure(&PureState::plus(2).unwrap()).is_err());
    }

    #[test]
    fn from_matrix_rejects_invalid_states() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diagonal(&[1.5, -0.5]).is_err());
        let non_herm = ComplexMatrix::from_rows(&[[c(0.5, 0.0), c(0.1, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]]);
        assert!(DensityMatrix::from_matrix(non_herm).is_err());
        assert!(DensityMatrix::from_diagonal(&[0.25; 4]).is_ok());
        assert!(DensityMatrix::zero_state(13).is_err());
    }
}
