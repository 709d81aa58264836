//! In-place kernels on a row-major `dim × dim` density-matrix buffer.
//!
//! These are the fast paths behind [`crate::noise::simulate_circuit`]. Each
//! one is checked against the generic `apply_unitary` / `apply_kraus` route
//! in the noise module tests.

use num_complex::Complex64;

type C = Complex64;

/// Indices in `0..dim` whose bit `m` is clear, in increasing order.
fn low_indices(dim: usize, m: usize) -> impl Iterator<Item = usize> {
    (0..dim).step_by(2 * m).flat_map(move |h| h..h + m)
}

/// Mutable views of rows `r0` and `r1 > r0`.
fn row_pair(rho: &mut [C], dim: usize, r0: usize, r1: usize) -> (&mut [C], &mut [C]) {
    let (head, tail) = rho.split_at_mut(r1 * dim);
    (&mut head[r0 * dim..(r0 + 1) * dim], &mut tail[..dim])
}

/// `ρ ← U ρ U†` for a 2×2 `u` on qubit `q`.
pub fn apply_1q(rho: &mut [C], dim: usize, q: usize, u: &[[C; 2]; 2]) {
    let m = 1usize << q;
    for r0 in low_indices(dim, m) {
        let (a_row, b_row) = row_pair(rho, dim, r0, r0 | m);
        for (a, b) in a_row.iter_mut().zip(b_row.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = u[0][0] * x + u[0][1] * y;
            *b = u[1][0] * x + u[1][1] * y;
        }
    }
    let v = [
        [u[0][0].conj(), u[0][1].conj()],
        [u[1][0].conj(), u[1][1].conj()],
    ];
    for row in rho.chunks_exact_mut(dim) {
        for c0 in low_indices(dim, m) {
            let c1 = c0 | m;
            let (x, y) = (row[c0], row[c1]);
            row[c0] = x * v[0][0] + y * v[0][1];
            row[c1] = x * v[1][0] + y * v[1][1];
        }
    }
}

/// `ρ ← D ρ D†` for `D = diag(1, phase)` on qubit `q`.
pub fn apply_phase(rho: &mut [C], dim: usize, q: usize, phase: C) {
    let m = 1usize << q;
    let conj = phase.conj();
    for (r, row) in rho.chunks_exact_mut(dim).enumerate() {
        let (factor, offset) = if r & m != 0 { (phase, 0) } else { (conj, m) };
        for c in low_indices(dim, m) {
            row[c + offset] *= factor;
        }
    }
}

/// CNOT as a row and column permutation.
pub fn apply_cnot(rho: &mut [C], dim: usize, control: usize, target: usize) {
    let cm = 1usize << control;
    let tm = 1usize << target;
    for r in low_indices(dim, tm).filter(|r| r & cm != 0) {
        let (a, b) = row_pair(rho, dim, r, r | tm);
        a.swap_with_slice(b);
    }
    let swaps: Vec<usize> = low_indices(dim, tm).filter(|c| c & cm != 0).collect();
    for row in rho.chunks_exact_mut(dim) {
        for &c in &swaps {
            row.swap(c, c | tm);
        }
    }
}

/// `ρ ← (1-p) ρ + p · I_T/2^k ⊗ Tr_T(ρ)` on the qubits in `targets`.
pub fn depolarize(rho: &mut [C], dim: usize, targets: &[usize], p: f64) {
    if p == 0.0 {
        return;
    }
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let local = 1usize << targets.len();
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| l >> j & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect();
    let keep = 1.0 - p;
    let mix = p / local as f64;
    let bases: Vec<usize> = (0..dim).filter(|i| i & mask == 0).collect();
    for &br in &bases {
        for &bc in &bases {
            let sigma: C = offsets
                .iter()
                .map(|&o| rho[(br + o) * dim + bc + o])
                .sum();
            for &ox in &offsets {
                for &oy in &offsets {
                    let z = &mut rho[(br + ox) * dim + bc + oy];
                    *z *= keep;
                    if ox == oy {
                        *z += sigma * mix;
                    }
                }
            }
        }
    }
}

/// Amplitude damping with strength `gamma` composed with phase damping with
/// strength `lambda`, both on qubit `q`. The two channels commute.
pub fn relax_dephase(rho: &mut [C], dim: usize, q: usize, gamma: f64, lambda: f64) {
    let m = 1usize << q;
    let coherence = ((1.0 - gamma) * (1.0 - lambda)).sqrt();
    let excited = 1.0 - gamma;
    for r0 in low_indices(dim, m) {
        let (row0, row1) = row_pair(rho, dim, r0, r0 | m);
        for c0 in low_indices(dim, m) {
            let c1 = c0 | m;
            let decayed = row1[c1];
            row0[c0] += decayed * gamma;
            row1[c1] = decayed * excited;
            row0[c1] *= coherence;
            row1[c0] *= coherence;
        }
    }
}
