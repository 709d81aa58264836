//! MaxCut instances, the QAOA circuit and its evaluation.
//!
//! The cost of an assignment is `C(z) = ½ Σ w_ij (1 - z_i z_j)` with bit 0 of
//! a node mapped to spin `+1` and bit 1 to spin `-1`, i.e. the total weight
//! of the edges crossing the partition.
//!
//! One QAOA level is a phase separator followed by a mixer. Each edge
//! `(i, j)` becomes `CNOT(i,j) · U1(-γ w_ij) on j · CNOT(i,j)`, which applies
//! the phase `e^{-iγ w_ij}` to exactly the basis states that cut the edge, so
//! a full layer is `e^{-iγ H_C}`. The mixer is `RX(β)` on every qubit,
//! i.e. `e^{-iβ H_B}` with `H_B = ½ Σ σ_x`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::gates::{duration_of, GateKind, GateOp};
use crate::linalg::{DensityMatrix, PureState};
use crate::noise::{simulate_circuit, simulate_pure, simulate_with_time_scale, DeviceModel, NoiseToggles};
use crate::MAX_QUBITS;

/// Largest graph the brute-force MaxCut oracle will enumerate.
pub const MAX_BRUTE_FORCE_NODES: usize = 24;

/// A node assignment; character `i` of the textual form is node `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Bit `i` of `index` becomes node `i`.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| 1usize << i)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    line: 1,
                    msg: format!("'{other}' is not a bit"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// An undirected weighted graph. Edge order is kept as given; the circuit
/// builder walks edges in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<Edge>,
}

pub const BUILTIN_GRAPHS: [&str; 5] = ["2n-edge", "4n-irregular", "4n-yutsis", "6n-yutsis", "6n-prism"];

impl Graph {
    pub fn new(n_nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.u >= n_nodes || e.v >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a node outside 0..{n_nodes}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop on node {}", e.u)));
            }
            if !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) has weight {}", e.u, e.v, e.weight)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        Ok(Self { n_nodes, edges })
    }

    pub fn unweighted(n_nodes: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n_nodes,
            pairs.iter().map(|&(u, v)| Edge { u, v, weight: 1.0 }).collect(),
        )
    }

    /// One of [`BUILTIN_GRAPHS`].
    pub fn builtin(name: &str) -> Result<Self> {
        let (n, pairs): (usize, Vec<(usize, usize)>) = match name {
            "2n-edge" => (2, vec![(0, 1)]),
            // A triangle with a pendant vertex.
            "4n-irregular" => (4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]),
            // K4.
            "4n-yutsis" => (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            // K3,3.
            "6n-yutsis" => (
                6,
                vec![(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
            ),
            // Two triangles joined by a perfect matching.
            "6n-prism" => (
                6,
                vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
            ),
            other => {
                return Err(Error::InvalidGraph(format!(
                    "unknown built-in graph '{other}' (known: {})",
                    BUILTIN_GRAPHS.join(", ")
                )))
            }
        };
        Self::unweighted(n, &pairs)
    }

    /// Parses the edge-list format: a header line `N M`, then `M` lines of
    /// `u v [w]`. Node indices are 0-based; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing 'N M' header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_count = |s: &str, line: usize| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("'{s}' is not a count"),
            })
        };
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: header_line,
                msg: "header must be 'N M'".into(),
            });
        }
        let n = parse_count(fields[0], header_line)?;
        let m = parse_count(fields[1], header_line)?;
        let mut edges = Vec::with_capacity(m);
        for (line, content) in lines {
            let f: Vec<&str> = content.split_whitespace().collect();
            if !(2..=3).contains(&f.len()) {
                return Err(Error::Parse {
                    line,
                    msg: "edge lines are 'u v [w]'".into(),
                });
            }
            let weight = match f.get(2) {
                Some(w) => w.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("'{w}' is not a weight"),
                })?,
                None => 1.0,
            };
            edges.push(Edge {
                u: parse_count(f[0], line)?,
                v: parse_count(f[1], line)?,
                weight,
            });
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: header_line,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    fn cut_of_index(&self, index: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| (index >> e.u ^ index >> e.v) & 1 == 1)
            .map(|e| e.weight)
            .sum()
    }
}

/// Total weight of edges whose endpoints are on different sides.
pub fn cut_value(graph: &Graph, assignment: &Bitstring) -> Result<f64> {
    if assignment.len() != graph.n_nodes {
        return Err(Error::DimensionMismatch {
            expected: graph.n_nodes,
            actual: assignment.len(),
        });
    }
    let bits = assignment.bits();
    Ok(graph
        .edges
        .iter()
        .filter(|e| bits[e.u] != bits[e.v])
        .map(|e| e.weight)
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCut {
    pub value: f64,
    pub witnesses: Vec<Bitstring>,
}

/// Exact MaxCut by enumerating all `2^N` assignments.
pub fn max_cut_brute_force(graph: &Graph) -> Result<MaxCut> {
    if graph.n_nodes > MAX_BRUTE_FORCE_NODES {
        return Err(Error::InvalidGraph(format!(
            "{} nodes exceeds the enumeration limit of {MAX_BRUTE_FORCE_NODES}",
            graph.n_nodes
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut witnesses = Vec::new();
    for index in 0..1usize << graph.n_nodes {
        let c = graph.cut_of_index(index);
        if c > best {
            best = c;
            witnesses.clear();
        }
        if c == best {
            witnesses.push(Bitstring::from_index(index, graph.n_nodes));
        }
    }
    Ok(MaxCut {
        value: best,
        witnesses,
    })
}

/// The diagonal of `H_C` in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CostDiagonal {
    pub values: Vec<f64>,
}

impl CostDiagonal {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn cost_diagonal(graph: &Graph) -> Result<CostDiagonal> {
    if graph.n_nodes > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n: graph.n_nodes,
            max: MAX_QUBITS,
        });
    }
    Ok(CostDiagonal {
        values: (0..1usize << graph.n_nodes).map(|z| graph.cut_of_index(z)).collect(),
    })
}

/// Angles of a `p`-level QAOA circuit, with `γ ∈ [0, 2π]` and `β ∈ [0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let params = Self::new_unbounded(gammas, betas)?;
        let eps = 1e-12;
        if let Some(g) = params.gammas.iter().find(|&&g| !(-eps..=TAU + eps).contains(&g)) {
            return Err(Error::InvalidParams(format!("gamma {g} is outside [0, 2π]")));
        }
        if let Some(b) = params.betas.iter().find(|&&b| !(-eps..=PI + eps).contains(&b)) {
            return Err(Error::InvalidParams(format!("beta {b} is outside [0, π]")));
        }
        Ok(params)
    }

    /// Skips the domain check, for angles outside the optimization box
    /// (periodicity studies).
    pub fn new_unbounded(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        if gammas.len() != betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} gammas but {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        if gammas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::InvalidParams("angles must be finite".into()));
        }
        Ok(Self { gammas, betas })
    }

    /// Splits an optimizer vector laid out as `γ_1..γ_p, β_1..β_p`.
    pub fn from_vector(x: &[f64]) -> Result<Self> {
        if !x.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!("odd parameter vector length {}", x.len())));
        }
        let p = x.len() / 2;
        Self::new(x[..p].to_vec(), x[p..].to_vec())
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `e^{-iγ H_C}` as CNOT·U1·CNOT blocks, one per edge in input order.
pub fn cost_layer(graph: &Graph, gamma: f64) -> Vec<GateOp> {
    graph
        .edges
        .iter()
        .flat_map(|e| {
            [
                GateOp::cnot(e.u, e.v),
                GateOp::single(GateKind::U1(-gamma * e.weight), e.v),
                GateOp::cnot(e.u, e.v),
            ]
        })
        .collect()
}

pub fn mixer_layer(n_nodes: usize, beta: f64) -> Vec<GateOp> {
    (0..n_nodes).map(|q| GateOp::single(GateKind::Rx(beta), q)).collect()
}

/// Hadamards on every node, then `p` cost/mixer levels.
pub fn build_qaoa_circuit(graph: &Graph, params: &QaoaParams) -> Vec<GateOp> {
    let n = graph.n_nodes;
    let mut gates = Vec::with_capacity(n + params.p() * (3 * graph.n_edges() + n));
    gates.extend((0..n).map(|q| GateOp::single(GateKind::H, q)));
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        gates.extend(cost_layer(graph, gamma));
        gates.extend(mixer_layer(n, beta));
    }
    gates
}

/// Serial execution time: the sum of gate durations.
pub fn circuit_latency(gates: &[GateOp], device: &DeviceModel) -> u64 {
    gates.iter().map(|g| g.duration_ns(device)).sum()
}

/// Duration of one cost layer (CHET).
pub fn cost_hamiltonian_latency(graph: &Graph, device: &DeviceModel) -> u64 {
    let e = graph.n_edges() as u64;
    2 * e * duration_of(&GateKind::Cnot, device) + e * duration_of(&GateKind::U1(0.0), device)
}

/// `(1 - e)^{2n}`: the rough fidelity of a cost layer with `n` edges, each
/// costing two CNOTs of infidelity `e`.
pub fn cost_fidelity_estimate(n_edges: usize, err_2q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&err_2q) {
        return Err(Error::InvalidProbability {
            what: "two-qubit gate error",
            value: err_2q,
        });
    }
    Ok((1.0 - err_2q).powi(2 * n_edges as i32))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub params: QaoaParams,
    pub expectation: f64,
    pub fom: f64,
    pub latency_ns: u64,
}

/// A graph bound to its cost diagonal and exact optimum.
#[derive(Debug, Clone)]
pub struct MaxCutProblem {
    graph: Graph,
    cost: CostDiagonal,
    c_max: f64,
}

impl MaxCutProblem {
    pub fn new(graph: Graph) -> Result<Self> {
        let cost = cost_diagonal(&graph)?;
        let c_max = cost.max();
        if c_max <= 0.0 {
            return Err(Error::InvalidGraph("MaxCut value is not positive".into()));
        }
        Ok(Self { graph, cost, c_max })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn cost(&self) -> &CostDiagonal {
        &self.cost
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    /// `1 - E/C_max`.
    pub fn fom(&self, expectation: f64) -> f64 {
        1.0 - expectation / self.c_max
    }

    fn check_device(&self, device: &DeviceModel) -> Result<()> {
        if self.graph.n_nodes > device.n_qubits {
            return Err(Error::InvalidGraph(format!(
                "{} nodes do not fit on a {}-qubit device",
                self.graph.n_nodes, device.n_qubits
            )));
        }
        Ok(())
    }

    /// Final QAOA state as a density matrix.
    pub fn final_state(&self, params: &QaoaParams, device: &DeviceModel, toggles: NoiseToggles) -> Result<DensityMatrix> {
        self.check_device(device)?;
        let gates = build_qaoa_circuit(&self.graph, params);
        let initial = DensityMatrix::zero_state(self.graph.n_nodes)?;
        simulate_circuit(&gates, device, toggles, &initial)
    }

    /// `E_p(γ, β)`. Noiseless runs use state-vector evolution, which gives
    /// the same value as the density-matrix route.
    pub fn expectation(&self, params: &QaoaParams, device: &DeviceModel, toggles: NoiseToggles) -> Result<f64> {
        if toggles.is_noiseless() {
            self.check_device(device)?;
            let gates = build_qaoa_circuit(&self.graph, params);
            let psi = simulate_pure(&gates, &PureState::basis(self.graph.n_nodes, 0)?)?;
            psi.expectation_diag(&self.cost.values)
        } else {
            self.final_state(params, device, toggles)?
                .expectation_diag(&self.cost.values)
        }
    }

    pub fn evaluate(&self, params: &QaoaParams, device: &DeviceModel, toggles: NoiseToggles) -> Result<EvalRecord> {
        let expectation = self.expectation(params, device, toggles)?;
        let latency_ns = circuit_latency(&build_qaoa_circuit(&self.graph, params), device);
        Ok(EvalRecord {
            params: params.clone(),
            expectation,
            fom: self.fom(expectation),
            latency_ns,
        })
    }
}

pub fn evaluate(graph: &Graph, params: &QaoaParams, device: &DeviceModel, toggles: NoiseToggles) -> Result<EvalRecord> {
    MaxCutProblem::new(graph.clone())?.evaluate(params, device, toggles)
}

/// Measures `rho` in the computational basis `shots` times.
pub fn sample_counts(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<BTreeMap<Bitstring, u64>> {
    if shots == 0 {
        return Err(Error::InvalidParams("shots must be at least 1".into()));
    }
    let n = rho.n_qubits();
    let probs: Vec<f64> = rho.populations().into_iter().map(|p| p.max(0.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    // Multinomial as a chain of conditional binomials.
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().sum();
    for (index, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if index + 1 == probs.len() || p >= mass {
            remaining
        } else if p <= 0.0 {
            0
        } else {
            Binomial::new(remaining, (p / mass).min(1.0))
                .map_err(|e| Error::InvalidState(e.to_string()))?
                .sample(&mut rng)
        };
        if k > 0 {
            counts.insert(Bitstring::from_index(index, n), k);
        }
        remaining -= k;
        mass -= p;
    }
    Ok(counts)
}

/// Mean cut value over a measurement histogram.
pub fn estimate_expectation_from_samples(counts: &BTreeMap<Bitstring, u64>, graph: &Graph) -> Result<f64> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let mut acc = 0.0;
    for (bits, &k) in counts {
        acc += cut_value(graph, bits)? * k as f64;
    }
    Ok(acc / total as f64)
}

/// Fidelity of one noisy cost layer applied to `|+⟩^⊗N`, against the ideal
/// output. Elapsed times are multiplied by `t_scale`, which is the same as
/// dividing both coherence times by it.
pub fn cost_layer_state_fidelity(
    graph: &Graph,
    gamma: f64,
    device: &DeviceModel,
    toggles: NoiseToggles,
    t_scale: f64,
) -> Result<f64> {
    let n = graph.n_nodes;
    let layer = cost_layer(graph, gamma);
    let plus = PureState::plus(n)?;
    let ideal = simulate_pure(&layer, &plus)?;
    let noisy = simulate_with_time_scale(&layer, device, toggles, &plus.to_density(), t_scale)?;
    noisy.fidelity_to_pure(&ideal)
}
