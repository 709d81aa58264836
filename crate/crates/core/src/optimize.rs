//! Global parameter search: differential evolution and grid scans.
//!
//! Both minimize. QAOA objectives are phrased as the figure of merit
//! `1 - E/C_max`, so minimizing it maximizes the expectation.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest dimensionality [`grid_scan`] accepts.
pub const MAX_GRID_DIMS: usize = 4;

/// A box of per-dimension `(low, high)` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds(Vec<(f64, f64)>);

impl Bounds {
    pub fn new(limits: Vec<(f64, f64)>) -> Result<Self> {
        if limits.is_empty() {
            return Err(Error::InvalidOptimizer("bounds have no dimensions".into()));
        }
        for &(lo, hi) in &limits {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidOptimizer(format!("invalid interval [{lo}, {hi}]")));
            }
        }
        Ok(Self(limits))
    }

    /// `γ_1..γ_p ∈ [0, 2π]` followed by `β_1..β_p ∈ [0, π]`.
    pub fn qaoa(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        let mut limits = vec![(0.0, TAU); p];
        limits.extend(std::iter::repeat_n((0.0, PI), p));
        Self::new(limits)
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn limits(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.0.len() && x.iter().zip(&self.0).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

/// rand/1/bin settings. `population = None` means `max(20, 15·D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeConfig {
    pub population: Option<usize>,
    /// The differential weight is redrawn uniformly from this range at every
    /// generation.
    pub mutation: (f64, f64),
    pub crossover: f64,
    pub max_generations: usize,
    /// Stop once `max - min` of the population objectives is at most
    /// `tolerance · max(|mean|, 1)`.
    pub tolerance: f64,
    pub seed: u64,
    /// Replaces the first member of the initial population.
    pub initial: Option<Vec<f64>>,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population: None,
            mutation: (0.5, 1.0),
            crossover: 0.7,
            max_generations: 200,
            tolerance: 1e-6,
            seed: 0,
            initial: None,
        }
    }
}

impl DeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn population_for(&self, dims: usize) -> usize {
        self.population.unwrap_or_else(|| (15 * dims).max(20))
    }

    fn validate(&self, bounds: &Bounds) -> Result<()> {
        let pop = self.population_for(bounds.dims());
        if pop < 4 {
            return Err(Error::InvalidOptimizer(format!("population {pop} is below 4")));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::InvalidOptimizer(format!("crossover {} is outside [0, 1]", self.crossover)));
        }
        let (f_lo, f_hi) = self.mutation;
        if !(f_lo.is_finite() && f_hi.is_finite() && 0.0 <= f_lo && f_lo <= f_hi && f_hi <= 2.0) {
            return Err(Error::InvalidOptimizer(format!("mutation range {:?} is invalid", self.mutation)));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidOptimizer("tolerance must be non-negative".into()));
        }
        if let Some(x0) = &self.initial {
            if !bounds.contains(x0) {
                return Err(Error::InvalidOptimizer(format!("initial point {x0:?} is outside the bounds")));
            }
        }
        Ok(())
    }

    /// One-line description for result metadata.
    pub fn describe(&self, dims: usize) -> String {
        format!(
            "differential-evolution rand/1/bin population={} mutation=[{}, {}] crossover={} max_generations={} tolerance={:e}",
            self.population_for(dims),
            self.mutation.0,
            self.mutation.1,
            self.crossover,
            self.max_generations,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Best objective after initialization and after each generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub generations: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn evaluate_all<F>(objective: &F, points: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    points.par_iter().map(|x| sanitize(objective(x))).collect()
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
}

/// Minimizes `objective` over `bounds` with rand/1/bin differential
/// evolution.
///
/// All random draws happen on the optimizer's own generator between
/// generations; objective calls inside a generation run in parallel and
/// cannot influence each other, so the result depends only on the seed.
pub fn differential_evolution<F>(objective: F, bounds: &Bounds, config: &DeConfig) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate(bounds)?;
    let dims = bounds.dims();
    let pop = config.population_for(dims);
    let limits = bounds.limits();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Latin hypercube initialization.
    let mut population = vec![vec![0.0; dims]; pop];
    for (d, &(lo, hi)) in limits.iter().enumerate() {
        let mut strata: Vec<usize> = (0..pop).collect();
        strata.shuffle(&mut rng);
        for (member, s) in population.iter_mut().zip(strata) {
            let u = (s as f64 + rng.random::<f64>()) / pop as f64;
            member[d] = lo + u * (hi - lo);
        }
    }
    if let Some(x0) = &config.initial {
        population[0] = x0.clone();
    }

    let mut values = evaluate_all(&objective, &population);
    let mut evaluations = pop;
    let mut best = argmin(&values);
    let mut history = vec![values[best]];
    let mut generations = 0;
    let mut converged = false;

    while generations < config.max_generations {
        let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - values.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = values.iter().sum::<f64>() / pop as f64;
        if spread.is_finite() && spread <= config.tolerance * mean.abs().max(1.0) {
            converged = true;
            break;
        }

        let weight = rng.random_range(config.mutation.0..=config.mutation.1);
        let trials: Vec<Vec<f64>> = (0..pop)
            .map(|i| {
                let mut pick = || loop {
                    let k = rng.random_range(0..pop);
                    if k != i {
                        break k;
                    }
                };
                let a = pick();
                let b = loop {
                    let k = pick();
                    if k != a {
                        break k;
                    }
                };
                let c = loop {
                    let k = pick();
                    if k != a && k != b {
                        break k;
                    }
                };
                let forced = rng.random_range(0..dims);
                (0..dims)
                    .map(|j| {
                        if j == forced || rng.random::<f64>() < config.crossover {
                            let (lo, hi) = limits[j];
                            let v = population[a][j] + weight * (population[b][j] - population[c][j]);
                            if (lo..=hi).contains(&v) {
                                v
                            } else {
                                rng.random_range(lo..=hi)
                            }
                        } else {
                            population[i][j]
                        }
                    })
                    .collect()
            })
            .collect();

        let trial_values = evaluate_all(&objective, &trials);
        evaluations += pop;
        for (i, (trial, value)) in trials.into_iter().zip(trial_values).enumerate() {
            if value <= values[i] {
                population[i] = trial;
                values[i] = value;
            }
        }
        best = argmin(&values);
        history.push(values[best]);
        generations += 1;
    }

    Ok(OptResult {
        best_params: population[best].clone(),
        best_value: values[best],
        history,
        evaluations,
        generations,
        converged,
    })
}

/// Objective values on a full Cartesian grid, endpoints included. Points are
/// laid out row-major with the last dimension varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Index of the smallest value (first one on ties).
    pub best_index: usize,
}

impl Landscape {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            coords[d] = axis[rem % axis.len()];
            rem /= axis.len();
        }
        coords
    }

    pub fn best_point(&self) -> Vec<f64> {
        self.point(self.best_index)
    }

    pub fn best_value(&self) -> f64 {
        self.values[self.best_index]
    }

    /// Index of the largest value (first one on ties).
    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
            .0
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

pub fn grid_scan<F>(objective: F, bounds: &Bounds, resolution: usize) -> Result<Landscape>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if resolution < 2 {
        return Err(Error::InvalidOptimizer(format!("grid resolution {resolution} is below 2")));
    }
    if bounds.dims() > MAX_GRID_DIMS {
        return Err(Error::InvalidOptimizer(format!(
            "grid scan over {} dimensions exceeds the limit of {MAX_GRID_DIMS}",
            bounds.dims()
        )));
    }
    let axes: Vec<Vec<f64>> = bounds
        .limits()
        .iter()
        .map(|&(lo, hi)| linspace(lo, hi, resolution))
        .collect();
    let total = resolution.pow(bounds.dims() as u32);
    let mut landscape = Landscape {
        axes,
        values: Vec::new(),
        best_index: 0,
    };
    landscape.values = (0..total)
        .into_par_iter()
        .map(|i| sanitize(objective(&landscape.point(i))))
        .collect();
    landscape.best_index = argmin(&landscape.values);
    Ok(landscape)
}
