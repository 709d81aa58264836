use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use qaoa_noise::noise::NoiseSeries;
use qaoa_noise::qaoa::BUILTIN_GRAPHS;
use qaoa_noise::{DeConfig, DeviceModel, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    FomTable,
    Sweep(SweepTarget),
    Landscape,
    Motivation,
    LatencyReport,
}

/// The device parameter a multiplier sweep scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    T1,
    T2,
    Ge1,
    Ge2,
}

impl SweepTarget {
    pub fn default_multipliers(self) -> Vec<f64> {
        match self {
            Self::T1 => vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            Self::T2 => vec![0.5, 1.0, 2.0, 4.0, 6.0, 8.0],
            Self::Ge1 | Self::Ge2 => vec![0.25, 0.5, 0.6, 0.75, 1.0],
        }
    }

    /// The noise series whose sensitivity the sweep probes.
    pub fn default_series(self) -> NoiseSeries {
        match self {
            Self::T1 => NoiseSeries::T1,
            Self::T2 => NoiseSeries::T2,
            Self::Ge1 | Self::Ge2 => NoiseSeries::GateError,
        }
    }

    pub fn apply(self, device: &DeviceModel, multiplier: f64) -> DeviceModel {
        let mut scaled = device.clone();
        match self {
            Self::T1 => scaled.scales.t1 *= multiplier,
            Self::T2 => scaled.scales.t2 *= multiplier,
            Self::Ge1 => scaled.scales.ge1 *= multiplier,
            Self::Ge2 => scaled.scales.ge2 *= multiplier,
        }
        scaled
    }
}

impl ExperimentKind {
    pub const ALL: [Self; 8] = [
        Self::FomTable,
        Self::Sweep(SweepTarget::T1),
        Self::Sweep(SweepTarget::T2),
        Self::Sweep(SweepTarget::Ge1),
        Self::Sweep(SweepTarget::Ge2),
        Self::Landscape,
        Self::Motivation,
        Self::LatencyReport,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::FomTable => "fom-table",
            Self::Sweep(SweepTarget::T1) => "t1-sweep",
            Self::Sweep(SweepTarget::T2) => "t2-sweep",
            Self::Sweep(SweepTarget::Ge1) => "ge1-sweep",
            Self::Sweep(SweepTarget::Ge2) => "ge2-sweep",
            Self::Landscape => "landscape",
            Self::Motivation => "motivation",
            Self::LatencyReport => "latency-report",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .with_context(|| format!("unknown experiment '{s}'"))
    }
}

/// A graph together with the name it is reported under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub label: String,
    pub graph: Graph,
}

/// Accepts a built-in name or a path to an edge-list file.
pub fn resolve_graph(reference: &str) -> Result<NamedGraph> {
    if BUILTIN_GRAPHS.contains(&reference) {
        return Ok(NamedGraph {
            label: reference.to_string(),
            graph: Graph::builtin(reference)?,
        });
    }
    let path = Path::new(reference);
    if !path.is_file() {
        bail!(
            "unknown graph '{reference}': not a built-in ({}) and no such file",
            BUILTIN_GRAPHS.join(", ")
        );
    }
    let graph = Graph::load(path).with_context(|| format!("reading graph file {reference}"))?;
    Ok(NamedGraph {
        label: reference.to_string(),
        graph,
    })
}

/// Everything needed to run one experiment reproducibly.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub graphs: Vec<NamedGraph>,
    pub p_min: usize,
    pub p_max: usize,
    pub series: Vec<NoiseSeries>,
    /// Sweep multipliers; experiments without a sweep use `[1.0]`.
    pub multipliers: Vec<f64>,
    /// Grid points per axis for landscapes and the motivation sweep.
    pub resolution: usize,
    pub seed: u64,
    pub device: DeviceModel,
    /// Optimizer settings; its seed is overwritten per cell.
    pub optimizer: DeConfig,
}

impl ExperimentSpec {
    /// The defaults of `kind`: graphs, p range, series, multipliers and
    /// resolution as the experiment is usually run.
    pub fn defaults(kind: ExperimentKind) -> Result<Self> {
        let names: &[&str] = match kind {
            ExperimentKind::FomTable | ExperimentKind::LatencyReport => &BUILTIN_GRAPHS,
            ExperimentKind::Sweep(_) => &["6n-yutsis"],
            ExperimentKind::Landscape => &["4n-yutsis"],
            ExperimentKind::Motivation => &[],
        };
        let graphs = names.iter().map(|n| resolve_graph(n)).collect::<Result<_>>()?;
        let (p_min, p_max) = match kind {
            ExperimentKind::Landscape | ExperimentKind::Motivation => (1, 1),
            _ => (1, 4),
        };
        let series = match kind {
            ExperimentKind::FomTable => NoiseSeries::ALL.to_vec(),
            ExperimentKind::Sweep(target) => vec![target.default_series()],
            ExperimentKind::Landscape | ExperimentKind::Motivation => vec![NoiseSeries::Pure, NoiseSeries::Combined],
            ExperimentKind::LatencyReport => vec![],
        };
        let multipliers = match kind {
            ExperimentKind::Sweep(target) => target.default_multipliers(),
            _ => vec![1.0],
        };
        let resolution = match kind {
            ExperimentKind::Motivation => 100,
            _ => 50,
        };
        Ok(Self {
            kind,
            graphs,
            p_min,
            p_max,
            series,
            multipliers,
            resolution,
            seed: 0,
            device: DeviceModel::default(),
            optimizer: DeConfig::default(),
        })
    }

    pub fn p_values(&self) -> std::ops::RangeInclusive<usize> {
        self.p_min..=self.p_max
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        if self.p_min < 1 {
            bail!("p must be at least 1");
        }
        if self.p_min > self.p_max {
            bail!("p range {}..{} is empty", self.p_min, self.p_max);
        }
        if self.multipliers.is_empty() {
            bail!("no multipliers given");
        }
        if let Some(m) = self.multipliers.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            bail!("multiplier {m} is not positive");
        }
        let needs_graphs = !matches!(self.kind, ExperimentKind::Motivation);
        if needs_graphs && self.graphs.is_empty() {
            bail!("no graphs given");
        }
        for g in &self.graphs {
            if g.graph.n_nodes() > self.device.n_qubits {
                bail!(
                    "graph '{}' has {} nodes but the device has {} qubits",
                    g.label,
                    g.graph.n_nodes(),
                    self.device.n_qubits
                );
            }
        }
        let needs_series = !matches!(self.kind, ExperimentKind::LatencyReport);
        if needs_series && self.series.is_empty() {
            bail!("no noise series given");
        }
        match self.kind {
            ExperimentKind::Landscape => {
                if self.p_min != 1 || self.p_max != 1 {
                    bail!("landscapes are two-dimensional and need p = 1");
                }
                if self.resolution < 2 {
                    bail!("resolution must be at least 2");
                }
            }
            ExperimentKind::Motivation if self.resolution < 2 => bail!("resolution must be at least 2"),
            _ => {}
        }
        Ok(())
    }
}
