use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::runners::{LandscapeRow, LatencyRow, MotivationRow, ResultRow};
use crate::spec::{ExperimentKind, ExperimentSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Results(Vec<ResultRow>),
    Landscape(Vec<LandscapeRow>),
    Motivation(Vec<MotivationRow>),
    Latency(Vec<LatencyRow>),
}

impl Report {
    pub fn len(&self) -> usize {
        match self {
            Self::Results(r) => r.len(),
            Self::Landscape(r) => r.len(),
            Self::Motivation(r) => r.len(),
            Self::Latency(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `#` comment lines describing the run, then the table.
    pub fn write_csv<W: Write>(&self, spec: &ExperimentSpec, mut out: W) -> Result<()> {
        for line in metadata(spec) {
            writeln!(out, "# {line}")?;
        }
        match self {
            Self::Results(r) => write_rows(r, out),
            Self::Landscape(r) => write_rows(r, out),
            Self::Motivation(r) => write_rows(r, out),
            Self::Latency(r) => write_rows(r, out),
        }
    }

    pub fn to_csv_string(&self, spec: &ExperimentSpec) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(spec, &mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

fn write_rows<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn metadata(spec: &ExperimentSpec) -> Vec<String> {
    let d = &spec.device;
    let mut lines = vec![
        format!("experiment: {}", spec.kind),
        format!(
            "device: n_qubits={} t1_us={} t2_us={} err_1q={} err_2q={} u1_ns={} u2_ns={} u3_ns={} cnot_ns={} \
             scale_t1={} scale_t2={} scale_ge1={} scale_ge2={}",
            d.n_qubits,
            d.t1_us,
            d.t2_us,
            d.err_1q,
            d.err_2q,
            d.durations_ns.u1,
            d.durations_ns.u2,
            d.durations_ns.u3,
            d.durations_ns.cnot,
            d.scales.t1,
            d.scales.t2,
            d.scales.ge1,
            d.scales.ge2
        ),
    ];
    match spec.kind {
        ExperimentKind::FomTable | ExperimentKind::Sweep(_) => {
            lines.push(format!("base_seed: {}", spec.seed));
            for p in spec.p_values() {
                lines.push(format!("optimizer p={p}: {}", spec.optimizer.describe(2 * p)));
            }
        }
        ExperimentKind::Landscape | ExperimentKind::Motivation => {
            lines.push(format!("resolution: {}", spec.resolution));
        }
        ExperimentKind::LatencyReport => {}
    }
    lines
}
