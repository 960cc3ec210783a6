use std::io::Write;

use serde::{Deserialize, Serialize};

use super::UrnState;

/// One `(time, node)` record of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time: usize,
    pub node: usize,
    #[serde(rename = "Z")]
    pub z: u8,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub time: usize,
    pub susceptibility: f64,
    pub exposure: f64,
    pub fraction_infected: f64,
}

/// Collects per-node and per-time records while a trial runs.
#[derive(Debug, Default)]
pub struct TraceRecorder {
    rows: Vec<TraceRow>,
    summary: Vec<SummaryRow>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Call after each step with the draws just made. Node ids are written 1-indexed.
    pub fn record(&mut self, state: &UrnState<'_>, draws: &[bool]) {
        let metrics = state.metrics();
        let time = state.time();
        for (i, &z) in draws.iter().enumerate() {
            self.rows.push(TraceRow {
                time,
                node: i + 1,
                z: z as u8,
                u: metrics.urn_proportions[i],
                s: metrics.super_proportions[i],
            });
        }
        self.summary.push(SummaryRow {
            time,
            susceptibility: metrics.susceptibility,
            exposure: metrics.exposure,
            fraction_infected: draws.iter().filter(|&&z| z).count() as f64 / draws.len() as f64,
        });
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn summary(&self) -> &[SummaryRow] {
        &self.summary
    }

    /// Columns `time,node,Z,U,S`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_rows(out, &self.rows, &["time", "node", "Z", "U", "S"])
    }

    /// Columns `time,susceptibility,exposure,fraction_infected`.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_rows(
            out,
            &self.summary,
            &["time", "susceptibility", "exposure", "fraction_infected"],
        )
    }
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T], header: &[&str]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Reinforcement;
    use crate::graph::Network;

    #[test]
    fn trace_csv_layout() {
        let net = Network::path(2);
        let mut state = UrnState::new(&net, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        let mut rec = TraceRecorder::new();
        let z = state
            .step(&Reinforcement::uniform(2, 1.0, 1.0), &[0.1, 0.9])
            .unwrap();
        rec.record(&state, &z);
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "time,node,Z,U,S");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,1,1,"));
        assert_eq!(rec.summary()[0].fraction_infected, 0.5);

        let mut buf = Vec::new();
        rec.write_summary_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,susceptibility,exposure,fraction_infected\n"));
    }

    #[test]
    fn empty_trace_is_header_only() {
        let rec = TraceRecorder::new();
        let mut buf = Vec::new();
        rec.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "time,node,Z,U,S\n");
    }
}
