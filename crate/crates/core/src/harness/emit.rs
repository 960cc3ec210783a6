use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, OutputFormat, SummarySeries};

/// One output record. CSV columns and JSON keys use these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub time: usize,
    pub strategy: String,
    pub mean_infection: f64,
    pub stderr: f64,
    pub trials: usize,
}

const HEADER: [&str; 5] = ["time", "strategy", "mean_infection", "stderr", "trials"];

fn rows(series: &[SummarySeries]) -> impl Iterator<Item = SeriesRow> + '_ {
    series.iter().flat_map(SummarySeries::rows)
}

pub fn write_csv<W: Write>(series: &[SummarySeries], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in rows(series) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(series: &[SummarySeries], mut out: W) -> Result<(), HarnessError> {
    let all: Vec<SeriesRow> = rows(series).collect();
    serde_json::to_writer_pretty(&mut out, &all)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SeriesRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<SeriesRow>, HarnessError> {
    Ok(serde_json::from_reader(input)?)
}

/// Writes every arm's series to `path`, arms in the given order and times ascending.
pub fn emit(
    series: &[SummarySeries],
    format: OutputFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(series, &mut out)?,
        OutputFormat::Json => write_json(series, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SummarySeries {
        SummarySeries {
            strategy: "init:ii".into(),
            trials: 7,
            mean: vec![0.1, 1.0 / 3.0, 0.123_456_789_012_345_68],
            stderr: vec![0.0, 1e-17, std::f64::consts::PI / 1e5],
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "time,strategy,mean_infection,stderr,trials\n"
        );
    }

    #[test]
    fn csv_round_trip() {
        let s = sample();
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&s), &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 4);
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, s.rows().collect::<Vec<_>>());
    }

    #[test]
    fn json_round_trip() {
        let s = sample();
        let mut buf = Vec::new();
        write_json(std::slice::from_ref(&s), &mut buf).unwrap();
        let back = read_json(buf.as_slice()).unwrap();
        assert_eq!(back, s.rows().collect::<Vec<_>>());
    }
}
