//! `runs.csv` rows.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RUNS_HEADER: [&str; 11] = [
    "run_id",
    "algo",
    "problem",
    "noise",
    "T",
    "seed",
    "candidate_kind",
    "f_gap",
    "grad_norm_sq",
    "oracle_calls",
    "wall_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub algo: String,
    pub problem: String,
    pub noise: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    pub candidate_kind: String,
    /// `NaN` when `f*` is unknown.
    pub f_gap: f64,
    pub grad_norm_sq: f64,
    pub oracle_calls: u64,
    pub wall_ms: u64,
}

pub fn write_runs<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(RUNS_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_runs`]; the header must match exactly.
pub fn read_runs<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(RUNS_HEADER.iter().copied()) {
        return Err(Error::Config(format!("unexpected runs.csv header: {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}
