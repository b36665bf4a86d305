//! Result rows, CSV serialization and the JSON metadata sidecar.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// Outage at the swept `α`.
    Point,
    /// Minimum over `α`.
    Optimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub sweep_variable: String,
    pub sweep_value: String,
    pub family_variable: String,
    pub family_value: String,
    pub mu_e_db: String,
    pub allocation: String,
    pub evaluator: String,
    pub kind: RowKind,
    pub alpha: Option<f64>,
    pub alpha_star: Option<f64>,
    pub outage: f64,
    pub standard_error: f64,
    pub trials: usize,
    pub h_realizations: usize,
    /// No feasible `α`: the secrecy rate exceeds Bob's capacity.
    pub infeasible: bool,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub scenario: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub workers: usize,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<Row>,
    pub meta: Metadata,
}

impl ResultTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.json`; returns the CSV path.
    pub fn save(&self, dir: &Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.meta.scenario));
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        let meta = serde_json::to_string_pretty(&self.meta).expect("metadata serializes");
        std::fs::write(dir.join(format!("{}.meta.json", self.meta.scenario)), meta + "\n")?;
        Ok(csv_path)
    }
}

pub fn write_rows<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(true)
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}
