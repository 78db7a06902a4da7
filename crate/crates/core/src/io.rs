//! Text formats read and written by the `qeci` binary.
//!
//! * Density file: JSON `{"dims": [2, 2], "matrix": [[[re, im], ...], ...]}`, row-major.
//! * Marginals file: JSON array of probability rows, e.g. `[[0.05, 0.95], [0.05, 0.95]]`.
//! * Joint table: CSV with a mandatory header `b0,b1,...` and one row per value of A.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::causal::JointDistribution;
use crate::density::{validate_density, DensityMatrix};
use crate::error::Error;
use crate::linalg::{Complex, ComplexMatrix};

#[derive(Debug, Error)]
pub enum FormatError {
    /// The text is not in the expected format.
    #[error("parse error: {0}")]
    Parse(String),
    /// The text parsed but the value violates a contract.
    #[error("{0}")]
    Invalid(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl DensityFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        Self {
            dims: rho.dims().to_vec(),
            matrix: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, FormatError> {
        let n = self.matrix.len();
        if self.matrix.iter().any(|r| r.len() != n) {
            return Err(FormatError::Parse(format!(
                "matrix must be square; expected {n} entries per row"
            )));
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(|&[re, im]| Complex::new(re, im))
            .collect();
        Ok(ComplexMatrix::new(n, n, data)?)
    }

    pub fn to_density(&self, tol: f64) -> Result<DensityMatrix, FormatError> {
        Ok(validate_density(self.to_matrix()?, &self.dims, tol)?)
    }
}

pub fn parse_density_file(text: &str) -> Result<DensityFile, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
}

pub fn read_density(text: &str, tol: f64) -> Result<DensityMatrix, FormatError> {
    parse_density_file(text)?.to_density(tol)
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&DensityFile::from_density(rho)).expect("plain data serializes")
}

pub fn parse_marginal_rows(text: &str) -> Result<Vec<Vec<f64>>, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))
}

/// Reads a joint table from CSV (with header) or from a JSON array of rows.
pub fn read_joint_table(text: &str) -> Result<JointDistribution, FormatError> {
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?
    } else {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| FormatError::Parse(e.to_string()))?;
            let row = record
                .iter()
                .map(|field| {
                    field
                        .parse::<f64>()
                        .map_err(|e| FormatError::Parse(format!("`{field}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        rows
    };
    Ok(JointDistribution::new(rows)?)
}

pub fn write_joint_table(joint: &JointDistribution, out: impl Write) -> std::io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record((0..joint.cols()).map(|j| format!("b{j}")))?;
    for row in joint.as_rows() {
        writer.write_record(row.iter().map(|x| x.to_string()))?;
    }
    writer.flush()
}
