//! Multidimensional discrete-time signals and their file forms.
//!
//! JSON form: `{"name": ..., "dim": M, "samples": [[...M values], ...]}`.
//! CSV form: one row per timestep, one column per dimension, optional header.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVectorView};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A driving signal. Column `n` of the backing matrix is the sample at time `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    name: String,
    data: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    name: String,
    dim: usize,
    samples: Vec<Vec<f64>>,
}

impl Pattern {
    pub fn new(name: impl Into<String>, samples: Vec<Vec<f64>>) -> Result<Self> {
        let dim = samples.first().map(Vec::len).ok_or_else(|| {
            Error::InvalidPattern("pattern needs at least one sample".into())
        })?;
        Self::with_dim(name, dim, samples)
    }

    fn with_dim(name: impl Into<String>, dim: usize, samples: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPattern("dimension must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::InvalidPattern("pattern needs at least one sample".into()));
        }
        let mut data = DMatrix::zeros(dim, samples.len());
        for (n, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::InvalidPattern(format!(
                    "sample {n} has {} entries, expected {dim}",
                    s.len()
                )));
            }
            for (d, &v) in s.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidPattern(format!("non-finite value at sample {n}")));
                }
                data[(d, n)] = v;
            }
        }
        Ok(Self { name: name.into(), data })
    }

    /// One-dimensional pattern from a scalar sequence.
    pub fn scalar(name: impl Into<String>, values: &[f64]) -> Result<Self> {
        Self::new(name, values.iter().map(|&v| vec![v]).collect())
    }

    /// Wraps a `dim × len` matrix whose columns are timesteps.
    pub fn from_matrix(name: impl Into<String>, data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidPattern("empty pattern matrix".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPattern("non-finite entries".into()));
        }
        Ok(Self { name: name.into(), data })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn sample(&self, n: usize) -> DVectorView<'_, f64> {
        self.data.column(n)
    }

    /// Values of one signal dimension over time.
    pub fn channel(&self, d: usize) -> Vec<f64> {
        self.data.row(d).iter().copied().collect()
    }

    /// Sub-pattern `[start, start + len)`.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.len() {
            return Err(Error::TooShort { len: self.len(), washout: start + len });
        }
        Ok(Self {
            name: self.name.clone(),
            data: self.data.columns(start, len).into_owned(),
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { name: self.name.clone(), data: &self.data * factor }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&PatternJson {
            name: self.name.clone(),
            dim: self.dim(),
            samples: self.data.column_iter().map(|c| c.iter().copied().collect()).collect(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: PatternJson = serde_json::from_str(text)?;
        Self::with_dim(j.name, j.dim, j.samples)
    }

    /// Reads CSV rows as timesteps. A first row that does not parse as numbers
    /// is taken as a header; a header starting with `t` marks a time column,
    /// which is dropped (the form [`Pattern::write_csv`] produces).
    pub fn from_csv_reader(name: impl Into<String>, reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut samples = Vec::new();
        let mut skip = 0;
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().skip(skip).map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => samples.push(row),
                Err(_) if i == 0 => {
                    if record.get(0).is_some_and(|h| h.eq_ignore_ascii_case("t")) {
                        skip = 1;
                    }
                }
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
            }
        }
        Self::new(name, samples)
    }

    /// Loads a pattern from a `.json` or `.csv` file; CSV patterns take the
    /// file stem as their name.
    pub fn load(path: &Path) -> Result<Self> {
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&std::fs::read_to_string(path)?)
        } else {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "pattern".into());
            Self::from_csv_reader(name, File::open(path)?)
        }
    }

    /// CSV with a header row `t,y0,y1,...`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dim()).map(|d| format!("y{d}")));
        w.write_record(&header)?;
        for (n, col) in self.data.column_iter().enumerate() {
            let mut row = vec![n.to_string()];
            row.extend(col.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_samples() {
        assert!(Pattern::new("p", vec![vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(Pattern::scalar("p", &[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn rejects_empty() {
        assert!(Pattern::new("p", vec![]).is_err());
    }

    #[test]
    fn csv_round_trip_drops_time_column() {
        let p = Pattern::new("p", vec![vec![0.5, -1.0], vec![0.25, 2.0]]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        p.write_csv(&path).unwrap();
        assert_eq!(Pattern::load(&path).unwrap(), p);
    }

    #[test]
    fn csv_header_is_optional() {
        let with = Pattern::from_csv_reader("a", "x,y\n1,2\n3,4\n".as_bytes()).unwrap();
        let without = Pattern::from_csv_reader("a", "1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(with, without);
        assert_eq!(with.dim(), 2);
        assert_eq!(with.len(), 2);
        assert_eq!(with.sample(1)[0], 3.0);
    }

    #[test]
    fn csv_rejects_garbage_after_header() {
        assert!(Pattern::from_csv_reader("a", "x\n1\nfoo\n".as_bytes()).is_err());
    }

    #[test]
    fn json_checks_declared_dim() {
        let bad = r#"{"name":"p","dim":2,"samples":[[1.0]]}"#;
        assert!(Pattern::from_json(bad).is_err());
        let good = r#"{"name":"p","dim":1,"samples":[[1.0],[2.0]]}"#;
        let p = Pattern::from_json(good).unwrap();
        assert_eq!(p.channel(0), vec![1.0, 2.0]);
        assert_eq!(Pattern::from_json(&p.to_json().unwrap()).unwrap(), p);
    }
}
