//! Row-major JSON forms for nalgebra matrices and vectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct RowMajor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

pub fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    RowMajor { rows: m.nrows(), cols: m.ncols(), data: to_row_major(m) }.serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
    let rm = RowMajor::deserialize(d)?;
    if rm.rows * rm.cols != rm.data.len() {
        return Err(serde::de::Error::custom(format!(
            "matrix data has {} entries, expected {}x{}",
            rm.data.len(),
            rm.rows,
            rm.cols
        )));
    }
    Ok(DMatrix::from_row_slice(rm.rows, rm.cols, &rm.data))
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DVector<f64>, D::Error> {
        Ok(DVector::from_vec(Vec::<f64>::deserialize(d)?))
    }
}
