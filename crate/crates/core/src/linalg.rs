//! Small dense linear-algebra helpers shared across modules.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Row-major dense matrix as stored in JSON artifacts.
#[derive(Serialize, Deserialize)]
struct RowMajor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// `#[serde(with = "crate::linalg::row_major")]` for `DMatrix<f64>` fields.
pub mod row_major {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            data.extend(m.row(r).iter().copied());
        }
        RowMajor {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rm = RowMajor::deserialize(d)?;
        if rm.rows * rm.cols != rm.data.len() {
            return Err(serde::de::Error::custom(format!(
                "matrix {}x{} has {} values",
                rm.rows,
                rm.cols,
                rm.data.len()
            )));
        }
        Ok(DMatrix::from_row_slice(rm.rows, rm.cols, &rm.data))
    }
}

/// Cosine dissimilarity `1 - cos(a, b)` between all pairs of rows, clamped to
/// `[0, 2]` with an exact zero diagonal. Returns the index of the first zero
/// row on failure.
pub fn cosine_dissimilarity(rows: &DMatrix<f64>) -> Result<DMatrix<f64>, usize> {
    let n = rows.nrows();
    let norms: Vec<f64> = (0..n).map(|i| rows.row(i).norm()).collect();
    if let Some(i) = norms.iter().position(|&v| v == 0.0 || !v.is_finite()) {
        return Err(i);
    }
    let mut d = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let cos = rows.row(a).dot(&rows.row(b)) / (norms[a] * norms[b]);
            let v = (1.0 - cos).clamp(0.0, 2.0);
            d[(a, b)] = v;
            d[(b, a)] = v;
        }
    }
    Ok(d)
}

/// Dissimilarity matrix document written by `act dissim`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DissimilarityMatrix {
    pub terms: Vec<String>,
    #[serde(with = "row_major")]
    pub values: DMatrix<f64>,
}

pub(crate) fn frobenius_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}
