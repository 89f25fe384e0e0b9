use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::corpus::{QueryVector, TermDocMatrix};
use crate::linalg::{cosine_dissimilarity, row_major};
use crate::{Error, Result};

/// Truncated SVD `N ~ U diag(S) V^T` of a term-document matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdModel {
    pub terms: Vec<String>,
    pub k: usize,
    pub num_tracks: usize,
    /// terms x k
    #[serde(with = "row_major")]
    pub u: DMatrix<f64>,
    /// descending, strictly positive
    pub s: Vec<f64>,
    /// tracks x k
    #[serde(with = "row_major")]
    pub v: DMatrix<f64>,
}

/// Top-`k` singular triplets of the dense TF-IDF matrix.
///
/// Each component's sign is fixed so that the largest-magnitude entry of its
/// `U` column is positive.
pub fn svd_fit(matrix: &TermDocMatrix, k: usize) -> Result<SvdModel> {
    let dense = matrix.to_dense();
    let mut model = svd_of_dense(&dense, k)?;
    model.terms = matrix.terms().to_vec();
    Ok(model)
}

pub(crate) fn svd_of_dense(dense: &DMatrix<f64>, k: usize) -> Result<SvdModel> {
    let (m, n) = dense.shape();
    let max_k = m.min(n);
    if k == 0 || k > max_k {
        return Err(Error::Parameter(format!("svd rank {k} outside 1..={max_k}")));
    }
    let svd = SVD::new(dense.clone(), true, true);
    let full_u = svd.u.expect("u requested");
    let full_vt = svd.v_t.expect("v requested");
    let s: Vec<f64> = svd.singular_values.iter().take(k).copied().collect();
    let top = s[0];
    if s[k - 1].is_nan() || s[k - 1] <= top * 1e-12 {
        return Err(Error::Parameter(format!(
            "svd rank {k} exceeds the numerical rank of the matrix"
        )));
    }
    let mut u = full_u.columns(0, k).into_owned();
    let mut v = full_vt.rows(0, k).transpose();
    for c in 0..k {
        let col = u.column(c);
        let pivot = col.iter().enumerate().fold(
            (0, 0.0f64),
            |best, (i, x)| if x.abs() > best.1.abs() { (i, *x) } else { best },
        );
        if pivot.1 < 0.0 {
            u.column_mut(c).neg_mut();
            v.column_mut(c).neg_mut();
        }
    }
    Ok(SvdModel {
        terms: Vec::new(),
        k,
        num_tracks: n,
        u,
        s,
        v,
    })
}

impl SvdModel {
    /// Term coordinates `U_i S`, one row per term.
    pub fn term_coordinates(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (c, &sv) in self.s.iter().enumerate() {
            us.column_mut(c).scale_mut(sv);
        }
        us
    }

    /// Rank-`k` reconstruction `U S V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.term_coordinates() * self.v.transpose()
    }

    /// Folds a query into the latent space: `S^-1 U^T q`.
    pub fn fold_in(&self, q: &QueryVector) -> Result<DVector<f64>> {
        q.check_dim(self.u.nrows())?;
        if q.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let mut folded = DVector::zeros(self.k);
        for &(i, w) in q.entries() {
            for c in 0..self.k {
                folded[c] += self.u[(i, c)] * w;
            }
        }
        for c in 0..self.k {
            folded[c] /= self.s[c];
        }
        Ok(folded)
    }
}

/// Per-term weights of a query after fold-in: `U_i S q_hat`.
pub fn svd_predict_weights(model: &SvdModel, q: &QueryVector) -> Result<Vec<f64>> {
    let folded = model.fold_in(q)?;
    let scaled = DVector::from_iterator(model.k, folded.iter().zip(&model.s).map(|(f, s)| f * s));
    Ok((&model.u * scaled).iter().copied().collect())
}

/// Cosine dissimilarity between the term rows `U_i S`.
pub fn term_dissimilarity(model: &SvdModel) -> Result<DMatrix<f64>> {
    cosine_dissimilarity(&model.term_coordinates())
        .map_err(|i| Error::DegenerateTerm(model.terms.get(i).cloned().unwrap_or_else(|| format!("#{i}"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_of(dense: &DMatrix<f64>, k: usize) -> SvdModel {
        let mut m = svd_of_dense(dense, k).unwrap();
        m.terms = (0..dense.nrows()).map(|i| format!("t{i}")).collect();
        m
    }

    #[test]
    fn diagonal_singular_values() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0]));
        let m = model_of(&d, 2);
        assert!((m.s[0] - 3.0).abs() < 1e-12 && (m.s[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_bounds() {
        let d = DMatrix::from_element(2, 3, 1.0);
        assert!(matches!(svd_of_dense(&d, 0), Err(Error::Parameter(_))));
        assert!(matches!(svd_of_dense(&d, 3), Err(Error::Parameter(_))));
        // rank one matrix cannot support two positive singular values
        assert!(matches!(svd_of_dense(&d, 2), Err(Error::Parameter(_))));
    }

    #[test]
    fn unit_query_full_rank() {
        let d = DMatrix::from_row_slice(3, 4, &[1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 3.0, 1.0, 2.0, 0.0, 1.0, 4.0]);
        let m = model_of(&d, 3);
        let q = QueryVector::new(3, vec![(1, 1.0)]).unwrap();
        let w = svd_predict_weights(&m, &q).unwrap();
        for (i, x) in w.iter().enumerate() {
            let expect = if i == 1 { 1.0 } else { 0.0 };
            assert!((x - expect).abs() < 1e-8);
        }
        let empty = QueryVector::new(3, vec![]).unwrap();
        assert!(matches!(svd_predict_weights(&m, &empty), Err(Error::EmptyQuery)));
    }

    #[test]
    fn dissimilarity_cases() {
        // U S rows: (1,0), (0,1), (1,1), (2,2)
        let m = SvdModel {
            terms: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            k: 2,
            num_tracks: 0,
            u: DMatrix::from_row_slice(4, 2, &[0.5, 0.0, 0.0, 0.25, 0.5, 0.25, 1.0, 0.5]),
            s: vec![2.0, 4.0],
            v: DMatrix::zeros(0, 2),
        };
        let d = term_dissimilarity(&m).unwrap();
        assert!((0..4).all(|i| d[(i, i)] == 0.0));
        assert!((d[(0, 1)] - 1.0).abs() < 1e-15);
        assert!(d[(2, 3)].abs() < 1e-15);
        assert_eq!(d, d.transpose());

        let mut degenerate = m.clone();
        degenerate.u[(1, 1)] = 0.0;
        assert!(matches!(term_dissimilarity(&degenerate), Err(Error::DegenerateTerm(t)) if t == "b"));
    }
}
