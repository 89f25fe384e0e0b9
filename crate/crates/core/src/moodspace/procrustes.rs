use nalgebra::{DMatrix, Matrix3, RowVector3, Vector3, SVD};
use serde::{Deserialize, Serialize};

use super::mds::MdsEmbedding;
use super::reference::ReferenceSpace;
use crate::corpus::normalize;
use crate::{Error, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedTerm {
    pub term: String,
    pub valence: f64,
    pub arousal: f64,
}

/// How an ACT model was produced.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub variant: String,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub stress1: Option<f64>,
}

/// A 3-D term configuration aligned to the valence/arousal reference.
///
/// Rows are transformed as `x_hat = scale * y * rotation + translation`.
/// Axis 1 is valence, axis 2 arousal, axis 3 the unlabeled residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ActModel {
    pub terms: Vec<String>,
    pub scale: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    /// configuration before alignment, terms x 3
    pub source_coords: DMatrix<f64>,
    /// aligned configuration, terms x 3
    pub term_coords: DMatrix<f64>,
    pub matched_terms: Vec<MatchedTerm>,
    /// sum of squared anchor residuals
    pub fit_x2_raw: f64,
    /// `fit_x2_raw` divided by the centered sum of squares of the anchors
    pub fit_x2_standardized: f64,
    pub provenance: Provenance,
}

/// Solves the similarity Procrustes problem for 3-D `y` onto 2-D anchors
/// padded with a zero third coordinate, then transforms every term.
///
/// Reflections are allowed. When the data leave the handedness undetermined
/// (always the case along the padded axis), a proper rotation is chosen.
pub fn procrustes_align(terms: &[String], coords: &DMatrix<f64>, reference: &ReferenceSpace) -> Result<ActModel> {
    if coords.ncols() != 3 {
        return Err(Error::Parameter(format!(
            "alignment needs 3-D coordinates, got {}",
            coords.ncols()
        )));
    }
    if coords.nrows() != terms.len() {
        return Err(Error::Parameter("term list length differs from coordinates".into()));
    }
    let mut idx = Vec::new();
    let mut matched = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        if let Some((v, a)) = reference.get(&normalize(t)) {
            idx.push(i);
            matched.push(MatchedTerm {
                term: t.clone(),
                valence: v,
                arousal: a,
            });
        }
    }
    if matched.len() < 3 {
        return Err(Error::InsufficientAnchors(
            matched.into_iter().map(|m| m.term).collect(),
        ));
    }
    let m = matched.len();
    let y = DMatrix::from_fn(m, 3, |r, c| coords[(idx[r], c)]);
    let x = DMatrix::from_fn(m, 3, |r, c| match c {
        0 => matched[r].valence,
        1 => matched[r].arousal,
        _ => 0.0,
    });
    let y_mean = RowVector3::from_iterator(y.row_mean().iter().copied());
    let x_mean = RowVector3::from_iterator(x.row_mean().iter().copied());
    let mut yc = y.clone();
    let mut xc = x.clone();
    for r in 0..m {
        let mut row = yc.row_mut(r);
        row -= &y_mean;
        let mut row = xc.row_mut(r);
        row -= &x_mean;
    }
    let ss_y: f64 = yc.iter().map(|v| v * v).sum();
    if ss_y <= 0.0 {
        return Err(Error::Degenerate("anchor terms share one position".into()));
    }
    let cross: Matrix3<f64> = Matrix3::from_iterator((yc.transpose() * &xc).iter().copied());
    let svd = SVD::new(cross, true, true);
    let mut u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    let sv = svd.singular_values;
    let mut rotation = u * v_t;
    if rotation.determinant() < 0.0 && sv[2] <= 1e-12 * sv[0].max(f64::MIN_POSITIVE) {
        u.column_mut(2).neg_mut();
        rotation = u * v_t;
    }
    let scale = cross.component_mul(&rotation).sum() / ss_y;
    let translation = (x_mean - y_mean * rotation * scale).transpose();
    let rot = DMatrix::from_iterator(3, 3, rotation.iter().copied());
    let apply = |src: &DMatrix<f64>| -> DMatrix<f64> {
        let mut out = src * &rot * scale;
        for mut row in out.row_iter_mut() {
            row[0] += translation[0];
            row[1] += translation[1];
            row[2] += translation[2];
        }
        out
    };
    let aligned_anchors = apply(&y);
    let fit_x2_raw: f64 = (&x - &aligned_anchors).iter().map(|v| v * v).sum();
    let ss_x: f64 = xc.iter().map(|v| v * v).sum();
    Ok(ActModel {
        terms: terms.to_vec(),
        scale,
        rotation,
        translation,
        term_coords: apply(coords),
        source_coords: coords.clone(),
        matched_terms: matched,
        fit_x2_raw,
        fit_x2_standardized: if ss_x > 0.0 { fit_x2_raw / ss_x } else { f64::NAN },
        provenance: Provenance::default(),
    })
}

/// Aligns an MDS embedding to the reference.
pub fn procrustes_fit(embedding: &MdsEmbedding, reference: &ReferenceSpace) -> Result<ActModel> {
    let mut act = procrustes_align(&embedding.terms, &embedding.coords, reference)?;
    act.provenance.stress1 = Some(embedding.stress1);
    Ok(act)
}

impl ActModel {
    pub fn term_position(&self, i: usize) -> Vector3<f64> {
        Vector3::new(
            self.term_coords[(i, 0)],
            self.term_coords[(i, 1)],
            self.term_coords[(i, 2)],
        )
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        let key = normalize(term);
        self.terms.iter().position(|t| *t == key || normalize(t) == key)
    }
}

#[derive(Serialize, Deserialize)]
struct ActDoc {
    version: u32,
    #[serde(rename = "B")]
    scale: f64,
    /// row-major
    #[serde(rename = "T")]
    rotation: [f64; 9],
    #[serde(rename = "C")]
    translation: [f64; 3],
    terms: Vec<String>,
    source_coords: Vec<[f64; 3]>,
    term_coords: Vec<[f64; 3]>,
    matched_terms: Vec<MatchedTerm>,
    #[serde(rename = "fit_X2_raw")]
    fit_x2_raw: f64,
    #[serde(rename = "fit_X2_standardized")]
    fit_x2_standardized: Option<f64>,
    provenance: Provenance,
}

fn rows3(m: &DMatrix<f64>) -> Vec<[f64; 3]> {
    m.row_iter().map(|r| [r[0], r[1], r[2]]).collect()
}

impl Serialize for ActModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = &self.rotation;
        ActDoc {
            version: FORMAT_VERSION,
            scale: self.scale,
            rotation: [
                t[(0, 0)],
                t[(0, 1)],
                t[(0, 2)],
                t[(1, 0)],
                t[(1, 1)],
                t[(1, 2)],
                t[(2, 0)],
                t[(2, 1)],
                t[(2, 2)],
            ],
            translation: [self.translation[0], self.translation[1], self.translation[2]],
            terms: self.terms.clone(),
            source_coords: rows3(&self.source_coords),
            term_coords: rows3(&self.term_coords),
            matched_terms: self.matched_terms.clone(),
            fit_x2_raw: self.fit_x2_raw,
            fit_x2_standardized: self.fit_x2_standardized.is_finite().then_some(self.fit_x2_standardized),
            provenance: self.provenance.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ActModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = ActDoc::deserialize(d)?;
        if doc.version != FORMAT_VERSION {
            return Err(D::Error::custom(format!(
                "unsupported act model version {}",
                doc.version
            )));
        }
        let n = doc.terms.len();
        if doc.term_coords.len() != n || doc.source_coords.len() != n {
            return Err(D::Error::custom("coordinate rows differ from term count"));
        }
        let to_matrix = |rows: &[[f64; 3]]| DMatrix::from_fn(rows.len(), 3, |r, c| rows[r][c]);
        Ok(ActModel {
            scale: doc.scale,
            rotation: Matrix3::from_row_slice(&doc.rotation),
            translation: Vector3::from_row_slice(&doc.translation),
            source_coords: to_matrix(&doc.source_coords),
            term_coords: to_matrix(&doc.term_coords),
            terms: doc.terms,
            matched_terms: doc.matched_terms,
            fit_x2_raw: doc.fit_x2_raw,
            fit_x2_standardized: doc.fit_x2_standardized.unwrap_or(f64::NAN),
            provenance: doc.provenance,
        })
    }
}
