//! JSON form of a dense operator: `{support, dims, re, im}` with row-major
//! nested arrays.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{c, DenseOperator, SiteLabel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub support: Vec<SiteLabel>,
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn to_operator(&self) -> Result<DenseOperator> {
        let n = self.re.len();
        if self.re.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch("`re` must be a square array".into()));
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|row| row.len() != n) {
                return Err(Error::ShapeMismatch("`im` must match the shape of `re`".into()));
            }
        }
        let data = DMatrix::from_fn(n, n, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            c(self.re[i][j], im)
        });
        DenseOperator::new(self.support.clone(), self.dims.clone(), data)
    }

    pub fn from_operator(op: &DenseOperator) -> Self {
        let n = op.dim();
        let m = op.data();
        MatrixJson {
            support: op.support().to_vec(),
            dims: op.dims().to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: Some((0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect()),
        }
    }
}

impl Serialize for DenseOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_operator(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        MatrixJson::deserialize(deserializer)?.to_operator().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli;

    #[test]
    fn round_trip() {
        let y = DenseOperator::on_site(SiteLabel::ancilla(1), pauli::y()).unwrap();
        let text = serde_json::to_string(&y).unwrap();
        assert_eq!(text, r#"{"support":["1'"],"dims":[2],"re":[[0.0,0.0],[0.0,0.0]],"im":[[0.0,-1.0],[1.0,0.0]]}"#);
        let back: DenseOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, y);
    }

    #[test]
    fn imaginary_part_is_optional() {
        let x: DenseOperator = serde_json::from_str(r#"{"support":[0],"dims":[2],"re":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(x.data(), &pauli::x());
        let bad = serde_json::from_str::<DenseOperator>(r#"{"support":[0],"dims":[2],"re":[[0,1]]}"#);
        assert!(bad.is_err());
    }
}
