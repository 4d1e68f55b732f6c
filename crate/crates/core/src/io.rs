//! File formats: state JSON, product-vector lists and report envelopes.
//!
//! Floats in state files are written with 17 significant digits so a
//! write/read cycle reproduces every matrix entry bit for bit.

use std::fs;
use std::path::Path;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::catalog::{DensityMatrix, ProductVector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `{:.16e}`: 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> std::result::Result<Box<RawValue>, serde_json::Error> {
    if !x.is_finite() {
        return Err(serde::ser::Error::custom(format!("non-finite value {x}")));
    }
    RawValue::from_string(format_f64(x))
}

pub(crate) fn serialize_f64_seq<S: Serializer>(
    v: &[f64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        seq.serialize_element(&raw(x).map_err(serde::ser::Error::custom)?)?;
    }
    seq.end()
}

pub(crate) fn serialize_opt_f64<S: Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => raw(*x).map_err(serde::ser::Error::custom)?.serialize(s),
        None => s.serialize_none(),
    }
}

/// On-disk state: `dims`, row-major `matrix`, `label`, `family`, optional
/// `lambda`, plus the tolerances in force when it was written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    #[serde(serialize_with = "serialize_f64_seq")]
    pub matrix: Vec<f64>,
    pub label: String,
    pub family: String,
    #[serde(
        default,
        serialize_with = "serialize_opt_f64",
        skip_serializing_if = "Option::is_none"
    )]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, label: &str, family: &str, lambda: Option<f64>) -> Self {
        let (d1, d2) = rho.dims();
        Self {
            dims: [d1, d2],
            matrix: rho.matrix().as_slice().to_vec(),
            label: label.to_string(),
            family: family.to_string(),
            lambda,
            provenance: None,
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        let [d1, d2] = self.dims;
        let d = d1 * d2;
        let m = Matrix::from_row_major(d, d, self.matrix.clone())?;
        DensityMatrix::new(m, (d1, d2))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductVectorRecord {
    #[serde(serialize_with = "serialize_f64_seq")]
    pub a: Vec<f64>,
    #[serde(serialize_with = "serialize_f64_seq")]
    pub b: Vec<f64>,
}

impl From<&ProductVector> for ProductVectorRecord {
    fn from(v: &ProductVector) -> Self {
        Self {
            a: v.a().to_vec(),
            b: v.b().to_vec(),
        }
    }
}

pub(crate) fn serialize_product_vector<S: Serializer>(
    v: &ProductVector,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    ProductVectorRecord::from(v).serialize(s)
}

/// `{"dims": [d1, d2], "vectors": [{"a": [...], "b": [...]}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductVectorFile {
    pub dims: [usize; 2],
    pub vectors: Vec<ProductVectorRecord>,
}

impl ProductVectorFile {
    pub fn new(dims: (usize, usize), vectors: &[ProductVector]) -> Self {
        Self {
            dims: [dims.0, dims.1],
            vectors: vectors.iter().map(Into::into).collect(),
        }
    }

    pub fn to_vectors(&self) -> Result<Vec<ProductVector>> {
        self.vectors
            .iter()
            .map(|r| {
                if r.a.len() != self.dims[0] || r.b.len() != self.dims[1] {
                    return Err(Error::dims(
                        format!("{:?}", self.dims),
                        format!("[{}, {}]", r.a.len(), r.b.len()),
                    ));
                }
                ProductVector::new(r.a.clone(), r.b.clone())
            })
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Wrap a report with the tool version and run parameters.
pub fn envelope<T: Serialize>(kind: &str, report: &T, params: serde_json::Value) -> Result<String> {
    let v = serde_json::json!({
        "kind": kind,
        "tool_version": TOOL_VERSION,
        "parameters": params,
        "report": report,
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{edge_state, tiles_upb};

    #[test]
    fn state_roundtrip_is_bit_exact() {
        let rho = edge_state(&tiles_upb()).unwrap();
        let f = StateFile::from_state(&rho, "tiles-edge", "edge", Some(0.1));
        let text = f.to_json().unwrap();
        assert!(text.contains("\"dims\""));
        let back = StateFile::from_json(&text).unwrap();
        assert_eq!(back.matrix, rho.matrix().as_slice());
        assert_eq!(back.lambda, Some(0.1));
        assert_eq!(back.to_state().unwrap().matrix(), rho.matrix());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.25), "2.5000000000000000e-1");
        let s = format_f64(1.0 / 3.0);
        assert_eq!(s.parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn malformed_state_rejected() {
        assert!(StateFile::from_json("{\"dims\": [2]}").is_err());
        let bad = r#"{"dims":[2,2],"matrix":[1,0,0,0],"label":"x","family":"y"}"#;
        assert!(StateFile::from_json(bad).unwrap().to_state().is_err());
        let bad = r#"{"dims":[1,2],"matrix":[1,0,0,-0.5],"label":"x","family":"y"}"#;
        assert!(StateFile::from_json(bad).unwrap().to_state().is_err());
    }
}
