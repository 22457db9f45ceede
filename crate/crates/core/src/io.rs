//! Structured-text (JSON) interchange formats for polynomials, tensors,
//! solver reports and construction results. Terms are emitted in
//! graded-lexicographic order and tensor entries by sorted multi-index,
//! so re-serializing a parsed document is bit-identical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{ConstructionResult, CountCertificate, LevelResult};
use crate::poly::{HomogeneousPolynomial, PolyError};
use crate::solver::SolveReport;
use crate::tensor::SymmetricTensor;

#[derive(Error, Debug)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl From<PolyError> for IoError {
    fn from(e: PolyError) -> Self {
        IoError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub exps: Vec<u32>,
    pub coef: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub n_vars: usize,
    pub degree: u32,
    pub terms: Vec<TermDoc>,
}

impl PolyDoc {
    pub fn from_poly(f: &HomogeneousPolynomial) -> Self {
        PolyDoc {
            n_vars: f.n_vars(),
            degree: f.degree(),
            terms: f
                .terms()
                .map(|(m, c)| TermDoc {
                    exps: m.exps().to_vec(),
                    coef: c,
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<HomogeneousPolynomial, IoError> {
        Ok(HomogeneousPolynomial::from_terms(
            self.n_vars,
            self.degree,
            self.terms.iter().map(|t| (t.exps.clone(), t.coef)),
        )?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    /// 1-based sorted multi-index.
    pub idx: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    pub order: u32,
    pub dim: usize,
    pub entries: Vec<EntryDoc>,
}

impl TensorDoc {
    pub fn from_tensor(a: &SymmetricTensor) -> Self {
        TensorDoc {
            order: a.order(),
            dim: a.dim(),
            entries: a
                .entries()
                .map(|(idx, v)| EntryDoc {
                    idx: idx.iter().map(|i| i + 1).collect(),
                    value: v,
                })
                .collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<SymmetricTensor, IoError> {
        let mut a = SymmetricTensor::zero(self.order, self.dim);
        for e in &self.entries {
            if e.idx.len() != self.order as usize {
                return Err(IoError::Invalid(format!(
                    "multi-index {:?} has length {}, expected {}",
                    e.idx,
                    e.idx.len(),
                    self.order
                )));
            }
            if e.idx.iter().any(|&i| i < 1 || i > self.dim) {
                return Err(IoError::Invalid(format!(
                    "multi-index {:?} out of range 1..={}",
                    e.idx, self.dim
                )));
            }
            let zero_based: Vec<usize> = e.idx.iter().map(|i| i - 1).collect();
            a.set(&zero_based, e.value);
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub count: usize,
    pub expected: usize,
    pub min_margin: f64,
    pub max_residual: f64,
    pub euler_sum: i64,
}

impl CertificateDoc {
    pub fn from_certificate(c: &CountCertificate) -> Self {
        CertificateDoc {
            count: c.count,
            expected: c.expected,
            min_margin: c.min_margin,
            max_residual: c.max_residual,
            euler_sum: c.euler_sum,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelDoc {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub polynomial: PolyDoc,
    pub tensor: TensorDoc,
    pub certificate: CertificateDoc,
}

impl LevelDoc {
    pub fn from_level(l: &LevelResult) -> Self {
        LevelDoc {
            n: l.n,
            epsilon: l.epsilon,
            polynomial: PolyDoc::from_poly(&l.polynomial),
            tensor: TensorDoc::from_tensor(&l.tensor),
            certificate: CertificateDoc::from_certificate(&l.certificate),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionDoc {
    pub d: u32,
    pub levels: Vec<LevelDoc>,
}

impl ConstructionDoc {
    pub fn from_result(r: &ConstructionResult) -> Self {
        ConstructionDoc {
            d: r.d,
            levels: r.levels.iter().map(LevelDoc::from_level).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointDoc {
    pub x: Vec<f64>,
    pub value: f64,
    pub lagrange_lambda: f64,
    pub morse_index: usize,
    pub nondegeneracy_margin: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegeneratePointDoc {
    pub x: Vec<f64>,
    pub residual: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    pub expected_count: usize,
    pub found_count: usize,
    pub euler_sum: i64,
    pub certified: bool,
    pub degenerate_detected: bool,
    pub diagnostics: String,
    pub points: Vec<PointDoc>,
    pub degenerate_points: Vec<DegeneratePointDoc>,
}

impl ReportDoc {
    pub fn from_report(r: &SolveReport) -> Self {
        ReportDoc {
            expected_count: r.expected_count,
            found_count: r.found_count,
            euler_sum: r.euler_sum,
            certified: r.certified,
            degenerate_detected: r.degenerate_detected,
            diagnostics: r.diagnostics.clone(),
            points: r
                .points
                .iter()
                .map(|p| PointDoc {
                    x: p.x.clone(),
                    value: p.value,
                    lagrange_lambda: p.lagrange_lambda,
                    morse_index: p.morse_index,
                    nondegeneracy_margin: p.nondegeneracy_margin,
                    residual: p.residual,
                })
                .collect(),
            degenerate_points: r
                .degenerate_points
                .iter()
                .map(|p| DegeneratePointDoc {
                    x: p.x.clone(),
                    residual: p.residual,
                    margin: p.margin,
                })
                .collect(),
        }
    }
}

/// Any of the three top-level documents the CLI consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputDoc {
    Construction(ConstructionDoc),
    Poly(PolyDoc),
    Tensor(TensorDoc),
}

pub fn read_input(path: &std::path::Path) -> Result<InputDoc, IoError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &std::path::Path, doc: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(doc)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct, ConstructionParams};
    use crate::tensor::poly_to_tensor;

    #[test]
    fn poly_roundtrip_bit_identical() {
        let f = HomogeneousPolynomial::from_terms(
            3,
            3,
            [(vec![0, 0, 3], 2.5), (vec![2, 0, 1], -1.5), (vec![0, 2, 1], -1.5)],
        )
        .unwrap();
        let doc = PolyDoc::from_poly(&f);
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: PolyDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_poly().unwrap(), f);
        assert_eq!(serde_json::to_string(&PolyDoc::from_poly(&parsed.to_poly().unwrap())).unwrap(), json);
    }

    #[test]
    fn tensor_roundtrip() {
        let f = HomogeneousPolynomial::from_terms(2, 3, [(vec![3, 0], 1.0), (vec![1, 2], -3.0)])
            .unwrap();
        let t = poly_to_tensor(&f);
        let doc = TensorDoc::from_tensor(&t);
        assert!(doc.entries.iter().all(|e| e.idx.iter().all(|&i| i >= 1)));
        assert_eq!(doc.to_tensor().unwrap(), t);
    }

    #[test]
    fn tensor_rejects_bad_index() {
        let doc = TensorDoc {
            order: 2,
            dim: 2,
            entries: vec![EntryDoc { idx: vec![0, 1], value: 1.0 }],
        };
        assert!(doc.to_tensor().is_err());
    }

    #[test]
    fn untagged_input_detection() {
        let result = construct(&ConstructionParams::new(2, 2)).unwrap();
        let cdoc = ConstructionDoc::from_result(&result);
        let json = serde_json::to_string(&cdoc).unwrap();
        assert!(matches!(
            serde_json::from_str::<InputDoc>(&json).unwrap(),
            InputDoc::Construction(_)
        ));

        let level = result.final_level();
        let pjson = serde_json::to_string(&PolyDoc::from_poly(&level.polynomial)).unwrap();
        assert!(matches!(
            serde_json::from_str::<InputDoc>(&pjson).unwrap(),
            InputDoc::Poly(_)
        ));

        let tjson = serde_json::to_string(&TensorDoc::from_tensor(&level.tensor)).unwrap();
        assert!(matches!(
            serde_json::from_str::<InputDoc>(&tjson).unwrap(),
            InputDoc::Tensor(_)
        ));
    }
}
