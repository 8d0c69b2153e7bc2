use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::lie::{BracketTerm, LiePolynomial};

/// One weighted Lie polynomial of a cubature formula.
#[derive(Clone, Debug, PartialEq)]
pub struct CubatureEntry<C: Coeff = f64> {
    pub weight: C,
    pub poly: LiePolynomial<C>,
}

/// Weighted Lie polynomials whose weighted exponentials match the expected
/// signature of Brownian motion up to a graded degree.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerCubatureFormula<C: Coeff = f64> {
    pub dim: usize,
    pub degree: usize,
    pub entries: Vec<CubatureEntry<C>>,
    pub metadata: Map<String, Value>,
}

impl<C: Coeff> WienerCubatureFormula<C> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight_sum(&self) -> C {
        self.entries.iter().fold(C::zero(), |a, e| a + e.weight.clone())
    }

    /// Positive weights summing to one, in-range letters and term degrees.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        let s = self.weight_sum().to_f64();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidFormula(format!("weights sum to {s}")));
        }
        Ok(())
    }

    /// Everything `validate` checks except the weight sum.
    pub fn validate_shape(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidFormula("dimension must be positive".into()));
        }
        if self.entries.is_empty() {
            return Err(Error::InvalidFormula("no entries".into()));
        }
        for (k, e) in self.entries.iter().enumerate() {
            let w = e.weight.to_f64();
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidFormula(format!("entry {k} has non-positive weight {w}")));
            }
            if e.poly.dim() != self.dim {
                return Err(Error::InvalidFormula(format!("entry {k} has dimension {}", e.poly.dim())));
            }
            for (c, t) in e.poly.terms() {
                if !c.to_f64().is_finite() {
                    return Err(Error::InvalidFormula(format!("entry {k} has a non-finite coefficient")));
                }
                t.validate(self.dim)
                    .map_err(|err| Error::InvalidFormula(format!("entry {k}: {err}")))?;
                if t.graded_degree() > self.degree {
                    return Err(Error::InvalidFormula(format!(
                        "entry {k}: term {t} has degree {} above {}",
                        t.graded_degree(),
                        self.degree
                    )));
                }
            }
        }
        Ok(())
    }

    /// Brownian scaling by `root = √T`: each term picks up `root^(graded degree)`.
    pub fn scale_by_root(&self, root: &C) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| CubatureEntry {
                weight: e.weight.clone(),
                poly: e.poly.map_terms(|c, t| c.clone() * root.powi(t.graded_degree() as u32)),
            })
            .collect();
        WienerCubatureFormula { dim: self.dim, degree: self.degree, entries, metadata: self.metadata.clone() }
    }

    pub fn to_f64(&self) -> WienerCubatureFormula<f64> {
        WienerCubatureFormula {
            dim: self.dim,
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|e| CubatureEntry { weight: e.weight.to_f64(), poly: e.poly.to_f64() })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }
}

/// The formula at time `t`, given a formula at time 1.
pub fn scale_formula(f: &WienerCubatureFormula<f64>, t: f64) -> Result<WienerCubatureFormula<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidFormula(format!("time must be positive, got {t}")));
    }
    let mut g = f.scale_by_root(&t.sqrt());
    g.metadata.insert("time".into(), Value::from(t));
    Ok(g)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTerm {
    coeff: f64,
    bracket: BracketTerm,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEntry {
    weight: f64,
    terms: Vec<FileTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaFile {
    dim: usize,
    degree: usize,
    entries: Vec<FileEntry>,
    #[serde(default)]
    metadata: Map<String, Value>,
}

/// Formulas with more entries than this are written without indentation.
const PRETTY_LIMIT: usize = 64;

impl WienerCubatureFormula<f64> {
    pub fn to_json(&self) -> Result<String> {
        let file = FormulaFile {
            dim: self.dim,
            degree: self.degree,
            entries: self
                .entries
                .iter()
                .map(|e| FileEntry {
                    weight: e.weight,
                    terms: e
                        .poly
                        .terms()
                        .iter()
                        .map(|(c, t)| FileTerm { coeff: *c, bracket: t.clone() })
                        .collect(),
                })
                .collect(),
            metadata: self.metadata.clone(),
        };
        if self.len() > PRETTY_LIMIT {
            Ok(serde_json::to_string(&file)?)
        } else {
            Ok(serde_json::to_string_pretty(&file)?)
        }
    }

    /// Parses and validates a formula.
    pub fn from_json(text: &str) -> Result<Self> {
        let f = Self::from_json_unnormalised(text)?;
        f.validate()?;
        Ok(f)
    }

    /// Like `from_json` but accepts weights that do not sum to one, so that
    /// verification can report the mismatch as a residual.
    pub fn from_json_unnormalised(text: &str) -> Result<Self> {
        let file: FormulaFile = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(file.entries.len());
        for (k, e) in file.entries.into_iter().enumerate() {
            let poly = LiePolynomial::from_terms(file.dim, e.terms.into_iter().map(|t| (t.coeff, t.bracket)))
                .map_err(|err| Error::InvalidFormula(format!("entry {k}: {err}")))?;
            entries.push(CubatureEntry { weight: e.weight, poly });
        }
        let f = WienerCubatureFormula { dim: file.dim, degree: file.degree, entries, metadata: file.metadata };
        f.validate_shape()?;
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn load_unnormalised(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_unnormalised(&text)
    }
}
