use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use super::formula::WienerCubatureFormula;
use super::oracle::expected_signature_coefficient;
use crate::algebra::{TensorElement, TensorSpace, Word};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Entries per parallel work unit. Partial sums are combined in entry order,
/// so the result does not depend on the thread count.
const CHUNK: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct WordResidual {
    pub word: Word,
    /// Expected-signature coefficient.
    pub lhs: f64,
    /// Cubature coefficient.
    pub rhs: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub degree: usize,
    pub time: f64,
    pub max_residual: f64,
    /// Every word, sorted by descending error (ties in word order).
    pub residuals: Vec<WordResidual>,
}

impl VerifyReport {
    pub fn worst(&self, n: usize) -> &[WordResidual] {
        &self.residuals[..n.min(self.residuals.len())]
    }

    pub fn words_checked(&self) -> usize {
        self.residuals.len()
    }

    /// `word,lhs,rhs,abs_error` rows, worst first. `limit = None` writes all.
    pub fn write_csv(&self, path: &Path, limit: Option<usize>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["word", "lhs", "rhs", "abs_error"])?;
        for r in self.worst(limit.unwrap_or(usize::MAX)) {
            w.write_record([
                r.word.to_string(),
                format!("{:e}", r.lhs),
                format!("{:e}", r.rhs),
                format!("{:e}", r.abs_error),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// `Σ λ_k exp(ℓ_k)` truncated at graded degree `m`.
pub fn cubature_expectation<C: Coeff>(f: &WienerCubatureFormula<C>, m: usize) -> Result<TensorElement<C>> {
    let full = TensorSpace::graded(f.dim, f.degree.max(m))?;
    let target = TensorSpace::graded(f.dim, m)?;
    let partial: Vec<TensorElement<C>> = f
        .entries
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = TensorElement::zero(&target);
            for e in chunk {
                let g = e.poly.expand(&full)?.project(m).exp()?;
                acc.add_scaled(&g, &e.weight);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = TensorElement::zero(&target);
    for p in &partial {
        total += p;
    }
    Ok(total)
}

/// Compares the cubature side against the closed-form expected signature at
/// time `t`, over every word of graded degree `<= degree` (default: the
/// formula's degree).
pub fn verify_formula<C: Coeff>(
    f: &WienerCubatureFormula<C>,
    t: &C,
    degree: Option<usize>,
) -> Result<VerifyReport> {
    let m = degree.unwrap_or(f.degree);
    let rhs = cubature_expectation(f, m)?;
    let space: &Arc<TensorSpace> = rhs.space();
    let mut residuals: Vec<WordResidual> = space
        .words()
        .iter()
        .zip(rhs.coeffs())
        .map(|(w, r)| {
            let l = expected_signature_coefficient(w, t);
            let abs_error = (l.clone() - r.clone()).magnitude();
            WordResidual { word: w.clone(), lhs: l.to_f64(), rhs: r.to_f64(), abs_error }
        })
        .collect();
    residuals.sort_by(|a, b| b.abs_error.total_cmp(&a.abs_error).then_with(|| a.word.cmp(&b.word)));
    Ok(VerifyReport {
        degree: m,
        time: t.to_f64(),
        max_residual: residuals.first().map_or(0.0, |r| r.abs_error),
        residuals,
    })
}
