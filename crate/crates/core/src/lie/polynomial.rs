use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::bracket::{standard_bracketing, BracketTerm};
use crate::algebra::{TensorElement, TensorSpace, Word};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// A finite linear combination of nested brackets over `{0..dim}`.
///
/// Optionally carries its coordinates in the Lyndon basis; when present they
/// expand to the same tensor as the bracket terms.
#[derive(Clone, PartialEq)]
pub struct LiePolynomial<C: Coeff = f64> {
    dim: usize,
    terms: Vec<(C, BracketTerm)>,
    lyndon_coords: Option<BTreeMap<Word, C>>,
}

impl<C: Coeff> LiePolynomial<C> {
    pub fn new(dim: usize) -> Self {
        LiePolynomial { dim, terms: Vec::new(), lyndon_coords: None }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (C, BracketTerm)>) -> Result<Self> {
        let mut p = Self::new(dim);
        for (c, t) in terms {
            p.push(c, t)?;
        }
        Ok(p)
    }

    /// Builds the polynomial `Σ c_w b(w)` from Lyndon-basis coordinates.
    pub fn from_lyndon_coords(dim: usize, coords: BTreeMap<Word, C>) -> Result<Self> {
        let mut p = Self::new(dim);
        for (w, c) in &coords {
            w.validate(dim)?;
            p.terms.push((c.clone(), standard_bracketing(w)?));
        }
        p.lyndon_coords = Some(coords);
        Ok(p)
    }

    /// Appends `c * t`. Zero coefficients are dropped.
    pub fn push(&mut self, c: C, t: BracketTerm) -> Result<()> {
        t.validate(self.dim)?;
        self.lyndon_coords = None;
        if !c.is_zero() {
            self.terms.push((c, t));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(C, BracketTerm)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lyndon_coords(&self) -> Option<&BTreeMap<Word, C>> {
        self.lyndon_coords.as_ref()
    }

    /// Highest graded degree among the bracket terms (0 if empty).
    pub fn graded_degree(&self) -> usize {
        self.terms.iter().map(|(_, t)| t.graded_degree()).max().unwrap_or(0)
    }

    /// Tensor expansion in `space`.
    pub fn expand(&self, space: &Arc<TensorSpace>) -> Result<TensorElement<C>> {
        if space.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: self.dim });
        }
        let mut out = TensorElement::zero(space);
        for (c, t) in &self.terms {
            let degree = t.foliage().degree(space.grading());
            if degree > space.truncation() {
                return Err(Error::ExceedsTruncation {
                    word: t.foliage(),
                    degree,
                    truncation: space.truncation(),
                });
            }
            for (w, k) in t.expand_words() {
                out.add_word(&w, c.clone() * C::from_ratio(k, 1))?;
            }
        }
        Ok(out)
    }

    /// Multiplies each term's coefficient by `f(term)`.
    pub fn map_terms(&self, f: impl Fn(&C, &BracketTerm) -> C) -> Self {
        LiePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(c, t)| (f(c, t), t.clone())).collect(),
            lyndon_coords: None,
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut p = self.map_terms(|c, _| c.scale_ref(s));
        p.lyndon_coords = self
            .lyndon_coords
            .as_ref()
            .map(|m| m.iter().map(|(w, c)| (w.clone(), c.scale_ref(s))).collect());
        p
    }

    pub fn to_f64(&self) -> LiePolynomial<f64> {
        LiePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(c, t)| (c.to_f64(), t.clone())).collect(),
            lyndon_coords: self
                .lyndon_coords
                .as_ref()
                .map(|m| m.iter().map(|(w, c)| (w.clone(), c.to_f64())).collect()),
        }
    }
}

impl<C: Coeff> fmt::Display for LiePolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (c, t)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{t}")?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for LiePolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiePolynomial(d={}; {self})", self.dim)
    }
}

/// `(x_1, ..., x_n) = (1/n!) Σ_σ x_σ(1) ⊗ ... ⊗ x_σ(n)`, truncated to `space`.
/// The empty product is the unit.
pub fn symmetrised_product<C: Coeff>(
    space: &Arc<TensorSpace>,
    xs: &[TensorElement<C>],
) -> Result<TensorElement<C>> {
    let n = xs.len();
    if n > 16 {
        return Err(Error::Unsupported(format!("symmetrised product of {n} factors")));
    }
    for x in xs {
        if x.dim() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: x.dim() });
        }
        if x.truncation() != space.truncation() || x.grading() != space.grading() {
            return Err(Error::TruncationMismatch {
                expected: space.truncation(),
                found: x.truncation(),
            });
        }
    }
    // sums[mask] = sum over all orderings of the factors in `mask`
    let mut sums: Vec<TensorElement<C>> = Vec::with_capacity(1 << n);
    sums.push(TensorElement::unit(space));
    for mask in 1usize..(1 << n) {
        let mut acc = TensorElement::zero(space);
        for (i, x) in xs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc += &(&sums[mask ^ (1 << i)] * x);
            }
        }
        sums.push(acc);
    }
    let factorial: i64 = (1..=n as i64).product();
    Ok(sums.pop().expect("non-empty").scale(&C::from_ratio(1, factorial)))
}

/// Symmetrised product of Lie polynomials, via their expansions.
pub fn symmetrised_product_lie<C: Coeff>(
    space: &Arc<TensorSpace>,
    ls: &[LiePolynomial<C>],
) -> Result<TensorElement<C>> {
    let xs = ls.iter().map(|l| l.expand(space)).collect::<Result<Vec<_>>>()?;
    symmetrised_product(space, &xs)
}
