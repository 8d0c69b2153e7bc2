//! Truncated tensor algebra over the alphabet `{0, ..., d}`.
//!
//! Elements are stored densely over a cached [`TensorSpace`], the list of all
//! words whose degree is at most the truncation. Words are laid out by
//! degree, so "all words of degree at most g" is always an index prefix, and a
//! precomputed concatenation table turns the product into a flat loop.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use super::{Grading, Word};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

const MAX_WORDS: usize = 4_000_000;
const MAX_PAIRS: usize = 40_000_000;

/// The basis of a truncated tensor algebra: every word of degree `<= truncation`.
pub struct TensorSpace {
    dim: usize,
    truncation: usize,
    grading: Grading,
    words: Vec<Word>,
    degrees: Vec<usize>,
    /// `offsets[g]` is the first index of degree `g`; `offsets[m + 1] == len`.
    offsets: Vec<usize>,
    index: HashMap<Word, usize>,
    row_start: Vec<usize>,
    concat: Vec<u32>,
    lex_order: Vec<usize>,
}

type SpaceKey = (usize, usize, Grading);

fn cache() -> &'static Mutex<HashMap<SpaceKey, Arc<TensorSpace>>> {
    static CACHE: OnceLock<Mutex<HashMap<SpaceKey, Arc<TensorSpace>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of words of each degree `0..=m`.
fn degree_counts(dim: usize, m: usize, grading: Grading) -> Vec<usize> {
    let mut n = vec![0usize; m + 1];
    n[0] = 1;
    for g in 1..=m {
        let mut c = 0usize;
        for l in 0..=dim {
            let w = grading.letter_weight(l as u8);
            if w <= g {
                c = c.saturating_add(n[g - w]);
            }
        }
        n[g] = c;
    }
    n
}

impl TensorSpace {
    /// Shared space for `(dim, truncation, grading)`; built once per process.
    pub fn get(dim: usize, truncation: usize, grading: Grading) -> Result<Arc<TensorSpace>> {
        let key = (dim, truncation, grading);
        if let Some(s) = cache().lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let space = Arc::new(Self::build(dim, truncation, grading)?);
        let mut guard = cache().lock().unwrap();
        Ok(guard.entry(key).or_insert(space).clone())
    }

    /// Graded space (time letter counts twice).
    pub fn graded(dim: usize, truncation: usize) -> Result<Arc<TensorSpace>> {
        Self::get(dim, truncation, Grading::Graded)
    }

    fn build(dim: usize, m: usize, grading: Grading) -> Result<TensorSpace> {
        if dim == 0 || dim > 250 {
            return Err(Error::Unsupported(format!("alphabet dimension {dim}")));
        }
        let counts = degree_counts(dim, m, grading);
        let total: usize = counts.iter().fold(0usize, |a, &b| a.saturating_add(b));
        if total > MAX_WORDS {
            return Err(Error::SpaceTooLarge { dim, truncation: m, words: total, limit: MAX_WORDS });
        }
        let mut pairs = 0usize;
        for a in 0..=m {
            for b in 0..=(m - a) {
                pairs = pairs.saturating_add(counts[a].saturating_mul(counts[b]));
            }
        }
        if pairs > MAX_PAIRS {
            return Err(Error::SpaceTooLarge { dim, truncation: m, words: total, limit: MAX_WORDS });
        }

        let mut buckets: Vec<Vec<Word>> = vec![Vec::new(); m + 1];
        buckets[0].push(Word::empty());
        for g in 1..=m {
            let mut bucket = Vec::with_capacity(counts[g]);
            for l in 0..=dim as u8 {
                let w = grading.letter_weight(l);
                if w > g {
                    continue;
                }
                for tail in &buckets[g - w] {
                    let mut word = Word::letter(l);
                    for &x in tail.letters() {
                        word.push(x);
                    }
                    bucket.push(word);
                }
            }
            bucket.sort();
            buckets[g] = bucket;
        }

        let mut words = Vec::with_capacity(total);
        let mut degrees = Vec::with_capacity(total);
        let mut offsets = Vec::with_capacity(m + 2);
        for (g, bucket) in buckets.into_iter().enumerate() {
            offsets.push(words.len());
            for w in bucket {
                words.push(w);
                degrees.push(g);
            }
        }
        offsets.push(words.len());

        let index: HashMap<Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

        let mut row_start = Vec::with_capacity(words.len() + 1);
        let mut concat = Vec::with_capacity(pairs);
        for (i, u) in words.iter().enumerate() {
            row_start.push(concat.len());
            let limit = offsets[m - degrees[i] + 1];
            for v in &words[..limit] {
                concat.push(index[&u.concat(v)] as u32);
            }
        }
        row_start.push(concat.len());

        let mut lex_order: Vec<usize> = (0..words.len()).collect();
        lex_order.sort_by(|&a, &b| words[a].cmp(&words[b]));

        Ok(TensorSpace {
            dim,
            truncation: m,
            grading,
            words,
            degrees,
            offsets,
            index,
            row_start,
            concat,
            lex_order,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Words ordered by degree, then lexicographically within a degree.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Indices in lexicographic word order.
    pub fn lex_order(&self) -> &[usize] {
        &self.lex_order
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Number of words of degree at most `g`.
    pub fn prefix_len(&self, g: usize) -> usize {
        self.offsets[g.min(self.truncation) + 1]
    }

    /// Index range of the words of degree exactly `g`.
    pub fn degree_range(&self, g: usize) -> std::ops::Range<usize> {
        self.offsets[g]..self.offsets[g + 1]
    }

    fn same(&self, other: &TensorSpace) -> bool {
        std::ptr::eq(self, other)
            || (self.dim == other.dim
                && self.truncation == other.truncation
                && self.grading == other.grading)
    }
}

impl fmt::Debug for TensorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorSpace")
            .field("dim", &self.dim)
            .field("truncation", &self.truncation)
            .field("grading", &self.grading)
            .field("words", &self.words.len())
            .finish()
    }
}

/// An element of the truncated tensor algebra.
#[derive(Clone)]
pub struct TensorElement<C: Coeff = f64> {
    space: Arc<TensorSpace>,
    coeffs: Vec<C>,
}

impl<C: Coeff> TensorElement<C> {
    pub fn zero(space: &Arc<TensorSpace>) -> Self {
        TensorElement { space: space.clone(), coeffs: vec![C::zero(); space.len()] }
    }

    pub fn unit(space: &Arc<TensorSpace>) -> Self {
        Self::constant(space, C::one())
    }

    pub fn constant(space: &Arc<TensorSpace>, c: C) -> Self {
        let mut t = Self::zero(space);
        t.coeffs[0] = c;
        t
    }

    /// The basis letter `ε_l`.
    pub fn letter(space: &Arc<TensorSpace>, l: u8) -> Result<Self> {
        Self::from_word(space, &Word::letter(l), C::one())
    }

    pub fn from_word(space: &Arc<TensorSpace>, w: &Word, c: C) -> Result<Self> {
        let mut t = Self::zero(space);
        t.add_word(w, c)?;
        Ok(t)
    }

    pub fn from_terms<I>(space: &Arc<TensorSpace>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, C)>,
    {
        let mut t = Self::zero(space);
        for (w, c) in terms {
            t.add_word(&w, c)?;
        }
        Ok(t)
    }

    /// Dense coefficients in the space's index order.
    pub fn from_dense(space: &Arc<TensorSpace>, coeffs: Vec<C>) -> Self {
        assert_eq!(coeffs.len(), space.len(), "coefficient vector length");
        TensorElement { space: space.clone(), coeffs }
    }

    /// Adds `c` to the coefficient of `w`. Errors if `w` is outside the space.
    pub fn add_word(&mut self, w: &Word, c: C) -> Result<()> {
        w.validate(self.space.dim)?;
        match self.space.index_of(w) {
            Some(i) => {
                self.coeffs[i].add_assign_ref(&c);
                Ok(())
            }
            None => Err(Error::ExceedsTruncation {
                word: w.clone(),
                degree: w.degree(self.space.grading),
                truncation: self.space.truncation,
            }),
        }
    }

    pub fn space(&self) -> &Arc<TensorSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn truncation(&self) -> usize {
        self.space.truncation
    }

    pub fn grading(&self) -> Grading {
        self.space.grading
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `w`; zero for words outside the space.
    pub fn coefficient(&self, w: &Word) -> C {
        self.space.index_of(w).map(|i| self.coeffs[i].clone()).unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    /// Non-zero terms in lexicographic word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> + '_ {
        self.space
            .lex_order
            .iter()
            .filter(|&&i| !self.coeffs[i].is_zero())
            .map(|&i| (&self.space.words[i], &self.coeffs[i]))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest degree carrying a non-zero coefficient.
    pub fn max_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero()).map(|i| self.space.degrees[i])
    }

    pub fn scale(&self, s: &C) -> Self {
        TensorElement {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale_ref(s)).collect(),
        }
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if self.space.dim != other.space.dim {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim,
                found: other.space.dim,
            });
        }
        if !self.space.same(&other.space) {
            return Err(Error::TruncationMismatch {
                expected: self.space.truncation,
                found: other.space.truncation,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_ref(b);
        }
        Ok(out)
    }

    /// Concatenation product; words above the truncation are dropped.
    pub fn try_product(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        Ok(self.product_unchecked(other))
    }

    fn product_unchecked(&self, other: &Self) -> Self {
        let space = &self.space;
        let m = space.truncation;
        let rhs_nz: Vec<usize> = (0..other.coeffs.len()).filter(|&j| !other.coeffs[j].is_zero()).collect();
        let mut out = vec![C::zero(); space.len()];
        if rhs_nz.is_empty() {
            return TensorElement { space: space.clone(), coeffs: out };
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let limit = space.offsets[m - space.degrees[i] + 1];
            let row = &space.concat[space.row_start[i]..];
            for &j in &rhs_nz {
                if j >= limit {
                    break;
                }
                out[row[j] as usize].mul_add_assign(a, &other.coeffs[j]);
            }
        }
        TensorElement { space: space.clone(), coeffs: out }
    }

    fn check_constant(&self, expected: f64) -> Result<()> {
        let found = self.coeffs[0].to_f64();
        let tol = if C::EXACT { 0.0 } else { 1e-12 };
        if (found - expected).abs() > tol {
            return Err(Error::ConstantTerm { expected, found });
        }
        Ok(())
    }

    /// Truncated exponential `Σ a^k / k!`. Requires a zero constant term.
    pub fn exp(&self) -> Result<Self> {
        self.check_constant(0.0)?;
        let mut x = self.clone();
        x.coeffs[0] = C::zero();
        if x.is_zero() {
            return Ok(Self::unit(&self.space));
        }
        // Every non-constant word has degree >= 1, so powers above m vanish.
        let m = self.space.truncation;
        let mut acc = Self::unit(&self.space);
        for k in (1..=m).rev() {
            let mut next = x.product_unchecked(&acc).scale(&C::from_ratio(1, k as i64));
            next.coeffs[0].add_assign_ref(&C::one());
            acc = next;
        }
        Ok(acc)
    }

    /// Truncated logarithm `Σ (-1)^{k+1} (g-1)^k / k`. Requires constant term 1.
    pub fn log(&self) -> Result<Self> {
        self.check_constant(1.0)?;
        let mut x = self.clone();
        x.coeffs[0] = C::zero();
        let m = self.space.truncation;
        if m == 0 {
            return Ok(Self::zero(&self.space));
        }
        let c = |k: usize| {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            C::from_ratio(sign, k as i64)
        };
        let mut p = Self::constant(&self.space, c(m));
        for k in (1..m).rev() {
            let mut next = x.product_unchecked(&p);
            next.coeffs[0].add_assign_ref(&c(k));
            p = next;
        }
        Ok(x.product_unchecked(&p))
    }

    /// Keeps words of degree `<= m` (in this space's grading), returned in
    /// the space truncated at `min(m, truncation)`.
    pub fn project(&self, m: usize) -> Self {
        if m >= self.space.truncation {
            return self.clone();
        }
        let target = TensorSpace::get(self.space.dim, m, self.space.grading)
            .expect("a smaller truncation of an existing space always fits");
        let n = target.len();
        TensorElement { space: target, coeffs: self.coeffs[..n].to_vec() }
    }

    /// Zeroes every word longer than `k` letters, keeping the space.
    pub fn level_project(&self, k: usize) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if self.space.words[i].len() > k {
                *c = C::zero();
            }
        }
        out
    }

    /// Re-expresses the element in a space with a larger truncation.
    pub fn embed(&self, m: usize) -> Result<Self> {
        if m <= self.space.truncation {
            return Ok(self.project(m));
        }
        let target = TensorSpace::get(self.space.dim, m, self.space.grading)?;
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(target.len(), C::zero());
        Ok(TensorElement { space: target, coeffs })
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.space.same(&other.space), "tensor space mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TensorElement<D> {
        TensorElement { space: self.space.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> TensorElement<f64> {
        self.map(|c| c.to_f64())
    }
}

impl<C: Coeff> PartialEq for TensorElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.space.same(&other.space) && self.coeffs == other.coeffs
    }
}

impl<C: Coeff> fmt::Debug for TensorElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}

impl<C: Coeff> fmt::Display for TensorElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*{w}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Bilinear concatenation product; fails on mismatched spaces.
pub fn tensor_product<C: Coeff>(a: &TensorElement<C>, b: &TensorElement<C>) -> Result<TensorElement<C>> {
    a.try_product(b)
}

/// Keeps exactly the words of graded degree `<= m`.
pub fn graded_project<C: Coeff>(a: &TensorElement<C>, m: usize) -> TensorElement<C> {
    match a.grading() {
        Grading::Graded => a.project(m),
        Grading::Level => {
            let mut out = a.clone();
            for (i, c) in out.coeffs.iter_mut().enumerate() {
                if a.space.words[i].graded_degree() > m {
                    *c = C::zero();
                }
            }
            out
        }
    }
}

pub fn exp_series<C: Coeff>(a: &TensorElement<C>) -> Result<TensorElement<C>> {
    a.exp()
}

pub fn log_series<C: Coeff>(g: &TensorElement<C>) -> Result<TensorElement<C>> {
    g.log()
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<C: Coeff> $tr<&TensorElement<C>> for &TensorElement<C> {
            type Output = TensorElement<C>;
            /// Panics if the operands live in different spaces.
            fn $method(self, rhs: &TensorElement<C>) -> TensorElement<C> {
                self.check_space(rhs).expect("tensor space mismatch");
                let f: fn(&TensorElement<C>, &TensorElement<C>) -> TensorElement<C> = $body;
                f(self, rhs)
            }
        }
        impl<C: Coeff> $tr<TensorElement<C>> for TensorElement<C> {
            type Output = TensorElement<C>;
            fn $method(self, rhs: TensorElement<C>) -> TensorElement<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut out = a.clone();
    for (x, y) in out.coeffs.iter_mut().zip(&b.coeffs) {
        x.add_assign_ref(y);
    }
    out
});
binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    for (x, y) in out.coeffs.iter_mut().zip(&b.coeffs) {
        *x = x.clone() - y.clone();
    }
    out
});
binop!(Mul, mul, |a, b| a.product_unchecked(b));

impl<C: Coeff> AddAssign<&TensorElement<C>> for TensorElement<C> {
    fn add_assign(&mut self, rhs: &TensorElement<C>) {
        self.check_space(rhs).expect("tensor space mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            x.add_assign_ref(y);
        }
    }
}

impl<C: Coeff> SubAssign<&TensorElement<C>> for TensorElement<C> {
    fn sub_assign(&mut self, rhs: &TensorElement<C>) {
        self.check_space(rhs).expect("tensor space mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x = x.clone() - y.clone();
        }
    }
}

impl<C: Coeff> TensorElement<C> {
    /// `self += s * rhs`
    pub fn add_scaled(&mut self, rhs: &TensorElement<C>, s: &C) {
        self.check_space(rhs).expect("tensor space mismatch");
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            x.mul_add_assign(y, s);
        }
    }
}

impl<C: Coeff> Neg for &TensorElement<C> {
    type Output = TensorElement<C>;
    fn neg(self) -> TensorElement<C> {
        self.map(|c| -c.clone())
    }
}
