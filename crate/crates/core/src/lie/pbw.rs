//! Coordinates in the symmetrised Lyndon (PBW) basis.
//!
//! Every map involved preserves letter content, so the basis change splits
//! into independent blocks indexed by content (occurrence count per letter).
//! Each block is square by the PBW theorem and is solved directly. Block
//! expansions are exact integers over `n!` and are memoised process-wide.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::bracket::standard_bracketing;
use crate::algebra::{is_lyndon, lyndon_words, TensorElement, TensorSpace, Word};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// A non-decreasing list of Lyndon words, naming the basis element
/// `(b(l_1), ..., b(l_n))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwKey(Vec<Word>);

impl PbwKey {
    pub fn new(mut words: Vec<Word>) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| !is_lyndon(w)) {
            return Err(Error::NotLyndon(w.clone()));
        }
        words.sort();
        Ok(PbwKey(words))
    }

    pub fn words(&self) -> &[Word] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn graded_degree(&self) -> usize {
        self.0.iter().map(Word::graded_degree).sum()
    }

    fn content(&self, dim: usize) -> Vec<usize> {
        let mut c = vec![0; dim + 1];
        for w in &self.0 {
            for &l in w.letters() {
                c[l as usize] += 1;
            }
        }
        c
    }
}

impl fmt::Display for PbwKey {
    /// Single factors print as their bracketing; products as a tuple.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |w: &Word| standard_bracketing(w).map(|b| b.to_string()).unwrap_or_default();
        match self.0.as_slice() {
            [] => f.write_str("1"),
            [w] => f.write_str(&render(w)),
            ws => {
                f.write_str("(")?;
                for (i, w) in ws.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(&render(w))?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for PbwKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Coordinates of a tensor in the symmetrised Lyndon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PbwCoordinates<C: Coeff = f64> {
    pub dim: usize,
    pub coords: BTreeMap<PbwKey, C>,
}

impl<C: Coeff> PbwCoordinates<C> {
    pub fn get(&self, key: &PbwKey) -> C {
        self.coords.get(key).cloned().unwrap_or_else(C::zero)
    }

    /// Coordinate on the basis element given by a list of Lyndon words.
    pub fn coefficient(&self, words: &[&[u8]]) -> Result<C> {
        let key = PbwKey::new(words.iter().map(|w| Word::from(*w)).collect())?;
        Ok(self.get(&key))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PbwKey, &C)> {
        self.coords.iter()
    }
}

struct PbwBlock {
    words: Vec<Word>,
    word_index: HashMap<Word, usize>,
    keys: Vec<PbwKey>,
    key_index: HashMap<PbwKey, usize>,
    /// Sparse columns: `(row, numerator)`; the column value is `numerator / denominator`.
    columns: Vec<Vec<(usize, i64)>>,
    denominators: Vec<i64>,
}

type BlockKey = (usize, Vec<usize>);

fn block_cache() -> &'static Mutex<HashMap<BlockKey, Arc<PbwBlock>>> {
    static CACHE: OnceLock<Mutex<HashMap<BlockKey, Arc<PbwBlock>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn lyndon_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<Vec<Word>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<Word>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn block(dim: usize, content: &[usize]) -> Result<Arc<PbwBlock>> {
    let key = (dim, content.to_vec());
    if let Some(b) = block_cache().lock().unwrap().get(&key) {
        return Ok(b.clone());
    }
    let b = Arc::new(build_block(dim, content)?);
    Ok(block_cache().lock().unwrap().entry(key).or_insert(b).clone())
}

fn words_with_content(content: &[usize]) -> Vec<Word> {
    fn rec(remaining: &mut [usize], left: usize, cur: &mut Vec<u8>, out: &mut Vec<Word>) {
        if left == 0 {
            out.push(Word::new(cur.clone()));
            return;
        }
        for l in 0..remaining.len() {
            if remaining[l] > 0 {
                remaining[l] -= 1;
                cur.push(l as u8);
                rec(remaining, left - 1, cur, out);
                cur.pop();
                remaining[l] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let total = content.iter().sum();
    rec(&mut content.to_vec(), total, &mut Vec::new(), &mut out);
    out
}

fn build_block(dim: usize, content: &[usize]) -> Result<PbwBlock> {
    let total: usize = content.iter().sum();
    let words = words_with_content(content);
    let word_index: HashMap<Word, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();

    let lyndon = {
        let k = (dim, total);
        let cached = lyndon_cache().lock().unwrap().get(&k).cloned();
        match cached {
            Some(l) => l,
            None => {
                let l = Arc::new(lyndon_words(dim + 1, total.max(1)));
                lyndon_cache().lock().unwrap().insert(k, l.clone());
                l
            }
        }
    };
    let candidates: Vec<(&Word, Vec<usize>)> = lyndon
        .iter()
        .map(|w| (w, w.content(dim)))
        .filter(|(_, c)| c.iter().zip(content).all(|(a, b)| a <= b))
        .collect();

    fn choose(
        cands: &[(&Word, Vec<usize>)],
        start: usize,
        remaining: &mut Vec<usize>,
        cur: &mut Vec<Word>,
        out: &mut Vec<PbwKey>,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(PbwKey(cur.clone()));
            return;
        }
        for idx in start..cands.len() {
            let (w, c) = &cands[idx];
            if c.iter().zip(remaining.iter()).all(|(a, b)| a <= b) {
                for (r, a) in remaining.iter_mut().zip(c) {
                    *r -= a;
                }
                cur.push((*w).clone());
                choose(cands, idx, remaining, cur, out);
                cur.pop();
                for (r, a) in remaining.iter_mut().zip(c) {
                    *r += a;
                }
            }
        }
    }
    let mut keys = Vec::new();
    choose(&candidates, 0, &mut content.to_vec(), &mut Vec::new(), &mut keys);
    if keys.len() != words.len() {
        return Err(Error::SingularSystem(content.to_vec()));
    }
    let key_index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();

    let mut columns = Vec::with_capacity(keys.len());
    let mut denominators = Vec::with_capacity(keys.len());
    for key in &keys {
        let (col, den) = symmetrised_integer_expansion(key)?;
        columns.push(
            col.into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(w, c)| (word_index[&w], c))
                .collect(),
        );
        denominators.push(den);
    }
    Ok(PbwBlock { words, word_index, keys, key_index, columns, denominators })
}

/// `n! * (b(l_1), ..., b(l_n))` as integer word coefficients, with `n!`.
fn symmetrised_integer_expansion(key: &PbwKey) -> Result<(HashMap<Word, i64>, i64)> {
    let n = key.len();
    let factors: Vec<Vec<(Word, i64)>> = key
        .0
        .iter()
        .map(|w| standard_bracketing(w).map(|b| b.expand_words().into_iter().collect()))
        .collect::<Result<_>>()?;
    let mut sums: Vec<HashMap<Word, i64>> = Vec::with_capacity(1 << n);
    sums.push(HashMap::from([(Word::empty(), 1)]));
    for mask in 1usize..(1 << n) {
        let mut acc: HashMap<Word, i64> = HashMap::new();
        for (i, f) in factors.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            for (u, cu) in &sums[mask ^ (1 << i)] {
                for (v, cv) in f {
                    *acc.entry(u.concat(v)).or_insert(0) += cu * cv;
                }
            }
        }
        sums.push(acc);
    }
    let factorial = (1..=n as i64).product();
    Ok((sums.pop().expect("non-empty"), factorial))
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_dense<C: Coeff>(mut a: Vec<Vec<C>>, mut b: Vec<C>, content: &[usize]) -> Result<Vec<C>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|c| c.magnitude()).fold(0.0, f64::max);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))
            .expect("non-empty range");
        let mag = a[pivot][col].magnitude();
        if mag == 0.0 || (!C::EXACT && mag <= 1e-13 * scale) {
            return Err(Error::SingularSystem(content.to_vec()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / p.clone();
            let (upper, lower) = a.split_at_mut(row);
            let src = &upper[col];
            for (dst, s) in lower[0][col..].iter_mut().zip(&src[col..]) {
                if !s.is_zero() {
                    *dst = dst.clone() - factor.clone() * s.clone();
                }
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }
    let mut x = vec![C::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            if !a[row][k].is_zero() {
                acc = acc - a[row][k].clone() * x[k].clone();
            }
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}

/// Unique coordinates of `a` in the symmetrised Lyndon basis.
pub fn pbw_coordinates<C: Coeff>(a: &TensorElement<C>) -> Result<PbwCoordinates<C>> {
    let dim = a.dim();
    let mut classes: BTreeMap<Vec<usize>, Vec<(Word, C)>> = BTreeMap::new();
    for (w, c) in a.terms() {
        classes.entry(w.content(dim)).or_default().push((w.clone(), c.clone()));
    }
    let mut coords = BTreeMap::new();
    for (content, entries) in classes {
        let blk = block(dim, &content)?;
        let n = blk.words.len();
        let mut rhs = vec![C::zero(); n];
        for (w, c) in entries {
            rhs[blk.word_index[&w]] = c;
        }
        let mut m = vec![vec![C::zero(); n]; n];
        for (j, col) in blk.columns.iter().enumerate() {
            for &(i, num) in col {
                m[i][j] = C::from_ratio(num, blk.denominators[j]);
            }
        }
        let x = solve_dense(m, rhs, &content)?;
        for (key, c) in blk.keys.iter().zip(x) {
            if !c.is_zero() {
                coords.insert(key.clone(), c);
            }
        }
    }
    Ok(PbwCoordinates { dim, coords })
}

/// `Σ c_K (b(l_1), ..., b(l_n))` in `space`.
pub fn pbw_expand<C: Coeff>(c: &PbwCoordinates<C>, space: &Arc<TensorSpace>) -> Result<TensorElement<C>> {
    if c.dim != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: c.dim });
    }
    let mut out = TensorElement::zero(space);
    for (key, coef) in &c.coords {
        let blk = block(c.dim, &key.content(c.dim))?;
        let j = blk.key_index[key];
        let den = blk.denominators[j];
        for &(i, num) in &blk.columns[j] {
            out.add_word(&blk.words[i], coef.clone() * C::from_ratio(num, den))?;
        }
    }
    Ok(out)
}

/// True iff every coordinate on a product of two or more basis elements
/// (and on the unit) is within `tol`.
pub fn is_lie_element<C: Coeff>(a: &TensorElement<C>, tol: f64) -> Result<bool> {
    let c = pbw_coordinates(a)?;
    Ok(c.coords.iter().all(|(k, v)| k.len() == 1 || v.magnitude() <= tol))
}
