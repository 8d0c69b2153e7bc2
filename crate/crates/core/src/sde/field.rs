use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::polynomial::Polynomial;
use crate::algebra::{TensorElement, TensorSpace, Word};
use crate::error::{Error, Result};

/// Black-box field: `f(j, x, out)` writes `V_j(x)` into `out`.
pub type FieldFn = dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
pub enum FieldKind {
    /// `V_j(x) = A_j x + b_j`.
    Affine { a: Vec<DMatrix<f64>>, b: Vec<DVector<f64>> },
    /// `V_j^r(x) = fields[j][r](x)`.
    Polynomial { fields: Vec<Vec<Polynomial>> },
    /// Derivatives by nested central differences, up to `max_order`.
    Generic { f: Arc<FieldFn>, max_order: usize },
}

/// Vector fields `V_0, ..., V_d` on `R^n`; direction 0 is time.
#[derive(Clone)]
pub struct VectorFieldSpec {
    state_dim: usize,
    driving_dim: usize,
    kind: FieldKind,
}

impl fmt::Debug for VectorFieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FieldKind::Affine { .. } => "affine",
            FieldKind::Polynomial { .. } => "polynomial",
            FieldKind::Generic { .. } => "generic",
        };
        write!(f, "VectorFieldSpec(n={}, d={}, {kind})", self.state_dim, self.driving_dim)
    }
}

impl VectorFieldSpec {
    pub fn affine(a: Vec<DMatrix<f64>>, b: Vec<DVector<f64>>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidProblem(format!("{} matrices but {} vectors", a.len(), b.len())));
        }
        let n = b[0].len();
        if a.iter().any(|m| m.nrows() != n || m.ncols() != n) || b.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidProblem(format!("affine field blocks must be {n}x{n} and length {n}")));
        }
        Ok(VectorFieldSpec { state_dim: n, driving_dim: a.len() - 1, kind: FieldKind::Affine { a, b } })
    }

    /// `fields[j][r]` is component `r` of `V_j`.
    pub fn polynomial(fields: Vec<Vec<Polynomial>>) -> Result<Self> {
        let n = fields.first().map_or(0, Vec::len);
        if fields.is_empty() || n == 0 || fields.iter().any(|f| f.len() != n || f.iter().any(|p| p.nvars() != n)) {
            return Err(Error::InvalidProblem("polynomial field must have n components in n variables per direction".into()));
        }
        Ok(VectorFieldSpec { state_dim: n, driving_dim: fields.len() - 1, kind: FieldKind::Polynomial { fields } })
    }

    pub fn generic(state_dim: usize, driving_dim: usize, max_order: usize, f: Arc<FieldFn>) -> Self {
        VectorFieldSpec { state_dim, driving_dim, kind: FieldKind::Generic { f, max_order } }
    }

    /// Scalar linear Stratonovich SDE `dX = aX dt + Σ b_j X ∘ dB^j`.
    pub fn scalar_linear(a: f64, b: &[f64]) -> Self {
        let mut ms = vec![DMatrix::from_element(1, 1, a)];
        ms.extend(b.iter().map(|&bj| DMatrix::from_element(1, 1, bj)));
        let vs = vec![DVector::zeros(1); ms.len()];
        Self::affine(ms, vs).expect("consistent shapes")
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn driving_dim(&self) -> usize {
        self.driving_dim
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// Highest usable derivative order.
    pub fn max_order(&self) -> usize {
        match &self.kind {
            FieldKind::Generic { max_order, .. } => *max_order,
            _ => usize::MAX,
        }
    }

    /// `V_j(x)`.
    pub fn eval(&self, j: usize, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            FieldKind::Affine { a, b } => &a[j] * x + &b[j],
            FieldKind::Polynomial { fields } => {
                DVector::from_iterator(self.state_dim, fields[j].iter().map(|p| p.eval(x.as_slice())))
            }
            FieldKind::Generic { f, .. } => {
                let mut out = DVector::zeros(self.state_dim);
                f(j, x.as_slice(), out.as_mut_slice());
                out
            }
        }
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.max_order() {
            return Err(Error::DerivativeOrder { requested: k, available: self.max_order() });
        }
        Ok(())
    }

    fn check_letters(&self, w: &Word) -> Result<()> {
        w.validate(self.driving_dim)
    }

    /// `g_w = V_{w1} V_{w2} ... V_{wk} id` evaluated at `x`, for every word of
    /// length at most `k_max`. The word `(0,...,0)` of an affine drift-only
    /// field gives `A^k x`.
    pub fn directional_derivative_tower(&self, x: &DVector<f64>, k_max: usize) -> Result<BTreeMap<Word, DVector<f64>>> {
        self.check_order(k_max)?;
        let mut words = vec![Word::empty()];
        let mut frontier = vec![Word::empty()];
        for _ in 0..k_max {
            let mut next = Vec::new();
            for w in &frontier {
                for l in 0..=self.driving_dim as u8 {
                    next.push(Word::letter(l).concat(w));
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        let mut compiled = Compiler::new(self);
        let mut out = BTreeMap::new();
        for w in words {
            let v = compiled.eval_word(&w, x)?;
            out.insert(w, v);
        }
        Ok(out)
    }

    /// `F(z) = Σ_w L[w] g_w(z)` over the words with nonzero coefficient.
    pub fn contract(&self, l: &TensorElement<f64>) -> Result<ContractedField> {
        Tower::new(self, l.space())?.contract(l)
    }
}

/// `g_w` for every word of a tensor space, built once and shared by many
/// contractions. Generic fields store nothing and differentiate on demand.
pub struct Tower {
    field: VectorFieldSpec,
    space: Arc<TensorSpace>,
    affine: Vec<(DMatrix<f64>, DVector<f64>)>,
    poly: Vec<Vec<Polynomial>>,
}

impl Tower {
    pub fn new(field: &VectorFieldSpec, space: &Arc<TensorSpace>) -> Result<Tower> {
        if space.dim() != field.driving_dim {
            return Err(Error::DimensionMismatch { expected: field.driving_dim, found: space.dim() });
        }
        let mut compiler = Compiler::new(field);
        let (mut affine, mut poly) = (Vec::new(), Vec::new());
        match &field.kind {
            FieldKind::Affine { .. } => affine = space.words().iter().map(|w| compiler.affine(w)).collect(),
            FieldKind::Polynomial { .. } => poly = space.words().iter().map(|w| compiler.poly(w)).collect(),
            FieldKind::Generic { .. } => {}
        }
        Ok(Tower { field: field.clone(), space: space.clone(), affine, poly })
    }

    pub fn contract(&self, l: &TensorElement<f64>) -> Result<ContractedField> {
        if !Arc::ptr_eq(l.space(), &self.space) {
            return Err(Error::TruncationMismatch { expected: self.space.truncation(), found: l.truncation() });
        }
        let field = &self.field;
        let n = field.state_dim;
        let nonzero = || l.coeffs().iter().enumerate().filter(|(_, c)| **c != 0.0);
        for (i, _) in nonzero() {
            let w = self.space.word(i);
            field.check_order(w.len())?;
        }
        let inner = match &field.kind {
            FieldKind::Affine { .. } => {
                let mut m = DMatrix::zeros(n, n);
                let mut c = DVector::zeros(n);
                for (i, coef) in nonzero() {
                    let (mw, cw) = &self.affine[i];
                    m += mw * *coef;
                    c += cw * *coef;
                }
                Contracted::Affine(m, c)
            }
            FieldKind::Polynomial { .. } => {
                let mut ps = vec![Polynomial::zero(n); n];
                for (i, coef) in nonzero() {
                    for (p, q) in ps.iter_mut().zip(&self.poly[i]) {
                        *p = p.add(&q.scale(*coef));
                    }
                }
                Contracted::Polynomial(ps)
            }
            FieldKind::Generic { .. } => {
                Contracted::Generic(field.clone(), nonzero().map(|(i, c)| (self.space.word(i).clone(), *c)).collect())
            }
        };
        Ok(ContractedField { n, inner })
    }
}

/// Builds `g_w` for the exact kinds, memoised over suffixes.
struct Compiler<'a> {
    field: &'a VectorFieldSpec,
    affine: HashMap<Word, (DMatrix<f64>, DVector<f64>)>,
    poly: HashMap<Word, Vec<Polynomial>>,
}

impl<'a> Compiler<'a> {
    fn new(field: &'a VectorFieldSpec) -> Self {
        Compiler { field, affine: HashMap::new(), poly: HashMap::new() }
    }

    /// `g_w(x) = M_w x + c_w`, with `M_{iw} = M_w A_i`, `c_{iw} = M_w b_i`.
    fn affine(&mut self, w: &Word) -> (DMatrix<f64>, DVector<f64>) {
        if let Some(v) = self.affine.get(w) {
            return v.clone();
        }
        let FieldKind::Affine { a, b } = &self.field.kind else { unreachable!() };
        let n = self.field.state_dim;
        let out = if w.is_empty() {
            (DMatrix::identity(n, n), DVector::zeros(n))
        } else {
            let (mw, _) = self.affine(&w.suffix(1));
            let i = w.letters()[0] as usize;
            (&mw * &a[i], &mw * &b[i])
        };
        self.affine.insert(w.clone(), out.clone());
        out
    }

    /// `g_{iw} = Σ_r ∂_r g_w · V_i^r`.
    fn poly(&mut self, w: &Word) -> Vec<Polynomial> {
        if let Some(v) = self.poly.get(w) {
            return v.clone();
        }
        let FieldKind::Polynomial { fields } = &self.field.kind else { unreachable!() };
        let n = self.field.state_dim;
        let out: Vec<Polynomial> = if w.is_empty() {
            (0..n).map(|r| Polynomial::var(n, r)).collect()
        } else {
            let g = self.poly(&w.suffix(1));
            let vi = &fields[w.letters()[0] as usize];
            g.iter()
                .map(|gc| (0..n).fold(Polynomial::zero(n), |acc, r| acc.add(&gc.derivative(r).mul(&vi[r]))))
                .collect()
        };
        self.poly.insert(w.clone(), out.clone());
        out
    }

    fn eval_word(&mut self, w: &Word, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.field.check_letters(w)?;
        Ok(match &self.field.kind {
            FieldKind::Affine { .. } => {
                let (m, c) = self.affine(w);
                m * x + c
            }
            FieldKind::Polynomial { .. } => {
                let g = self.poly(w);
                DVector::from_iterator(x.len(), g.iter().map(|p| p.eval(x.as_slice())))
            }
            FieldKind::Generic { .. } => generic_eval(self.field, w.letters(), x),
        })
    }
}

/// `g_w(x)` by nested central differences along `V_{w1}(x)`.
fn generic_eval(field: &VectorFieldSpec, w: &[u8], x: &DVector<f64>) -> DVector<f64> {
    let Some((&first, rest)) = w.split_first() else {
        return x.clone();
    };
    let h = f64::EPSILON.powf(1.0 / (w.len() as f64 + 2.0));
    let v = field.eval(first as usize, x);
    let plus = generic_eval(field, rest, &(x + &v * h));
    let minus = generic_eval(field, rest, &(x - &v * h));
    (plus - minus) / (2.0 * h)
}

#[derive(Clone)]
enum Contracted {
    Affine(DMatrix<f64>, DVector<f64>),
    Polynomial(Vec<Polynomial>),
    Generic(VectorFieldSpec, Vec<(Word, f64)>),
}

/// A vector field `F(z) = Σ_w L[w] g_w(z)` ready for evaluation.
#[derive(Clone)]
pub struct ContractedField {
    n: usize,
    inner: Contracted,
}

impl ContractedField {
    pub fn eval(&self, z: &DVector<f64>) -> DVector<f64> {
        match &self.inner {
            Contracted::Affine(m, c) => m * z + c,
            Contracted::Polynomial(ps) => DVector::from_iterator(self.n, ps.iter().map(|p| p.eval(z.as_slice()))),
            Contracted::Generic(field, terms) => {
                let mut out = DVector::zeros(self.n);
                for (w, c) in terms {
                    out += generic_eval(field, w.letters(), z) * *c;
                }
                out
            }
        }
    }

    /// The affine form `(M, c)` when the contraction is affine.
    pub fn as_affine(&self) -> Option<(&DMatrix<f64>, &DVector<f64>)> {
        match &self.inner {
            Contracted::Affine(m, c) => Some((m, c)),
            _ => None,
        }
    }
}
