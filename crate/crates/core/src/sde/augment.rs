use std::sync::Arc;

use super::field::{FieldKind, VectorFieldSpec};
use super::polynomial::Polynomial;
use crate::algebra::Word;
use crate::error::{Error, Result};

/// Largest supported signature level.
pub const MAX_LEVEL: usize = 4;
/// Largest augmented state.
pub const MAX_STATE: usize = 4096;

/// Positions of the signature coordinates inside the augmented state.
/// Words are over the state letters `1..=n`.
#[derive(Clone, Debug)]
pub struct SignatureLayout {
    pub n: usize,
    pub level: usize,
    /// Words in order of length, then lexicographic.
    pub words: Vec<Word>,
}

impl SignatureLayout {
    pub fn new(n: usize, level: usize) -> Self {
        let mut words = Vec::new();
        let mut frontier = vec![Word::empty()];
        for _ in 0..level {
            let mut next = Vec::new();
            for w in &frontier {
                for l in 1..=n as u8 {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        SignatureLayout { n, level, words }
    }

    pub fn state_dim(&self) -> usize {
        self.n + self.words.len()
    }

    /// State index of the signature coordinate for `w`.
    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.words.iter().position(|v| v == w).map(|p| self.n + p)
    }
}

/// Augments `v` with the signature of the solution up to `level`:
/// `dS^{(w,r)} = S^{(w)} dX^r = S^{(w)} Σ_j V_j^r(X) ∘ dB^j`, `S^∅ = 1`.
/// Exact kinds give a polynomial field; generic kinds stay generic.
pub fn signature_level_system(v: &VectorFieldSpec, level: usize) -> Result<(VectorFieldSpec, SignatureLayout)> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::Unsupported(format!("signature level {level} (supported 1..={MAX_LEVEL})")));
    }
    let n = v.state_dim();
    let layout = SignatureLayout::new(n, level);
    let big = layout.state_dim();
    if big > MAX_STATE {
        return Err(Error::Unsupported(format!("augmented state of {big} coordinates exceeds {MAX_STATE}")));
    }
    let d = v.driving_dim();
    // parent index of each signature word (None for level one)
    let parents: Vec<(Option<usize>, usize)> = layout
        .words
        .iter()
        .map(|w| {
            let r = *w.letters().last().expect("non-empty") as usize - 1;
            let parent = (w.len() > 1).then(|| layout.index_of(&w.prefix(w.len() - 1)).expect("prefix present"));
            (parent, r)
        })
        .collect();
    let field = match v.kind() {
        FieldKind::Affine { .. } | FieldKind::Polynomial { .. } => {
            let base: Vec<Vec<Polynomial>> = (0..=d).map(|j| base_polys(v, j)).collect();
            let fields = (0..=d)
                .map(|j| {
                    let mut comps: Vec<Polynomial> = base[j].iter().map(|p| p.extend(big)).collect();
                    for &(parent, r) in &parents {
                        let vr = base[j][r].extend(big);
                        comps.push(match parent {
                            None => vr,
                            Some(pi) => Polynomial::var(big, pi).mul(&vr),
                        });
                    }
                    comps
                })
                .collect();
            VectorFieldSpec::polynomial(fields)?
        }
        FieldKind::Generic { max_order, .. } => {
            let inner = v.clone();
            VectorFieldSpec::generic(
                big,
                d,
                *max_order,
                Arc::new(move |j, x: &[f64], out: &mut [f64]| {
                    let vx = inner.eval(j, &nalgebra::DVector::from_column_slice(&x[..n]));
                    out[..n].copy_from_slice(vx.as_slice());
                    for (k, &(parent, r)) in parents.iter().enumerate() {
                        out[n + k] = parent.map_or(1.0, |p| x[p]) * vx[r];
                    }
                }),
            )
        }
    };
    Ok((field, layout))
}

/// Components of `V_j` as polynomials in the state.
fn base_polys(v: &VectorFieldSpec, j: usize) -> Vec<Polynomial> {
    let n = v.state_dim();
    match v.kind() {
        FieldKind::Affine { a, b } => (0..n)
            .map(|r| {
                let mut p = Polynomial::constant(n, b[j][r]);
                for c in 0..n {
                    p = p.add(&Polynomial::var(n, c).scale(a[j][(r, c)]));
                }
                p
            })
            .collect(),
        FieldKind::Polynomial { fields } => fields[j].clone(),
        FieldKind::Generic { .. } => unreachable!("generic fields are wrapped separately"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn layout_and_level_one() {
        let v = VectorFieldSpec::scalar_linear(0.1, &[0.3]);
        let (aug, layout) = signature_level_system(&v, 2).unwrap();
        assert_eq!(layout.state_dim(), 3);
        assert_eq!(layout.index_of(&Word::from([1, 1])), Some(2));
        let x = DVector::from_vec(vec![2.0, 0.5, 0.25]);
        // dS^(1) = dX, dS^(1,1) = S^(1) dX
        let f1 = aug.eval(1, &x);
        assert_eq!(f1.as_slice(), &[0.6, 0.6, 0.5 * 0.6]);
        assert!(signature_level_system(&v, 5).is_err());
    }

    #[test]
    fn triangular() {
        // the level-k coordinates depend only on X and levels below k
        let v = VectorFieldSpec::affine(
            vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)],
            vec![DVector::zeros(2), DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])],
        )
        .unwrap();
        let (aug, layout) = signature_level_system(&v, 3).unwrap();
        let FieldKind::Polynomial { fields } = aug.kind() else { panic!() };
        for (k, w) in layout.words.iter().enumerate() {
            for comp in fields.iter().map(|f| &f[2 + k]) {
                for (powers, _) in comp.terms() {
                    for (idx, &e) in powers.iter().enumerate() {
                        if e > 0 && idx >= 2 {
                            assert!(layout.words[idx - 2].len() < w.len());
                        }
                    }
                }
            }
        }
    }
}
