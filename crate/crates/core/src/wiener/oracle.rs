use std::sync::Arc;

use crate::algebra::{TensorElement, TensorSpace, Word};
use crate::coeff::Coeff;
use crate::error::Result;

/// Closed-form coefficient of `w` in the expected signature of
/// time-augmented Brownian motion at time `t`.
///
/// A word contributes only if it splits into blocks `(0)` and `(i,i)`, which
/// happens in at most one way. With `k` blocks of which `p` are pairs the
/// coefficient is `2^-p / k! * t^k`.
pub fn expected_signature_coefficient<C: Coeff>(w: &Word, t: &C) -> C {
    let letters = w.letters();
    let (mut k, mut p, mut pos) = (0u32, 0u32, 0);
    while pos < letters.len() {
        match letters[pos] {
            0 => pos += 1,
            l if letters.get(pos + 1) == Some(&l) => {
                p += 1;
                pos += 2;
            }
            _ => return C::zero(),
        }
        k += 1;
    }
    let fact: i64 = (1..=k as i64).product();
    C::from_ratio(1, fact << p) * t.powi(k)
}

/// `exp(t ε0 + (t/2) Σ εi⊗εi)` truncated at graded degree `m`.
pub fn expected_signature<C: Coeff>(d: usize, m: usize, t: &C) -> Result<TensorElement<C>> {
    expected_signature_in(&TensorSpace::graded(d, m)?, t)
}

pub fn expected_signature_in<C: Coeff>(space: &Arc<TensorSpace>, t: &C) -> Result<TensorElement<C>> {
    let mut gen = TensorElement::zero(space);
    if space.truncation() >= 2 {
        gen.add_word(&Word::letter(0), t.clone())?;
        let half = t.clone() * C::from_ratio(1, 2);
        for i in 1..=space.dim() as u8 {
            gen.add_word(&Word::from([i, i]), half.clone())?;
        }
    }
    gen.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, BigRational};

    #[test]
    fn coefficient_examples() {
        let one = ratio(1, 1);
        let c = |v: &[u8]| expected_signature_coefficient::<BigRational>(&Word::from(v), &one);
        assert_eq!(c(&[]), ratio(1, 1));
        assert_eq!(c(&[1, 1]), ratio(1, 2));
        assert_eq!(c(&[0, 1, 1]), ratio(1, 4));
        assert_eq!(c(&[1]), ratio(0, 1));
        assert_eq!(c(&[0, 0]), ratio(1, 2));
        assert_eq!(c(&[1, 2]), ratio(0, 1));
        assert_eq!(c(&[1, 1, 2, 2]), ratio(1, 8));
        let t = ratio(3, 1);
        assert_eq!(expected_signature_coefficient(&Word::from([0, 2, 2]), &t), ratio(9, 4));
    }

    #[test]
    fn small_expansion() {
        let t = ratio(5, 2);
        let e = expected_signature(1, 3, &t).unwrap();
        let terms: Vec<_> = e.terms().map(|(w, c)| (w.to_string(), c.clone())).collect();
        assert_eq!(terms, [("()".into(), ratio(1, 1)), ("(0)".into(), t.clone()), ("(1,1)".into(), ratio(5, 4))]);
    }
}
