//! Lyndon words and their standard factorisation.

use super::Word;
use crate::error::{Error, Result};

/// All Lyndon words over `{0, ..., alphabet_size-1}` of length `1..=max_len`,
/// in lexicographic order (Duval's generation algorithm).
pub fn lyndon_words(alphabet_size: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if alphabet_size == 0 || max_len == 0 {
        return out;
    }
    let top = (alphabet_size - 1) as u8;
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(Word::new(w.clone()));
        let period = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - period]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            Some(l) => *l += 1,
            None => break,
        }
    }
    out
}

/// A non-empty word strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &Word) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|k| *w < w.rotation(k))
}

/// Splits a Lyndon word `w = uv` where `v` is its longest proper Lyndon suffix.
/// Both factors are Lyndon. Returns `None` for single letters.
pub fn standard_factorization(w: &Word) -> Result<Option<(Word, Word)>> {
    if !is_lyndon(w) {
        return Err(Error::NotLyndon(w.clone()));
    }
    if w.len() == 1 {
        return Ok(None);
    }
    for start in 1..w.len() {
        let v = w.suffix(start);
        if is_lyndon(&v) {
            return Ok(Some((w.prefix(start), v)));
        }
    }
    unreachable!("the last letter of a word is always Lyndon")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force enumeration: every word, checked against all its rotations.
    fn brute_force(q: usize, n: usize) -> Vec<Word> {
        let mut all = Vec::new();
        for len in 1..=n {
            let total = q.pow(len as u32);
            for code in 0..total {
                let mut c = code;
                let mut letters = vec![0u8; len];
                for slot in letters.iter_mut().rev() {
                    *slot = (c % q) as u8;
                    c /= q;
                }
                let w = Word::new(letters);
                let rotations_larger = (1..len).all(|k| w < w.rotation(k));
                if rotations_larger {
                    all.push(w);
                }
            }
        }
        all.sort();
        all
    }

    #[test]
    fn binary_examples() {
        let w2: Vec<String> = lyndon_words(2, 2).iter().map(|w| w.to_string()).collect();
        assert_eq!(w2, ["(0)", "(0,1)", "(1)"]);
        let w3: Vec<String> = lyndon_words(2, 3).iter().map(|w| w.to_string()).collect();
        assert_eq!(w3, ["(0)", "(0,0,1)", "(0,1)", "(0,1,1)", "(1)"]);
    }

    #[test]
    fn single_letters_are_lyndon() {
        for l in 0..5u8 {
            assert!(is_lyndon(&Word::letter(l)));
        }
    }

    #[test]
    fn matches_brute_force() {
        for q in 1..=4 {
            for n in 1..=6 {
                assert_eq!(lyndon_words(q, n), brute_force(q, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn factorization() {
        let f = |v: &[u8]| {
            let (u, w) = standard_factorization(&Word::from(v)).unwrap().unwrap();
            (u.to_string(), w.to_string())
        };
        assert_eq!(f(&[1, 2]), ("(1)".into(), "(2)".into()));
        assert_eq!(f(&[1, 1, 2]), ("(1)".into(), "(1,2)".into()));
        assert_eq!(f(&[1, 2, 2]), ("(1,2)".into(), "(2)".into()));
        assert!(standard_factorization(&Word::from([2, 1])).is_err());
    }
}
