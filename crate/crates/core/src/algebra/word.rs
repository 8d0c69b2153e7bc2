use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a word is weighted when truncating the tensor algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Grading {
    /// Letter 0 (time) has weight 2, Brownian letters weight 1.
    Graded,
    /// Every letter has weight 1 (plain tensor level).
    Level,
}

impl Grading {
    #[inline]
    pub fn letter_weight(self, letter: u8) -> usize {
        match self {
            Grading::Graded if letter == 0 => 2,
            _ => 1,
        }
    }
}

/// A word over the time-augmented alphabet `{0, ..., d}`.
///
/// Letter 0 is the time direction, letters `1..=d` are Brownian directions.
/// Ordering is dictionary order: a proper prefix sorts before its extensions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    pub fn letter(l: u8) -> Self {
        Word(vec![l])
    }

    /// Builds a word after checking every letter lies in `[0, dim]`.
    pub fn checked(letters: impl Into<Vec<u8>>, dim: usize) -> Result<Self> {
        let w = Word(letters.into());
        w.validate(dim)?;
        Ok(w)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize > dim) {
            Some(&letter) => Err(Error::InvalidLetter { letter, dim }),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&l| l == 0).count()
    }

    /// Length plus the number of time letters.
    pub fn graded_degree(&self) -> usize {
        self.len() + self.zero_count()
    }

    pub fn degree(&self, grading: Grading) -> usize {
        match grading {
            Grading::Graded => self.graded_degree(),
            Grading::Level => self.len(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: u8) {
        self.0.push(l);
    }

    /// Occurrence count of each letter `0..=dim`.
    pub fn content(&self, dim: usize) -> Vec<usize> {
        let mut c = vec![0; dim + 1];
        for &l in &self.0 {
            c[l as usize] += 1;
        }
        c
    }

    /// Cyclic rotation starting at position `k`.
    pub fn rotation(&self, k: usize) -> Word {
        let n = self.len();
        Word((0..n).map(|i| self.0[(i + k) % n]).collect())
    }

    pub fn suffix(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    pub fn prefix(&self, end: usize) -> Word {
        Word(self.0[..end].to_vec())
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for Word {
    fn from(v: [u8; N]) -> Self {
        Word(v.to_vec())
    }
}

/// Dictionary comparison of two words.
pub fn lex_compare(a: &Word, b: &Word) -> Ordering {
    a.0.cmp(&b.0)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    /// Parses `(0,1,1)`, `0,1,1`, `()` or the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Word::empty());
        }
        t.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::BracketParse(format!("bad letter {p:?} in word {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_degree_counts_time_twice() {
        assert_eq!(Word::from([1, 2]).graded_degree(), 2);
        assert_eq!(Word::from([0]).graded_degree(), 2);
        assert_eq!(Word::from([0, 1, 1]).graded_degree(), 4);
        assert_eq!(Word::empty().graded_degree(), 0);
    }

    #[test]
    fn dictionary_order() {
        assert_eq!(lex_compare(&Word::from([0, 1]), &Word::from([1])), Ordering::Less);
        assert_eq!(lex_compare(&Word::from([0]), &Word::from([0, 1])), Ordering::Less);
        assert_eq!(lex_compare(&Word::from([1, 2]), &Word::from([1, 2])), Ordering::Equal);
        assert_eq!(lex_compare(&Word::from([2]), &Word::from([1, 9])), Ordering::Greater);
    }

    #[test]
    fn validate_letters() {
        assert!(Word::checked(vec![0, 3], 3).is_ok());
        assert!(matches!(
            Word::checked(vec![4], 3),
            Err(Error::InvalidLetter { letter: 4, dim: 3 })
        ));
    }

    #[test]
    fn display_and_parse() {
        let w = Word::from([0, 1, 1]);
        assert_eq!(w.to_string(), "(0,1,1)");
        assert_eq!("(0,1,1)".parse::<Word>().unwrap(), w);
        assert_eq!("()".parse::<Word>().unwrap(), Word::empty());
    }
}
