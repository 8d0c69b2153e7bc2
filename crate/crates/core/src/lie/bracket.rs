use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{standard_factorization, TensorElement, TensorSpace, Word};
use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// A nested Lie bracket of letters, e.g. `[[ε0,ε1],ε1]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketTerm {
    Letter(u8),
    Bracket(Box<BracketTerm>, Box<BracketTerm>),
}

/// Shorthand for `[a, b]`.
pub fn br(a: BracketTerm, b: BracketTerm) -> BracketTerm {
    BracketTerm::Bracket(Box::new(a), Box::new(b))
}

pub fn leaf(l: u8) -> BracketTerm {
    BracketTerm::Letter(l)
}

impl BracketTerm {
    pub fn leaves(&self) -> usize {
        match self {
            BracketTerm::Letter(_) => 1,
            BracketTerm::Bracket(a, b) => a.leaves() + b.leaves(),
        }
    }

    pub fn zero_count(&self) -> usize {
        match self {
            BracketTerm::Letter(l) => usize::from(*l == 0),
            BracketTerm::Bracket(a, b) => a.zero_count() + b.zero_count(),
        }
    }

    pub fn graded_degree(&self) -> usize {
        self.leaves() + self.zero_count()
    }

    pub fn max_letter(&self) -> u8 {
        match self {
            BracketTerm::Letter(l) => *l,
            BracketTerm::Bracket(a, b) => a.max_letter().max(b.max_letter()),
        }
    }

    /// The word read off the leaves from left to right.
    pub fn foliage(&self) -> Word {
        let mut w = Word::empty();
        self.collect_leaves(&mut w);
        w
    }

    fn collect_leaves(&self, w: &mut Word) {
        match self {
            BracketTerm::Letter(l) => w.push(*l),
            BracketTerm::Bracket(a, b) => {
                a.collect_leaves(w);
                b.collect_leaves(w);
            }
        }
    }

    /// Integer word expansion of the nested commutator `[p,q] = pq - qp`.
    pub fn expand_words(&self) -> BTreeMap<Word, i64> {
        match self {
            BracketTerm::Letter(l) => BTreeMap::from([(Word::letter(*l), 1)]),
            BracketTerm::Bracket(a, b) => {
                let ea = a.expand_words();
                let eb = b.expand_words();
                let mut out = BTreeMap::new();
                for (u, cu) in &ea {
                    for (v, cv) in &eb {
                        *out.entry(u.concat(v)).or_insert(0) += cu * cv;
                        *out.entry(v.concat(u)).or_insert(0) -= cu * cv;
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }

    /// Checks letters against the alphabet `{0..dim}`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let l = self.max_letter();
        if l as usize > dim {
            return Err(Error::InvalidLetter { letter: l, dim });
        }
        Ok(())
    }
}

/// Tensor expansion of a bracket term in `space`.
pub fn bracket_expand<C: Coeff>(t: &BracketTerm, space: &Arc<TensorSpace>) -> Result<TensorElement<C>> {
    t.validate(space.dim())?;
    let degree = t.foliage().degree(space.grading());
    if degree > space.truncation() {
        return Err(Error::ExceedsTruncation {
            word: t.foliage(),
            degree,
            truncation: space.truncation(),
        });
    }
    TensorElement::from_terms(
        space,
        t.expand_words().into_iter().map(|(w, c)| (w, C::from_ratio(c, 1))),
    )
}

/// Right-standard bracketing of a Lyndon word: `b(w) = [b(u), b(v)]` where
/// `v` is the longest proper Lyndon suffix of `w = uv`.
pub fn standard_bracketing(w: &Word) -> Result<BracketTerm> {
    match standard_factorization(w)? {
        None => Ok(BracketTerm::Letter(w.letters()[0])),
        Some((u, v)) => Ok(br(standard_bracketing(&u)?, standard_bracketing(&v)?)),
    }
}

impl fmt::Display for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTerm::Letter(l) => write!(f, "{l}"),
            BracketTerm::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

impl fmt::Debug for BracketTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for BracketTerm {
    type Err = Error;

    /// Parses the nested form `[[0,1],1]`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_term(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::BracketParse(format!("trailing input in {s:?}")));
        }
        Ok(t)
    }
}

fn parse_term(c: &[char], pos: &mut usize) -> Result<BracketTerm> {
    let err = |msg: &str, at: usize| Error::BracketParse(format!("{msg} at offset {at}"));
    match c.get(*pos) {
        Some('[') => {
            *pos += 1;
            let a = parse_term(c, pos)?;
            if c.get(*pos) != Some(&',') {
                return Err(err("expected ','", *pos));
            }
            *pos += 1;
            let b = parse_term(c, pos)?;
            if c.get(*pos) != Some(&']') {
                return Err(err("expected ']'", *pos));
            }
            *pos += 1;
            Ok(br(a, b))
        }
        Some(d) if d.is_ascii_digit() => {
            let start = *pos;
            while c.get(*pos).is_some_and(|d| d.is_ascii_digit()) {
                *pos += 1;
            }
            let text: String = c[start..*pos].iter().collect();
            text.parse::<u8>().map(BracketTerm::Letter).map_err(|_| err("letter out of range", start))
        }
        _ => Err(err("expected letter or '['", *pos)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Letter(u8),
    Pair(Box<Repr>, Box<Repr>),
}

impl From<&BracketTerm> for Repr {
    fn from(t: &BracketTerm) -> Self {
        match t {
            BracketTerm::Letter(l) => Repr::Letter(*l),
            BracketTerm::Bracket(a, b) => Repr::Pair(Box::new((&**a).into()), Box::new((&**b).into())),
        }
    }
}

impl From<Repr> for BracketTerm {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Letter(l) => BracketTerm::Letter(l),
            Repr::Pair(a, b) => br((*a).into(), (*b).into()),
        }
    }
}

/// Nested-array JSON form: a letter is an integer, `[a, b]` is a bracket.
impl Serialize for BracketTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BracketTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Repr::deserialize(d).map(Into::into)
    }
}
