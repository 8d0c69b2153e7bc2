//! Independent reference implementations used only by the tests: a naive
//! sparse tensor algebra over exact rationals and brute-force helpers.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Letter 0 counts twice.
pub fn gdeg(w: &[u8]) -> usize {
    w.len() + w.iter().filter(|&&l| l == 0).count()
}

/// Sparse truncated tensor: word -> coefficient, graded degree <= m.
#[derive(Clone, Debug, PartialEq)]
pub struct Naive {
    pub m: usize,
    pub terms: BTreeMap<Vec<u8>, Q>,
}

impl Naive {
    pub fn zero(m: usize) -> Self {
        Naive { m, terms: BTreeMap::new() }
    }

    pub fn unit(m: usize) -> Self {
        Self::word(m, &[], Q::one())
    }

    pub fn word(m: usize, w: &[u8], c: Q) -> Self {
        let mut n = Self::zero(m);
        n.add(w, c);
        n
    }

    pub fn add(&mut self, w: &[u8], c: Q) {
        if gdeg(w) > self.m {
            return;
        }
        let e = self.terms.entry(w.to_vec()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(w);
        }
    }

    pub fn plus(&self, o: &Naive) -> Naive {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add(w, c.clone());
        }
        r
    }

    pub fn scale(&self, s: &Q) -> Naive {
        let mut r = Naive::zero(self.m);
        for (w, c) in &self.terms {
            r.add(w, c * s);
        }
        r
    }

    pub fn mul(&self, o: &Naive) -> Naive {
        let mut r = Naive::zero(self.m);
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                let w: Vec<u8> = u.iter().chain(v).copied().collect();
                r.add(&w, a * b);
            }
        }
        r
    }

    /// exp of an element without constant term: Σ a^k / k! until the powers vanish.
    pub fn exp(&self) -> Naive {
        assert!(!self.terms.contains_key(&vec![]));
        let mut out = Naive::unit(self.m);
        let mut pow = Naive::unit(self.m);
        for k in 1..=self.m {
            pow = pow.mul(self).scale(&q(1, k as i64));
            if pow.terms.is_empty() {
                break;
            }
            out = out.plus(&pow);
        }
        out
    }

    pub fn get(&self, w: &[u8]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }
}

/// `E[S(B)_{0,T}] = exp(T ε0 + T/2 Σ εi εi)` built by the naive series.
pub fn naive_expected_signature(d: u8, m: usize, t: &Q) -> Naive {
    let mut gen = Naive::word(m, &[0], t.clone());
    for i in 1..=d {
        gen.add(&[i, i], t * q(1, 2));
    }
    gen.exp()
}

/// Every word over `0..alphabet` with length <= `max_len`.
pub fn all_words(alphabet: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 0..alphabet {
                let mut v: Vec<u8> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Strictly smaller than every proper rotation.
pub fn brute_is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|k| {
        let rot: Vec<u8> = w[k..].iter().chain(&w[..k]).copied().collect();
        w < rot.as_slice()
    })
}

/// `E[Z^k]` for a standard normal.
pub fn normal_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(|j| j as f64).product()
    }
}

/// Splits `w` into blocks `(0)` and `(i,i)`; the coefficient is
/// `T^k / k! · (1/2)^p` with `k` blocks of which `p` are pairs.
pub fn block_oracle(w: &[u8], t: &Q) -> Q {
    let (mut k, mut p, mut i) = (0i64, 0i32, 0);
    while i < w.len() {
        if w[i] == 0 {
            i += 1;
        } else if i + 1 < w.len() && w[i + 1] == w[i] {
            i += 2;
            p += 1;
        } else {
            return Q::zero();
        }
        k += 1;
    }
    let fact: i64 = (1..=k).product();
    let mut c = q(1, fact) * q(1, 1 << p);
    for _ in 0..k {
        c *= t;
    }
    c
}
