use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A sparse real polynomial in `nvars` variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

/// JSON form of one monomial: `{"coeff": c, "powers": [k1, ..., kn]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, powers: Vec<u32>, c: f64) {
        assert_eq!(powers.len(), self.nvars, "monomial arity");
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(powers).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                out.add_term(e.iter().zip(f).map(|(a, b)| a + b).collect(), c * d);
            }
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * e[i] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| acc * xi.powi(k as i32)))
            .sum()
    }

    /// The same polynomial viewed in `nvars >= self.nvars` variables.
    pub fn extend(&self, nvars: usize) -> Polynomial {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f.resize(nvars, 0);
            out.add_term(f, *c);
        }
        out
    }

    pub fn from_monomials(nvars: usize, ms: &[Monomial]) -> Option<Polynomial> {
        let mut p = Self::zero(nvars);
        for m in ms {
            if m.powers.len() != nvars {
                return None;
            }
            p.add_term(m.powers.clone(), m.coeff);
        }
        Some(p)
    }

    pub fn to_monomials(&self) -> Vec<Monomial> {
        self.terms.iter().map(|(e, c)| Monomial { coeff: *c, powers: e.clone() }).collect()
    }
}
