//! The degree-7 formula on three-dimensional Wiener space.
//!
//! Each entry is indexed by a degree-7 Gaussian point `z ∈ R^3` and a sign
//! vector `(η1, η2, η3, η0) ∈ {±1}^4`. The Lie polynomial is stored as a term
//! table: every row is `c · Πη · z_i · bracket` with the sign product and the
//! Gaussian factor optional.

use serde_json::{Map, Value};

use super::formula::{CubatureEntry, WienerCubatureFormula};
use crate::error::{Error, Result};
use crate::lie::{BracketTerm, LiePolynomial};
use crate::measures::{bernoulli_full, check_moments, gaussian_cubature, Measure, PointCubature};

/// Coefficient `n/d` or `n/(d√3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coef {
    R(i64, i64),
    S(i64, i64),
}

impl Coef {
    pub fn value(self) -> f64 {
        match self {
            Coef::R(n, d) => n as f64 / d as f64,
            Coef::S(n, d) => n as f64 / (d as f64 * 3f64.sqrt()),
        }
    }
}

/// One row of the term table. `eta` lists sign indices (0 stands for η0).
#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub c: Coef,
    pub eta: &'static [u8],
    pub z: Option<u8>,
    pub bracket: &'static str,
}

use Coef::{R, S};
use Term as T;

pub const TERMS: &[Term] = &[
    // time
    T { c: R(1, 1), eta: &[], z: None, bracket: "0" },
    // Brownian increments
    T { c: R(1, 1), eta: &[], z: Some(1), bracket: "1" },
    T { c: R(1, 1), eta: &[], z: Some(2), bracket: "2" },
    T { c: R(1, 1), eta: &[], z: Some(3), bracket: "3" },
    // degree 3, Gaussian weighted
    T { c: R(1, 12), eta: &[], z: Some(1), bracket: "[[1,2],2]" },
    T { c: R(1, 12), eta: &[], z: Some(1), bracket: "[[1,3],3]" },
    T { c: R(1, 12), eta: &[], z: Some(2), bracket: "[[2,1],1]" },
    T { c: R(1, 12), eta: &[], z: Some(2), bracket: "[[2,3],3]" },
    T { c: R(1, 12), eta: &[], z: Some(3), bracket: "[[3,1],1]" },
    T { c: R(1, 12), eta: &[], z: Some(3), bracket: "[[3,2],2]" },
    // degree 3, sign pair (1,2)
    T { c: R(1, 6), eta: &[1, 2], z: Some(1), bracket: "[[1,2],2]" },
    T { c: R(1, 6), eta: &[1, 2], z: Some(2), bracket: "[[2,3],3]" },
    T { c: R(1, 6), eta: &[1, 2], z: Some(3), bracket: "[[3,1],1]" },
    // degree 3, sign pair (1,3)
    T { c: R(1, 6), eta: &[1, 3], z: Some(1), bracket: "[[1,3],3]" },
    T { c: R(1, 6), eta: &[1, 3], z: Some(2), bracket: "[[2,1],1]" },
    T { c: R(1, 6), eta: &[1, 3], z: Some(3), bracket: "[[3,2],2]" },
    // degree 3, sign pair (2,3)
    T { c: R(1, 6), eta: &[2, 3], z: Some(1), bracket: "[[1,2],3]" },
    T { c: R(1, 6), eta: &[2, 3], z: Some(2), bracket: "[[2,3],1]" },
    T { c: R(1, 6), eta: &[2, 3], z: Some(3), bracket: "[[3,1],2]" },
    // degree 4, time brackets
    T { c: R(1, 12), eta: &[], z: None, bracket: "[[0,1],1]" },
    T { c: R(1, 12), eta: &[], z: None, bracket: "[[0,2],2]" },
    T { c: R(1, 12), eta: &[], z: None, bracket: "[[0,3],3]" },
    // area (1,2)
    T { c: S(1, 2), eta: &[1, 2, 0], z: None, bracket: "[1,2]" },
    T { c: S(-1, 2), eta: &[2], z: Some(1), bracket: "[1,2]" },
    T { c: S(1, 2), eta: &[1], z: Some(2), bracket: "[1,2]" },
    // area (1,3)
    T { c: S(1, 2), eta: &[1, 3, 0], z: None, bracket: "[1,3]" },
    T { c: S(1, 2), eta: &[3], z: Some(1), bracket: "[1,3]" },
    T { c: S(1, 2), eta: &[1], z: Some(3), bracket: "[1,3]" },
    // area (2,3)
    T { c: S(1, 2), eta: &[2, 3, 0], z: None, bracket: "[2,3]" },
    T { c: S(1, 2), eta: &[3], z: Some(2), bracket: "[2,3]" },
    T { c: S(1, 2), eta: &[2], z: Some(3), bracket: "[2,3]" },
    // time areas
    T { c: S(1, 2), eta: &[3], z: None, bracket: "[0,3]" },
    T { c: S(-1, 2), eta: &[2], z: None, bracket: "[0,2]" },
    T { c: S(-1, 2), eta: &[1], z: None, bracket: "[0,1]" },
    // degree 4, three signs
    T { c: S(1, 24), eta: &[1, 2, 0], z: None, bracket: "[[[3,2],3],1]" },
    T { c: S(1, 24), eta: &[1, 2, 0], z: None, bracket: "[[[1,2],3],3]" },
    T { c: S(1, 24), eta: &[1, 2, 0], z: None, bracket: "[[[1,3],3],2]" },
    T { c: S(1, 24), eta: &[1, 3, 0], z: None, bracket: "[[[1,3],2],2]" },
    T { c: S(1, 24), eta: &[1, 3, 0], z: None, bracket: "[[[1,2],2],3]" },
    T { c: S(1, 24), eta: &[1, 3, 0], z: None, bracket: "[[[2,3],2],1]" },
    T { c: S(1, 24), eta: &[2, 3, 0], z: None, bracket: "[[[2,1],1],3]" },
    T { c: S(1, 24), eta: &[2, 3, 0], z: None, bracket: "[[[1,3],1],2]" },
    T { c: S(1, 24), eta: &[2, 3, 0], z: None, bracket: "[[[2,3],1],1]" },
    T { c: S(1, 12), eta: &[1, 2, 0], z: None, bracket: "[[[1,2],2],2]" },
    T { c: S(1, 12), eta: &[1, 2, 0], z: None, bracket: "[[[1,2],1],1]" },
    T { c: S(1, 12), eta: &[1, 3, 0], z: None, bracket: "[[[1,3],3],3]" },
    T { c: S(1, 12), eta: &[1, 3, 0], z: None, bracket: "[[[1,3],1],1]" },
    T { c: S(1, 12), eta: &[2, 3, 0], z: None, bracket: "[[[2,3],3],3]" },
    T { c: S(1, 12), eta: &[2, 3, 0], z: None, bracket: "[[[2,3],2],2]" },
    // degree 5, all three letters
    T { c: R(1, 360), eta: &[], z: Some(1), bracket: "[[[[2,3],3],2],1]" },
    T { c: R(1, 360), eta: &[], z: Some(3), bracket: "[[[[1,2],2],3],1]" },
    T { c: R(1, 360), eta: &[], z: Some(1), bracket: "[[[[3,1],2],2],3]" },
    T { c: R(1, 360), eta: &[], z: Some(3), bracket: "[[[[2,1],1],3],2]" },
    T { c: R(1, 360), eta: &[], z: Some(2), bracket: "[[[[3,2],1],1],3]" },
    T { c: R(1, 360), eta: &[], z: Some(2), bracket: "[[[[1,3],3],1],2]" },
    T { c: R(1, 180), eta: &[], z: Some(2), bracket: "[[[[3,1],1],2],3]" },
    T { c: R(1, 180), eta: &[], z: Some(1), bracket: "[[[[3,2],2],1],3]" },
    T { c: R(1, 180), eta: &[], z: Some(3), bracket: "[[[[2,3],1],1],2]" },
    T { c: R(1, 180), eta: &[], z: Some(3), bracket: "[[[[1,3],2],2],1]" },
    T { c: R(1, 120), eta: &[], z: Some(1), bracket: "[[[[1,3],3],2],2]" },
    T { c: R(1, 120), eta: &[], z: Some(1), bracket: "[[[[1,2],2],3],3]" },
    T { c: R(1, 120), eta: &[], z: Some(1), bracket: "[[[[2,1],3],3],2]" },
    T { c: R(1, 120), eta: &[], z: Some(2), bracket: "[[[[2,3],3],1],1]" },
    T { c: R(1, 120), eta: &[], z: Some(3), bracket: "[[[[3,1],1],2],2]" },
    T { c: R(1, 120), eta: &[], z: Some(2), bracket: "[[[[1,2],3],3],1]" },
    T { c: R(1, 120), eta: &[], z: Some(2), bracket: "[[[[2,1],1],3],3]" },
    T { c: R(1, 120), eta: &[], z: Some(3), bracket: "[[[[3,2],2],1],1]" },
    // degree 5, two letters
    T { c: R(1, 360), eta: &[], z: Some(1), bracket: "[[[[1,2],2],2],2]" },
    T { c: R(1, 360), eta: &[], z: Some(1), bracket: "[[[[1,3],3],3],3]" },
    T { c: R(1, 360), eta: &[], z: Some(2), bracket: "[[[[2,1],1],1],1]" },
    T { c: R(1, 360), eta: &[], z: Some(2), bracket: "[[[[2,3],3],3],3]" },
    T { c: R(1, 360), eta: &[], z: Some(3), bracket: "[[[[3,1],1],1],1]" },
    T { c: R(1, 360), eta: &[], z: Some(3), bracket: "[[[[3,2],2],2],2]" },
    T { c: R(1, 120), eta: &[], z: Some(2), bracket: "[[[[1,2],2],2],1]" },
    T { c: R(1, 120), eta: &[], z: Some(3), bracket: "[[[[1,3],3],3],1]" },
    T { c: R(1, 120), eta: &[], z: Some(1), bracket: "[[[[2,1],1],1],2]" },
    T { c: R(1, 120), eta: &[], z: Some(3), bracket: "[[[[2,3],3],3],2]" },
    T { c: R(1, 120), eta: &[], z: Some(1), bracket: "[[[[3,1],1],1],3]" },
    T { c: R(1, 120), eta: &[], z: Some(2), bracket: "[[[[3,2],2],2],3]" },
    T { c: R(1, 90), eta: &[], z: Some(1), bracket: "[[[[1,2],1],2],1]" },
    T { c: R(1, 90), eta: &[], z: Some(1), bracket: "[[[[1,3],1],3],1]" },
    T { c: R(1, 90), eta: &[], z: Some(2), bracket: "[[[[2,1],2],1],2]" },
    T { c: R(1, 90), eta: &[], z: Some(2), bracket: "[[[[2,3],2],3],2]" },
    T { c: R(1, 90), eta: &[], z: Some(3), bracket: "[[[[3,1],3],1],3]" },
    T { c: R(1, 90), eta: &[], z: Some(3), bracket: "[[[[3,2],3],2],3]" },
    // degree 6, time
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[0,1],1],1],1]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[0,2],2],2],2]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[0,3],3],3],3]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,1],1],2],2]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,1],1],3],3]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,2],2],1],1]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,2],2],3],3]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,3],3],1],1]" },
    T { c: R(1, 120), eta: &[], z: None, bracket: "[[[[0,3],3],2],2]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[2,0],1],1],2]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[3,0],1],1],3]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[1,0],2],2],1]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[3,0],2],2],3]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[1,0],3],3],1]" },
    T { c: R(1, 180), eta: &[], z: None, bracket: "[[[[2,0],3],3],2]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[1,2],2],0],1]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[1,3],3],0],1]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[2,1],1],0],2]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[2,3],3],0],2]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[3,1],1],0],3]" },
    T { c: R(1, 360), eta: &[], z: None, bracket: "[[[[3,2],2],0],3]" },
];

/// The entry for Gaussian point `z` and signs `eta = [η0, η1, η2, η3]`.
pub fn degree7_polynomial(z: &[f64; 3], eta: &[f64; 4]) -> Result<LiePolynomial<f64>> {
    let mut p = LiePolynomial::new(3);
    for t in TERMS {
        let mut c = t.c.value();
        for &e in t.eta {
            c *= eta[e as usize];
        }
        if let Some(i) = t.z {
            c *= z[i as usize - 1];
        }
        p.push(c, t.bracket.parse::<BracketTerm>()?)?;
    }
    Ok(p)
}

/// Degree-7 formula from the default 64-point product Gaussian rule.
pub fn construct_degree7() -> Result<WienerCubatureFormula<f64>> {
    construct_degree7_with(&gaussian_cubature(3, 7)?)
}

/// Degree-7 formula over a supplied degree-7 Gaussian rule on `R^3` and the
/// full sixteen-point Bernoulli rule on four signs.
pub fn construct_degree7_with(g: &PointCubature<f64>) -> Result<WienerCubatureFormula<f64>> {
    if g.dim != 3 {
        return Err(Error::Unsupported(format!("degree 7 in dimension {}", g.dim)));
    }
    check_moments(g, 7, Measure::Gaussian, 1e-10)?;
    let signs = bernoulli_full::<f64>(4)?;
    let mut entries = Vec::with_capacity(g.len() * signs.len());
    for (z, lam) in g.points.iter().zip(&g.weights) {
        let z = [z[0], z[1], z[2]];
        for (s, mu) in signs.points.iter().zip(&signs.weights) {
            // sign points are (η1, η2, η3, η0)
            let eta = [s[3], s[0], s[1], s[2]];
            entries.push(CubatureEntry { weight: lam * mu, poly: degree7_polynomial(&z, &eta)? });
        }
    }
    let mut metadata = Map::new();
    metadata.insert("gaussian_rule".into(), Value::from(g.name.clone()));
    metadata.insert("gaussian_points".into(), Value::from(g.len()));
    metadata.insert("bernoulli_rule".into(), Value::from(signs.name.clone()));
    metadata.insert("bernoulli_points".into(), Value::from(signs.len()));
    metadata.insert(
        "size_formula".into(),
        Value::from(format!("S_3(7)=N_3(7)B_4(5)={}x{}={}", g.len(), signs.len(), entries.len())),
    );
    Ok(WienerCubatureFormula { dim: 3, degree: 7, entries, metadata })
}
