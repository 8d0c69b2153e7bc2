//! Cubature formulas on Wiener space and their verification against the
//! expected signature of Brownian motion.

mod construct;
mod degree7;
mod formula;
mod oracle;
mod verify;

pub use construct::{construct_degree3, construct_degree5};
pub use degree7::{construct_degree7, construct_degree7_with, degree7_polynomial, Coef, Term, TERMS as DEGREE7_TERMS};
pub use formula::{scale_formula, CubatureEntry, WienerCubatureFormula};
pub use oracle::{expected_signature, expected_signature_coefficient, expected_signature_in};
pub use verify::{cubature_expectation, verify_formula, VerifyReport, WordResidual};

use crate::error::{Error, Result};
use crate::measures::{gaussian_cubature_with, GaussianRule};

/// Builds the shipped formula of the given degree over the chosen Gaussian rule.
pub fn construct(degree: usize, dim: usize, rule: GaussianRule, x: f64) -> Result<WienerCubatureFormula<f64>> {
    match degree {
        3 => construct_degree3(&gaussian_cubature_with(dim, 3, rule)?),
        5 => construct_degree5(&gaussian_cubature_with(dim, 5, rule)?, &x),
        7 if dim == 3 => construct_degree7_with(&gaussian_cubature_with(3, 7, rule)?),
        _ => Err(Error::Unsupported(format!("degree {degree} formula in dimension {dim}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, BigRational};
    use crate::algebra::Word;
    use crate::measures::PointCubature;

    fn signs(d: usize) -> PointCubature<BigRational> {
        // {±1}^d is a degree-3 Gaussian rule
        crate::measures::bernoulli_full(d).unwrap()
    }

    #[test]
    fn degree3_exact() {
        let mut g = signs(2);
        g.degree = 3;
        let f = construct_degree3(&g).unwrap();
        assert_eq!(f.len(), 4);
        let r = verify_formula(&f, &ratio(1, 1), None).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn degree3_float() {
        let f = construct(3, 2, GaussianRule::Auto, 0.5).unwrap();
        let r = verify_formula(&f, &1.0, None).unwrap();
        assert!(r.max_residual < 1e-12, "{}", r.max_residual);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn degree5_float() {
        let f = construct(5, 2, GaussianRule::Auto, 0.5).unwrap();
        let r = verify_formula(&f, &1.0, None).unwrap();
        assert!(r.max_residual < 1e-10, "{:?}", r.worst(3));
    }

    #[test]
    fn degree5_off_centre_leaves_a_residual() {
        // Away from x = 1/2 the two degree-3 brackets leave |x - 1/2| / 6 on
        // the words (i,j,j,i) and (j,i,i,j).
        for x in [0.0, 0.25, 1.0] {
            let f = construct(5, 2, GaussianRule::Auto, x).unwrap();
            let r = verify_formula(&f, &1.0, None).unwrap();
            assert!((r.max_residual - (x - 0.5f64).abs() / 6.0).abs() < 1e-12);
            let mut top: Vec<_> = r.worst(2).iter().map(|w| w.word.clone()).collect();
            top.sort();
            assert_eq!(top, [Word::from([1, 2, 2, 1]), Word::from([2, 1, 1, 2])]);
        }
    }

    #[test]
    fn perturbed_weight_is_caught() {
        let mut f = construct(3, 2, GaussianRule::Auto, 0.5).unwrap();
        f.entries[0].weight += 1e-3;
        let r = verify_formula(&f, &1.0, None).unwrap();
        assert!(r.max_residual >= 1e-4);
        // a uniform rescale of the weights shows up first on the unit word
        let mut g = construct(3, 2, GaussianRule::Auto, 0.5).unwrap();
        g.entries.iter_mut().for_each(|e| e.weight *= 1.001);
        let r = verify_formula(&g, &1.0, None).unwrap();
        assert_eq!(r.residuals[0].word, Word::empty());
    }

    #[test]
    fn json_round_trip() {
        let f = construct(5, 2, GaussianRule::Auto, 0.5).unwrap();
        let g = WienerCubatureFormula::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, g);
        let mut bad = f.clone();
        bad.entries[0].weight = -bad.entries[0].weight;
        assert!(WienerCubatureFormula::from_json(&bad.to_json().unwrap()).is_err());
    }
}
