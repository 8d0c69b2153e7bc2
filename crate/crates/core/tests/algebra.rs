mod common;

use std::cmp::Ordering;

use common::{all_words, brute_is_lyndon, q, Naive, Q};
use proptest::prelude::*;
use wiener_cubature::algebra::*;
use wiener_cubature::coeff::BigRational;

fn w(l: &[u8]) -> Word {
    Word::new(l.to_vec())
}

fn to_naive(a: &TensorElement<BigRational>) -> Naive {
    let mut n = Naive::zero(a.truncation());
    for (word, c) in a.terms() {
        n.add(word.letters(), c.clone());
    }
    n
}

#[test]
fn graded_degree_examples() {
    assert_eq!(graded_degree(&w(&[1, 2])), 2);
    assert_eq!(graded_degree(&w(&[0])), 2);
    assert_eq!(graded_degree(&w(&[0, 1, 1])), 4);
    assert_eq!(graded_degree(&Word::empty()), 0);
}

#[test]
fn lex_compare_examples() {
    assert_eq!(lex_compare(&w(&[0, 1]), &w(&[1])), Ordering::Less);
    assert_eq!(lex_compare(&w(&[0]), &w(&[0, 1])), Ordering::Less);
    assert_eq!(lex_compare(&w(&[1, 2]), &w(&[1, 2])), Ordering::Equal);
    assert_eq!(lex_compare(&w(&[2]), &w(&[1, 9])), Ordering::Greater);
}

#[test]
fn lyndon_examples() {
    assert_eq!(lyndon_words(2, 2), vec![w(&[0]), w(&[0, 1]), w(&[1])]);
    assert_eq!(lyndon_words(2, 3), vec![w(&[0]), w(&[0, 0, 1]), w(&[0, 1]), w(&[0, 1, 1]), w(&[1])]);
    for l in 0..5 {
        assert!(is_lyndon(&w(&[l])));
    }
}

#[test]
fn lyndon_matches_brute_force() {
    for q in 1..=4u8 {
        for n in 1..=6 {
            let mut brute: Vec<Vec<u8>> = all_words(q, n).into_iter().filter(|v| brute_is_lyndon(v)).collect();
            brute.sort();
            let got: Vec<Vec<u8>> = lyndon_words(q as usize, n).iter().map(|v| v.letters().to_vec()).collect();
            assert_eq!(got, brute, "alphabet {q}, length {n}");
        }
    }
}

#[test]
fn products_of_letters() {
    let s = TensorSpace::graded(2, 4).unwrap();
    let e1 = TensorElement::<f64>::letter(&s, 1).unwrap();
    let e2 = TensorElement::<f64>::letter(&s, 2).unwrap();
    let p = tensor_product(&e1, &e2).unwrap();
    assert_eq!(p.coefficient(&w(&[1, 2])), 1.0);
    assert_eq!(p.nnz(), 1);
    assert_eq!(tensor_product(&TensorElement::unit(&s), &p).unwrap(), p);
    let ex = tensor_product(&exp_series(&e1).unwrap(), &exp_series(&e2).unwrap()).unwrap();
    assert_eq!(ex.coefficient(&w(&[1, 2])), 1.0);
    assert_eq!(ex.coefficient(&w(&[2, 1])), 0.0);
}

#[test]
fn graded_projection() {
    let s = TensorSpace::graded(1, 8).unwrap();
    let e0 = exp_series(&TensorElement::<f64>::letter(&s, 0).unwrap()).unwrap();
    let p = graded_project(&e0, 3);
    let words: Vec<Word> = p.terms().map(|(w, _)| w.clone()).collect();
    assert_eq!(words, vec![Word::empty(), w(&[0])]);
    let mut a = TensorElement::<f64>::letter(&s, 1).unwrap();
    a += &TensorElement::constant(&s, 3.0);
    let c = graded_project(&a, 0);
    assert_eq!(c.nnz(), 1);
    assert_eq!(*c.constant_term(), 3.0);
}

#[test]
fn exp_log_examples() {
    let s = TensorSpace::graded(2, 6).unwrap();
    let z = TensorElement::<BigRational>::zero(&s);
    assert_eq!(exp_series(&z).unwrap(), TensorElement::unit(&s));
    let e1 = TensorElement::<BigRational>::letter(&s, 1).unwrap();
    assert_eq!(log_series(&exp_series(&e1).unwrap()).unwrap(), e1);
    // exp(ε0 + ½ ε1⊗ε1) on (1,1,1,1)
    let mut gen = TensorElement::<BigRational>::letter(&s, 0).unwrap();
    gen.add_word(&w(&[1, 1]), q(1, 2)).unwrap();
    assert_eq!(exp_series(&gen).unwrap().coefficient(&w(&[1, 1, 1, 1])), q(1, 8));
}

#[test]
fn log_rejects_wrong_constant() {
    let s = TensorSpace::graded(1, 3).unwrap();
    let a = TensorElement::<f64>::letter(&s, 1).unwrap();
    assert!(log_series(&a).is_err());
}

fn rational_element(s: &std::sync::Arc<TensorSpace>, seeds: &[(usize, i64)], no_constant: bool) -> TensorElement<Q> {
    let mut a = TensorElement::zero(s);
    for &(i, c) in seeds {
        let idx = i % s.len();
        if no_constant && idx == 0 {
            continue;
        }
        a.add_word(&s.word(idx).clone(), q(c, 7)).unwrap();
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_matches_naive_and_is_associative(
        xs in prop::collection::vec((0usize..200, -9i64..9), 1..6),
        ys in prop::collection::vec((0usize..200, -9i64..9), 1..6),
        zs in prop::collection::vec((0usize..200, -9i64..9), 1..6),
    ) {
        let s = TensorSpace::graded(2, 5).unwrap();
        let (a, b, c) = (rational_element(&s, &xs, false), rational_element(&s, &ys, false), rational_element(&s, &zs, false));
        let ab = tensor_product(&a, &b).unwrap();
        prop_assert_eq!(to_naive(&ab), to_naive(&a).mul(&to_naive(&b)));
        let left = tensor_product(&ab, &c).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        // bilinearity
        let two = q(2, 1);
        let lhs = tensor_product(&a.scale(&two), &b.try_add(&c).unwrap()).unwrap();
        let rhs = tensor_product(&a, &b).unwrap().try_add(&tensor_product(&a, &c).unwrap()).unwrap().scale(&two);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_log_inverse(xs in prop::collection::vec((1usize..400, -9i64..9), 1..8)) {
        let s = TensorSpace::graded(2, 7).unwrap();
        let a = rational_element(&s, &xs, true).to_f64();
        let back = log_series(&exp_series(&a).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&a) <= 1e-12);
        let g = exp_series(&a).unwrap();
        let again = exp_series(&log_series(&g).unwrap()).unwrap();
        prop_assert!(again.max_abs_diff(&g) <= 1e-12);
    }

    #[test]
    fn exp_matches_naive(xs in prop::collection::vec((1usize..60, -9i64..9), 1..5)) {
        let s = TensorSpace::graded(2, 5).unwrap();
        let a = rational_element(&s, &xs, true);
        prop_assert_eq!(to_naive(&exp_series(&a).unwrap()), to_naive(&a).exp());
    }

    #[test]
    fn projection_is_idempotent_and_linear(
        xs in prop::collection::vec((0usize..400, -9i64..9), 1..8),
        ys in prop::collection::vec((0usize..400, -9i64..9), 1..8),
        m in 0usize..7,
    ) {
        let s = TensorSpace::graded(2, 6).unwrap();
        let (a, b) = (rational_element(&s, &xs, false), rational_element(&s, &ys, false));
        let pa = graded_project(&a, m);
        prop_assert_eq!(graded_project(&pa, m), pa.clone());
        prop_assert_eq!(graded_project(&a.try_add(&b).unwrap(), m), pa.try_add(&graded_project(&b, m)).unwrap());
        prop_assert_eq!(graded_project(&a.scale(&q(3, 2)), m), pa.scale(&q(3, 2)));
        prop_assert!(pa.terms().all(|(w, _)| w.graded_degree() <= m));
    }
}
