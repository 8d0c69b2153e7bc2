use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use wiener_cubature::algebra::{exp_series, TensorElement, TensorSpace, Word};
use wiener_cubature::lie::{leaf, LiePolynomial};
use wiener_cubature::measures::GaussianRule;
use wiener_cubature::sde::*;
use wiener_cubature::wiener::{construct, expected_signature, WienerCubatureFormula};
use wiener_cubature::Error;

fn formula(degree: usize, d: usize) -> WienerCubatureFormula<f64> {
    construct(degree, d, GaussianRule::Auto, 0.5).unwrap()
}

fn v1(x: f64) -> DVector<f64> {
    DVector::from_element(1, x)
}

/// Truncated exponential Σ_{k<=m} (A t)^k / k! applied to x, computed by hand.
fn truncated_expm(a: &DMatrix<f64>, t: f64, m: usize, x: &DVector<f64>) -> DVector<f64> {
    let mut term = x.clone();
    let mut out = x.clone();
    for k in 1..=m {
        term = a * &term * (t / k as f64);
        out += &term;
    }
    out
}

#[test]
fn tower_examples() {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, 3.0]);
    let drift = VectorFieldSpec::affine(vec![a.clone()], vec![DVector::zeros(2)]).unwrap();
    let x = DVector::from_vec(vec![0.5, -1.0]);
    let tower = drift.directional_derivative_tower(&x, 4).unwrap();
    assert_eq!(tower[&Word::empty()], x);
    let mut ak = x.clone();
    for k in 1..=4 {
        ak = &a * ak;
        assert_eq!(tower[&Word::new(vec![0; k])], ak);
    }

    let c = VectorFieldSpec::affine(
        vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)],
        vec![DVector::from_vec(vec![1.0, 2.0]), DVector::from_vec(vec![0.0, 3.0])],
    )
    .unwrap();
    let tower = c.directional_derivative_tower(&x, 3).unwrap();
    assert_eq!(tower[&Word::empty()], x);
    for (w, v) in &tower {
        if w.len() >= 2 {
            assert!(v.iter().all(|z| *z == 0.0), "{w}");
        }
    }
}

#[test]
fn generic_tower_matches_exact() {
    // V_0(x) = 0.3 x, V_1(x) = 0.2 x, as a closure
    let f: Arc<FieldFn> = Arc::new(|j, x, out| {
        let c = if j == 0 { 0.3 } else { 0.2 };
        out[0] = c * x[0];
    });
    let g = VectorFieldSpec::generic(1, 1, 3, f);
    let e = VectorFieldSpec::scalar_linear(0.3, &[0.2]);
    let x = v1(1.3);
    let tg = g.directional_derivative_tower(&x, 3).unwrap();
    let te = e.directional_derivative_tower(&x, 3).unwrap();
    for (w, v) in &te {
        // finite differences lose accuracy with each order
        let tol = [1e-12, 1e-6, 1e-4, 1e-2][w.len()];
        assert!((tg[w][0] - v[0]).abs() <= tol * v[0].abs(), "{w}: {} vs {}", tg[w][0], v[0]);
    }
    assert!(matches!(g.directional_derivative_tower(&x, 4), Err(Error::DerivativeOrder { .. })));
}

#[test]
fn taylor_examples() {
    let v = VectorFieldSpec::scalar_linear(0.7, &[0.4]);
    let x = v1(2.0);
    let s = TensorSpace::graded(1, 10).unwrap();
    assert_eq!(taylor_step(&x, &TensorElement::unit(&s), &v).unwrap(), x);

    // drift only: exp(T ε0) gives the truncated exponential series
    let drift = VectorFieldSpec::scalar_linear(0.7, &[0.0]);
    let t = 0.9;
    let l = exp_series(&TensorElement::from_word(&s, &Word::letter(0), t).unwrap()).unwrap();
    let got = taylor_step(&x, &l, &drift).unwrap()[0];
    let a = DMatrix::from_element(1, 1, 0.7);
    assert!((got - truncated_expm(&a, t, 5, &x)[0]).abs() < 1e-14);

    // GBM against the expected signature at graded degree 3
    let (a, b, t) = (0.05, 0.2, 0.3);
    let gbm = VectorFieldSpec::scalar_linear(a, &[b]);
    let es = expected_signature::<f64>(1, 3, &t).unwrap();
    let got = taylor_step(&v1(1.0), &es, &gbm).unwrap()[0];
    assert!((got - (1.0 + (a + b * b / 2.0) * t)).abs() < 1e-15);
}

#[test]
fn affine_taylor_is_truncated_matrix_exponential() {
    let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 3.0, -2.0, 1.0]);
    let v = VectorFieldSpec::affine(vec![a.clone(), DMatrix::zeros(3, 3)], vec![DVector::zeros(3); 2]).unwrap();
    let x = DVector::from_vec(vec![1.0, -2.0, 3.0]);
    for m in 1..=4 {
        let s = TensorSpace::graded(1, 2 * m).unwrap();
        let l = exp_series(&TensorElement::letter(&s, 0).unwrap()).unwrap();
        let got = taylor_step(&x, &l, &v).unwrap();
        assert!((got - truncated_expm(&a, 1.0, m, &x)).amax() < 1e-13, "m = {m}");
    }
}

#[test]
fn logode_examples() {
    let drift = VectorFieldSpec::scalar_linear(1.0, &[0.0]);
    let ell = LiePolynomial::<f64>::from_terms(1, [(1.0, leaf(0))]).unwrap();
    let z = logode_step(&v1(1.5), &ell, &drift, 3, 256).unwrap()[0];
    assert!((z - 1.5 * 1f64.exp()).abs() < 1e-10, "{}", z - 1.5 * 1f64.exp());
    let zero = LiePolynomial::<f64>::new(1);
    assert_eq!(logode_step(&v1(1.5), &zero, &drift, 3, 8).unwrap(), v1(1.5));
}

#[test]
fn logode_and_taylor_agree_to_high_order() {
    let (a, b) = (0.05, 0.2);
    let f = formula(3, 1);
    let mut diffs = Vec::new();
    for k in 1..=6 {
        let t = 0.5f64.powi(k);
        let p = SDEProblem::gbm(a, &[b], 1.0, t);
        let ta = cubature_tree(&p, &f, 1, &TreeConfig::with_method(Method::Taylor)).unwrap();
        let lo = cubature_tree(&p, &f, 1, &TreeConfig::with_method(Method::LogOde)).unwrap();
        diffs.push((t, (ta.estimate - lo.estimate).abs()));
    }
    assert!(diffs.iter().all(|(t, d)| *d < t * t), "{diffs:?}");
    let slope = fit_slope(&diffs, DEFAULT_ERROR_FLOOR).unwrap();
    assert!(slope >= 1.5, "{slope}");
}

#[test]
fn tree_examples() {
    let f = formula(3, 3);
    let p = SDEProblem::gbm(0.1, &[0.3, 0.4, 0.5], 1.0, 0.5);
    let r = cubature_tree(&p, &f, 1, &TreeConfig::default()).unwrap();
    assert_eq!(r.leaf_count, 6);
    let r = cubature_tree(&p, &f, 3, &TreeConfig::default()).unwrap();
    assert_eq!(r.leaf_count, 216);

    let zero = VectorFieldSpec::affine(vec![DMatrix::zeros(2, 2); 4], vec![DVector::zeros(2); 4]).unwrap();
    let x0 = DVector::from_vec(vec![0.3, -0.7]);
    let payoff = Payoff::parse("expr:exp(x0) * x1 + sin(x0)", 2).unwrap();
    let expected = payoff.eval(&x0).unwrap();
    let p = SDEProblem::new(zero, x0, payoff, 1.0).unwrap();
    for method in [Method::Taylor, Method::LogOde] {
        let r = cubature_tree(&p, &f, 2, &TreeConfig::with_method(method)).unwrap();
        assert_eq!(r.estimate, expected);
    }
}

#[test]
fn leaf_weights_sum_to_one() {
    let f = formula(5, 1);
    let p = SDEProblem::gbm(0.05, &[0.2], 1.0, 1.0);
    for k in 1..=6 {
        let r = cubature_tree(&p, &f, k, &TreeConfig::default()).unwrap();
        assert!((r.weight_sum - 1.0).abs() < 1e-12, "k = {k}");
        assert_eq!(r.leaf_count, 6u128.pow(k as u32));
    }
}

#[test]
fn leaf_budget_is_enforced() {
    let p = SDEProblem::gbm(0.05, &[0.2], 1.0, 1.0);
    let cfg = TreeConfig { leaf_budget: 1000, ..TreeConfig::default() };
    let err = cubature_tree(&p, &formula(5, 1), 4, &cfg).unwrap_err();
    assert!(matches!(err, Error::LeafBudget { leaves: 1296, budget: 1000 }));
}

#[test]
fn monte_carlo_examples() {
    let (a, b, t) = (0.05, 0.2, 0.5);
    let p = SDEProblem::gbm(a, &[b], 1.0, t);
    let cfg = MonteCarloConfig { paths: 100_000, steps: 16, seed: 11, threads: None };
    let r = monte_carlo(&p, &cfg).unwrap();
    let exact = gbm_mean(1.0, a, &[b], t);
    let se = r.std_error.unwrap();
    assert!((r.estimate - exact).abs() <= 4.0 * se, "{} vs {exact} ± {se}", r.estimate);
    let again = monte_carlo(&p, &cfg).unwrap();
    assert_eq!(r.estimate.to_bits(), again.estimate.to_bits());
    let other = monte_carlo(&p, &MonteCarloConfig { seed: 12, ..cfg.clone() }).unwrap();
    assert_ne!(r.estimate, other.estimate);

    // zero diffusion: Heun on x' = a x
    let ode = SDEProblem::gbm(0.8, &[0.0], 1.0, 1.0);
    let r = monte_carlo(&ode, &MonteCarloConfig { paths: 10, steps: 400, seed: 1, threads: None }).unwrap();
    assert!((r.estimate - 0.8f64.exp()).abs() < 1e-5);
    assert!(r.std_error.unwrap() < 1e-12);
}

#[test]
fn single_step_order_on_gbm() {
    let times: Vec<f64> = (1..=6).map(|k| 0.5f64.powi(k)).collect();
    let p = SDEProblem::gbm(0.05, &[0.2], 1.0, 1.0);
    let res = convergence_experiment(&p, &[formula(3, 1), formula(5, 1)], &times, &[1], &TreeConfig::default(), DEFAULT_ERROR_FLOOR)
        .unwrap();
    assert_eq!(res.rows.len(), 12);
    let s3 = res.slope(3).unwrap();
    let s5 = res.slope(5).unwrap();
    assert!((s3 - 2.0).abs() < 0.2, "{s3}");
    assert!((s5 - 3.0).abs() < 0.2, "{s5}");
    // degree 5 beats degree 3 at every horizon
    for (r3, r5) in res.rows[..6].iter().zip(&res.rows[6..]) {
        assert!(r5.abs_error < r3.abs_error);
    }
}

#[test]
fn exact_problem_hits_the_floor() {
    // constant coefficients: X_T = X0 + c T + b B_T is reproduced exactly
    let v = VectorFieldSpec::affine(vec![DMatrix::zeros(1, 1); 2], vec![v1(0.3), v1(0.7)]).unwrap();
    let p = SDEProblem::new(v, v1(1.0), Payoff::Identity, 1.0).unwrap();
    let times = [0.5, 0.25, 0.125, 0.0625];
    let res = convergence_experiment(&p, &[formula(3, 1)], &times, &[1], &TreeConfig::default(), DEFAULT_ERROR_FLOOR)
        .unwrap();
    assert!(res.rows.iter().all(|r| r.abs_error <= DEFAULT_ERROR_FLOOR));
    assert!(res.slopes[0].1.is_err());
    assert!(matches!(fit_slope(&[(1.0, 1.0), (0.5, 0.0)], 1e-12), Err(Error::DegenerateFit { usable: 1 })));
}

#[test]
fn missing_reference_is_an_error() {
    let poly = VectorFieldSpec::polynomial(vec![
        vec![Polynomial::var(1, 0)],
        vec![Polynomial::var(1, 0).mul(&Polynomial::var(1, 0))],
    ])
    .unwrap();
    let p = SDEProblem::new(poly, v1(0.5), Payoff::Identity, 0.5).unwrap();
    let err = convergence_experiment(&p, &[formula(3, 1)], &[0.5, 0.25], &[1], &TreeConfig::default(), 1e-12);
    assert!(matches!(err, Err(Error::MissingReference(_))));
}

#[test]
fn signature_level_one_is_the_increment() {
    let v = VectorFieldSpec::scalar_linear(0.1, &[0.3]);
    let (aug, layout) = signature_level_system(&v, 1).unwrap();
    assert_eq!(layout.state_dim(), 2);
    let x0 = DVector::from_vec(vec![1.0, 0.0]);
    let i1 = layout.index_of(&Word::letter(1)).unwrap();
    let payoff = Payoff::parse(&format!("expr:x{i1} - x0 + 1"), 2).unwrap();
    let p = SDEProblem::new(aug, x0, payoff, 0.25).unwrap();
    let r = cubature_tree(&p, &formula(5, 1), 2, &TreeConfig::default()).unwrap();
    assert!(r.estimate.abs() < 1e-12, "{}", r.estimate);
}

#[test]
fn brownian_signature_level_two() {
    // X = B in two dimensions: V_j = e_j
    let d = 2;
    let mut fields = vec![vec![Polynomial::zero(d); d]];
    for j in 0..d {
        let mut f = vec![Polynomial::zero(d); d];
        f[j] = Polynomial::constant(d, 1.0);
        fields.push(f);
    }
    let v = VectorFieldSpec::polynomial(fields).unwrap();
    let (aug, layout) = signature_level_system(&v, 2).unwrap();
    let t = 0.5;
    for i in 1..=d as u8 {
        for j in 1..=d as u8 {
            let idx = layout.index_of(&Word::new(vec![i, j])).unwrap();
            let p = SDEProblem::new(aug.clone(), DVector::zeros(layout.state_dim()), Payoff::Coordinate(idx), t).unwrap();
            let r = cubature_tree(&p, &formula(5, d), 1, &TreeConfig::default()).unwrap();
            let want = if i == j { t / 2.0 } else { 0.0 };
            assert!((r.estimate - want).abs() < 1e-3, "({i},{j}): {}", r.estimate);
        }
    }
    assert!(signature_level_system(&v, 0).is_err());
}

#[test]
fn problem_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(
        &path,
        r#"{"state_dim":1,"driving_dim":2,"kind":"gbm","params":{"a":0.1,"b":[0.3,0.4]},"x0":[2.0],"T":0.5}"#,
    )
    .unwrap();
    let p = SDEProblem::load(&path).unwrap();
    assert_eq!(p.payoff, Payoff::Identity);
    assert!((p.reference_at(0.5).unwrap() - gbm_mean(2.0, 0.1, &[0.3, 0.4], 0.5)).abs() < 1e-14);
    assert!(SDEProblem::load(&dir.path().join("missing.json")).is_err());
}

#[test]
fn affine_mean_matches_gbm() {
    let v = VectorFieldSpec::scalar_linear(0.2, &[0.5, 0.1]);
    let FieldKind::Affine { a, b } = v.kind() else { panic!("expected affine") };
    let m = affine_mean(a, b, &v1(1.5), 0.7);
    assert!((m[0] - gbm_mean(1.5, 0.2, &[0.5, 0.1], 0.7)).abs() < 1e-14);
}
