mod common;

use common::{normal_moment, q, Q};
use num_traits::{One, Zero};
use wiener_cubature::measures::*;

/// Test-side moment check: largest error over all monomials with total
/// degree <= `degree`.
fn moment_error(c: &PointCubature<f64>, degree: u32) -> f64 {
    fn rec(c: &PointCubature<f64>, e: &mut Vec<u32>, left: u32, worst: &mut f64) {
        if e.len() == c.dim {
            let rule: f64 = c
                .points
                .iter()
                .zip(&c.weights)
                .map(|(p, w)| w * p.iter().zip(e.iter()).map(|(x, k)| x.powi(*k as i32)).product::<f64>())
                .sum();
            let exact: f64 = e.iter().map(|&k| normal_moment(k)).product();
            *worst = worst.max((rule - exact).abs());
            return;
        }
        for k in 0..=left {
            e.push(k);
            rec(c, e, left - k, worst);
            e.pop();
        }
    }
    let mut worst = 0.0;
    rec(c, &mut Vec::new(), degree, &mut worst);
    worst
}

#[test]
fn bernoulli_examples() {
    let b1 = bernoulli_full::<Q>(1).unwrap();
    let mut pts: Vec<(Q, Q)> = b1.points.iter().map(|p| p[0].clone()).zip(b1.weights.iter().cloned()).collect();
    pts.sort();
    assert_eq!(pts, vec![(q(-1, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
    let b2 = bernoulli_full::<Q>(2).unwrap();
    let m: Q = b2.points.iter().zip(&b2.weights).map(|(p, w)| w * &p[0] * &p[1]).sum();
    assert!(m.is_zero());
    assert_eq!(bernoulli_full::<f64>(4).unwrap().len(), 16);
    assert_eq!(verify_moments(&bernoulli_full::<Q>(3).unwrap(), 9, Measure::Bernoulli), 0.0);
}

#[test]
fn bernoulli_even_monomials_are_one() {
    let b = bernoulli_full::<Q>(3).unwrap();
    for e0 in 0..4u32 {
        for e1 in 0..4u32 {
            for e2 in 0..4u32 {
                let v: Q = b
                    .points
                    .iter()
                    .zip(&b.weights)
                    .map(|(p, w)| {
                        let mut t = w.clone();
                        for (x, k) in p.iter().zip([e0, e1, e2]) {
                            for _ in 0..k {
                                t *= x;
                            }
                        }
                        t
                    })
                    .sum();
                let even = e0 % 2 == 0 && e1 % 2 == 0 && e2 % 2 == 0;
                assert_eq!(v, if even { Q::one() } else { Q::zero() });
            }
        }
    }
}

#[test]
fn gaussian_examples() {
    let g = gaussian_cubature(2, 3).unwrap();
    assert_eq!(g.len(), 4);
    let r2 = 2f64.sqrt();
    for (p, w) in g.points.iter().zip(&g.weights) {
        assert!((w - 0.25).abs() < 1e-15);
        let n: Vec<f64> = p.iter().map(|x| x.abs()).collect();
        assert!(n == [r2, 0.0] || n == [0.0, r2], "{p:?}");
    }
    let g = gaussian_cubature(1, 5).unwrap();
    let mut pts: Vec<(f64, f64)> = g.points.iter().map(|p| p[0]).zip(g.weights.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let r3 = 3f64.sqrt();
    let want = [(-r3, 1.0 / 6.0), (0.0, 2.0 / 3.0), (r3, 1.0 / 6.0)];
    for ((x, w), (xe, we)) in pts.iter().zip(want) {
        assert!((x - xe).abs() < 1e-14 && (w - we).abs() < 1e-14);
    }
    assert_eq!(gaussian_cubature(3, 7).unwrap().len(), 64);
}

#[test]
fn gauss_hermite_four_points() {
    let (x, w) = gauss_hermite(4);
    let s6 = 6f64.sqrt();
    let want_x = [-(3.0 + s6).sqrt(), -(3.0 - s6).sqrt(), (3.0 - s6).sqrt(), (3.0 + s6).sqrt()];
    let want_w = [(3.0 - s6) / 12.0, (3.0 + s6) / 12.0, (3.0 + s6) / 12.0, (3.0 - s6) / 12.0];
    for i in 0..4 {
        assert!((x[i] - want_x[i]).abs() < 1e-14, "{x:?}");
        assert!((w[i] - want_w[i]).abs() < 1e-14, "{w:?}");
    }
}

#[test]
fn degree_three_rule_misses_fourth_moment() {
    for d in 1..=5 {
        let g = gaussian_cubature(d, 3).unwrap();
        // Σλ z1^4 = d on the axis rule against E[Z^4] = 3, and mixed
        // fourth moments vanish on the rule against E[Z1² Z2²] = 1
        let err = verify_moments(&g, 4, Measure::Gaussian);
        let mixed = if d > 1 { 1.0 } else { 0.0 };
        let expected = (d as f64 - 3.0).abs().max(mixed);
        assert!((err - expected).abs() < 1e-12, "d={d}: {err}");
        let first: f64 = g.points.iter().zip(&g.weights).map(|(p, w)| w * p[0]).sum();
        assert!((verify_moments(&g, 1, Measure::Gaussian) - first.abs()).abs() < 1e-15);
    }
}

#[test]
fn shipped_rules_pass_their_degree() {
    let cases = [(3, 1..=6, GaussianRule::Auto), (5, 1..=4, GaussianRule::Auto), (5, 1..=3, GaussianRule::Product), (7, 1..=4, GaussianRule::Auto)];
    for (degree, dims, rule) in cases {
        for d in dims {
            let g = gaussian_cubature_with(d, degree, rule).unwrap();
            assert!((g.weight_sum() - 1.0).abs() < 1e-12);
            assert!(g.weights.iter().all(|w| *w > 0.0));
            let lib = verify_moments(&g, degree, Measure::Gaussian);
            let ours = moment_error(&g, degree as u32);
            assert!(lib <= 1e-10 && ours <= 1e-10, "degree {degree}, d {d}: {lib} {ours}");
            // odd monomials vanish by symmetry
            assert!(moment_error(&g, 1) <= 1e-12);
        }
    }
}

#[test]
fn unsupported_requests() {
    assert!(gaussian_cubature(0, 3).is_err());
    assert!(gaussian_cubature(2, 9).is_err());
    assert!(gaussian_cubature_with(5, 7, GaussianRule::Compact).is_err());
    assert!(bernoulli_full::<f64>(0).is_err());
}

#[test]
fn points_listing() {
    let g = gaussian_cubature(2, 3).unwrap();
    let mut buf = Vec::new();
    write_points(&g, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().all(|l| l.split_whitespace().count() == 3));
}
