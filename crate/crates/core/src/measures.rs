//! Weighted point cubature for the standard Gaussian and Bernoulli measures.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// Points `z_k` in `R^d` with weights `λ_k`, exact for polynomials up to `degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCubature<C: Coeff = f64> {
    pub dim: usize,
    pub points: Vec<Vec<C>>,
    pub weights: Vec<C>,
    pub degree: usize,
    /// Short identifier of the construction, kept in formula metadata.
    pub name: String,
}

impl<C: Coeff> PointCubature<C> {
    pub fn new(dim: usize, points: Vec<Vec<C>>, weights: Vec<C>, degree: usize, name: impl Into<String>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        Ok(PointCubature { dim, points, weights, degree, name: name.into() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight_sum(&self) -> C {
        self.weights.iter().fold(C::zero(), |a, w| a + w.clone())
    }

    /// Cartesian product with another rule; weights multiply.
    pub fn product(&self, other: &Self) -> Self {
        let mut points = Vec::with_capacity(self.len() * other.len());
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (q, v) in other.points.iter().zip(&other.weights) {
                points.push(p.iter().chain(q).cloned().collect());
                weights.push(w.clone() * v.clone());
            }
        }
        PointCubature {
            dim: self.dim + other.dim,
            points,
            weights,
            degree: self.degree.min(other.degree),
            name: format!("{}x{}", self.name, other.name),
        }
    }

    /// `d`-fold product of a one-dimensional rule.
    pub fn power(&self, d: usize) -> Self {
        assert_eq!(self.dim, 1, "power of a multi-dimensional rule");
        let mut out = PointCubature {
            dim: 0,
            points: vec![Vec::new()],
            weights: vec![C::one()],
            degree: self.degree,
            name: String::new(),
        };
        for _ in 0..d {
            out = out.product(self);
        }
        out.name = format!("{}^{d}", self.name);
        out
    }

    pub fn to_f64(&self) -> PointCubature<f64> {
        PointCubature {
            dim: self.dim,
            points: self.points.iter().map(|p| p.iter().map(C::to_f64).collect()).collect(),
            weights: self.weights.iter().map(C::to_f64).collect(),
            degree: self.degree,
            name: self.name.clone(),
        }
    }

    /// Writes `x1,...,xd,weight` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        header.push("weight".into());
        w.write_record(&header)?;
        for (p, wt) in self.points.iter().zip(&self.weights) {
            let mut row: Vec<String> = p.iter().map(|x| format!("{:e}", x.to_f64())).collect();
            row.push(format!("{:e}", wt.to_f64()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Gaussian,
    Bernoulli,
}

/// Which Gaussian construction to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaussianRule {
    /// Compact rule where available, otherwise the product rule.
    #[default]
    Auto,
    Compact,
    Product,
}

impl std::str::FromStr for GaussianRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(GaussianRule::Auto),
            "compact" => Ok(GaussianRule::Compact),
            "product" => Ok(GaussianRule::Product),
            _ => Err(Error::Unsupported(format!("gaussian rule {s:?}"))),
        }
    }
}

/// All `2^d` sign vectors with weight `2^-d`. Exact for every degree.
pub fn bernoulli_full<C: Coeff>(d: usize) -> Result<PointCubature<C>> {
    if !(1..=16).contains(&d) {
        return Err(Error::Unsupported(format!("Bernoulli rule in dimension {d}")));
    }
    let n = 1usize << d;
    let w = C::from_ratio(1, n as i64);
    let points = (0..n)
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> (d - 1 - i) & 1 == 1 { C::one() } else { -C::one() })
                .collect()
        })
        .collect();
    PointCubature::new(d, points, vec![w; n], usize::MAX, format!("bernoulli-{d}"))
}

/// Gauss–Hermite nodes and weights for the unit-variance Gaussian,
/// normalised so the weights sum to one.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    // Jacobi matrix of the probabilists' Hermite recurrence
    let jac = DMatrix::from_fn(n, n, |i, j| if i + 1 == j || j + 1 == i { (i.max(j) as f64).sqrt() } else { 0.0 });
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    // He_n and He_{n-1} at x by the three-term recurrence
    let hermite = |x: f64| {
        let (mut prev, mut cur) = (1.0, x);
        if n == 1 {
            return (cur, prev);
        }
        for k in 1..n {
            let next = x * cur - k as f64 * prev;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    };
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (h, hm1) = hermite(*x);
            // He_n' = n He_{n-1}
            let step = h / (n as f64 * hm1);
            if step.is_finite() {
                *x -= step;
            }
        }
        if x.abs() < 1e-15 {
            *x = 0.0;
        }
    }
    let nf = (1..=n).map(|k| k as f64).product::<f64>();
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (_, hm1) = hermite(x);
            nf / ((n * n) as f64 * hm1 * hm1)
        })
        .collect();
    // symmetrise to remove round-off asymmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    (nodes, weights)
}

fn gauss_hermite_rule(n: usize) -> PointCubature<f64> {
    let (x, w) = gauss_hermite(n);
    PointCubature {
        dim: 1,
        points: x.into_iter().map(|x| vec![x]).collect(),
        weights: w,
        degree: 2 * n - 1,
        name: format!("gh{n}"),
    }
}

/// `±√d e_i`, weight `1/(2d)`.
fn axis_rule(d: usize) -> PointCubature<f64> {
    let r = (d as f64).sqrt();
    let w = 1.0 / (2 * d) as f64;
    let mut points = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut p = vec![0.0; d];
            p[i] = s * r;
            points.push(p);
        }
    }
    PointCubature { dim: d, points, weights: vec![w; 2 * d], degree: 3, name: format!("axis-{d}") }
}

/// Symmetric degree-5 rule on the origin, the axes and the pair diagonals.
/// All weights are positive for `d <= 3`.
fn compact5(d: usize) -> Option<PointCubature<f64>> {
    if !(1..=3).contains(&d) {
        return None;
    }
    let df = d as f64;
    let r = (df + 2.0).sqrt();
    let s = ((df + 2.0) / 2.0).sqrt();
    let b = (4.0 - df) / (2.0 * (df + 2.0) * (df + 2.0));
    let c = 1.0 / ((df + 2.0) * (df + 2.0));
    let mut points = vec![vec![0.0; d]];
    let mut weights = vec![2.0 / (df + 2.0)];
    for i in 0..d {
        for sg in [1.0, -1.0] {
            let mut p = vec![0.0; d];
            p[i] = sg * r;
            points.push(p);
            weights.push(b);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut p = vec![0.0; d];
                p[i] = si * s;
                p[j] = sj * s;
                points.push(p);
                weights.push(c);
            }
        }
    }
    Some(PointCubature { dim: d, points, weights, degree: 5, name: format!("compact5-{d}") })
}

/// Product Gauss–Hermite rule with `ceil((degree+1)/2)` nodes per axis.
pub fn gaussian_product(d: usize, degree: usize) -> PointCubature<f64> {
    let n = (degree + 2) / 2;
    let mut p = gauss_hermite_rule(n).power(d);
    p.degree = 2 * n - 1;
    p.name = format!("gh{n}^{d}");
    p
}

/// A Gaussian rule of the requested degree, using the default construction.
pub fn gaussian_cubature(d: usize, degree: usize) -> Result<PointCubature<f64>> {
    gaussian_cubature_with(d, degree, GaussianRule::Auto)
}

pub fn gaussian_cubature_with(d: usize, degree: usize, rule: GaussianRule) -> Result<PointCubature<f64>> {
    let unsupported = || Error::Unsupported(format!("Gaussian rule of degree {degree} in dimension {d} ({rule:?})"));
    let max_dim = match degree {
        3 | 5 => 10,
        7 => 5,
        _ => 0,
    };
    if d == 0 || d > max_dim {
        return Err(unsupported());
    }
    let compact = match degree {
        3 => Some(axis_rule(d)),
        5 => compact5(d),
        _ => None,
    };
    match (rule, compact) {
        (GaussianRule::Compact, None) => Err(unsupported()),
        (GaussianRule::Compact | GaussianRule::Auto, Some(c)) => Ok(c),
        (GaussianRule::Auto | GaussianRule::Product, _) => Ok(gaussian_product(d, degree)),
    }
}

fn double_factorial_odd(k: u32) -> f64 {
    // (2k-1)!!
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

fn monomials(d: usize, max_total: usize) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k as u32);
            rec(d, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_total, &mut Vec::new(), &mut out);
    out
}

/// Largest `|Σ λ P(z) − E[P]|` over monomials of total degree at most `degree`.
pub fn verify_moments<C: Coeff>(c: &PointCubature<C>, degree: usize, measure: Measure) -> f64 {
    let monos = monomials(c.dim, degree);
    // powers[k][i][e] = z_k^i ^ e
    let powers: Vec<Vec<Vec<C>>> = c
        .points
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| {
                    let mut v = Vec::with_capacity(degree + 1);
                    v.push(C::one());
                    for e in 1..=degree {
                        let next = v[e - 1].clone() * x.clone();
                        v.push(next);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for m in &monos {
        let mut acc = C::zero();
        for (pw, w) in powers.iter().zip(&c.weights) {
            let mut term = w.clone();
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = term * pw[i][e as usize].clone();
                }
            }
            acc.add_assign_ref(&term);
        }
        let all_even = m.iter().all(|e| e % 2 == 0);
        let exact = match measure {
            Measure::Bernoulli => C::from_ratio(i64::from(all_even), 1),
            Measure::Gaussian if !all_even => C::zero(),
            Measure::Gaussian => C::from_f64(m.iter().map(|e| double_factorial_odd(e / 2)).product()),
        };
        worst = worst.max((acc - exact).magnitude());
    }
    worst
}

/// Returns an error unless `c` integrates every monomial of degree `<= degree`
/// to within `tol`.
pub fn check_moments<C: Coeff>(c: &PointCubature<C>, degree: usize, measure: Measure, tol: f64) -> Result<()> {
    let error = verify_moments(c, degree, measure);
    if error > tol {
        return Err(Error::MomentCheck { degree, error, tol });
    }
    Ok(())
}

/// Text listing `x1 ... xd weight`, one point per line.
pub fn write_points(c: &PointCubature<f64>, out: &mut impl Write) -> std::io::Result<()> {
    for (p, w) in c.points.iter().zip(&c.weights) {
        for x in p {
            write!(out, "{x:.17e} ")?;
        }
        writeln!(out, "{w:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{ratio, BigRational};

    #[test]
    fn gauss_hermite_small() {
        let (x, w) = gauss_hermite(3);
        assert!((x[2] - 3f64.sqrt()).abs() < 1e-14 && x[1] == 0.0);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-14 && (w[0] - 1.0 / 6.0).abs() < 1e-14);
        let (x, _) = gauss_hermite(1);
        assert_eq!(x, [0.0]);
    }

    #[test]
    fn axis_rule_values() {
        let g = gaussian_cubature(2, 3).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.weights.iter().all(|&w| w == 0.25));
        assert!(g.points.iter().any(|p| (p[0] - 2f64.sqrt()).abs() < 1e-15 && p[1] == 0.0));
        // fourth moment of the axis rule is d, not 3
        let e = verify_moments(&g, 4, Measure::Gaussian);
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_exact() {
        let b = bernoulli_full::<BigRational>(3).unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.weight_sum(), ratio(1, 1));
        assert_eq!(verify_moments(&b, 9, Measure::Bernoulli), 0.0);
        assert!(bernoulli_full::<f64>(0).is_err());
        assert!(bernoulli_full::<f64>(17).is_err());
    }

    #[test]
    fn product_sizes() {
        assert_eq!(gaussian_cubature(3, 7).unwrap().len(), 64);
        assert_eq!(gaussian_cubature_with(2, 5, GaussianRule::Product).unwrap().len(), 9);
        assert_eq!(gaussian_cubature(1, 5).unwrap().len(), 3);
        assert!(gaussian_cubature(3, 9).is_err());
        assert!(gaussian_cubature_with(4, 5, GaussianRule::Compact).is_err());
    }

    #[test]
    fn monomial_count() {
        // C(d+m, m)
        assert_eq!(monomials(3, 4).len(), 35);
    }
}
