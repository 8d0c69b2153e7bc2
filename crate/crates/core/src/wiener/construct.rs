use serde_json::{Map, Value};

use super::formula::{CubatureEntry, WienerCubatureFormula};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::lie::{br, leaf, LiePolynomial};
use crate::measures::{check_moments, Measure, PointCubature};

const MOMENT_TOL: f64 = 1e-10;

fn point_meta<C: Coeff>(g: &PointCubature<C>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("gaussian_rule".into(), Value::from(g.name.clone()));
    m.insert("gaussian_points".into(), Value::from(g.len()));
    m
}

/// `ℓ_k = ε0 + Σ z_k^i εi` with weights `λ_k`.
pub fn construct_degree3<C: Coeff>(g: &PointCubature<C>) -> Result<WienerCubatureFormula<C>> {
    check_moments(g, 3, Measure::Gaussian, MOMENT_TOL)?;
    let d = g.dim;
    let entries = g
        .points
        .iter()
        .zip(&g.weights)
        .map(|(z, w)| {
            let mut p = LiePolynomial::new(d);
            p.push(C::one(), leaf(0))?;
            for (i, zi) in z.iter().enumerate() {
                p.push(zi.clone(), leaf(i as u8 + 1))?;
            }
            Ok(CubatureEntry { weight: w.clone(), poly: p })
        })
        .collect::<Result<_>>()?;
    let mut metadata = point_meta(g);
    metadata.insert("size_formula".into(), Value::from(format!("S_{d}(3)=N_{d}(3)={}", g.len())));
    Ok(WienerCubatureFormula { dim: d, degree: 3, entries, metadata })
}

/// Two entries per Gaussian point, one per sign `η = ±1`, with free parameter
/// `x ∈ [0, 1]` splitting the weight between the two degree-3 brackets.
pub fn construct_degree5<C: Coeff>(g: &PointCubature<C>, x: &C) -> Result<WienerCubatureFormula<C>> {
    let xf = x.to_f64();
    if !(0.0..=1.0).contains(&xf) {
        return Err(Error::Unsupported(format!("degree-5 parameter x = {xf} outside [0, 1]")));
    }
    check_moments(g, 5, Measure::Gaussian, MOMENT_TOL)?;
    let d = g.dim;
    let r = |n, den| C::from_ratio(n, den);
    let one_minus_x = C::one() - x.clone();
    let mut entries = Vec::with_capacity(2 * g.len());
    for (z, w) in g.points.iter().zip(&g.weights) {
        for eta in [1i64, -1] {
            let mut p = LiePolynomial::new(d);
            p.push(C::one(), leaf(0))?;
            for (i, zi) in z.iter().enumerate() {
                p.push(zi.clone(), leaf(i as u8 + 1))?;
            }
            for (i, zi) in z.iter().enumerate() {
                let e = leaf(i as u8 + 1);
                p.push(r(1, 12) * zi.clone() * zi.clone(), br(br(leaf(0), e.clone()), e))?;
            }
            for i in 0..d {
                for j in i + 1..d {
                    let (ei, ej) = (leaf(i as u8 + 1), leaf(j as u8 + 1));
                    let (zi, zj) = (z[i].clone(), z[j].clone());
                    p.push(r(eta, 2) * zi.clone() * zj.clone(), br(ei.clone(), ej.clone()))?;
                    p.push(
                        r(1, 6) * x.clone() * zi.clone() * zj.clone() * zj.clone(),
                        br(br(ei.clone(), ej.clone()), ej.clone()),
                    )?;
                    p.push(
                        -(r(1, 6) * one_minus_x.clone() * zi.clone() * zi * zj),
                        br(br(ei.clone(), ej), ei),
                    )?;
                }
            }
            entries.push(CubatureEntry { weight: w.clone() * r(1, 2), poly: p });
        }
    }
    let mut metadata = point_meta(g);
    metadata.insert("x".into(), Value::from(xf));
    metadata.insert("size_formula".into(), Value::from(format!("S_{d}(5)=2N_{d}(5)={}", 2 * g.len())));
    Ok(WienerCubatureFormula { dim: d, degree: 5, entries, metadata })
}
