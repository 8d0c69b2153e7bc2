use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::expr::Expr;
use super::field::{FieldKind, VectorFieldSpec};
use super::polynomial::{Monomial, Polynomial};
use crate::error::{Error, Result};

/// The quantity whose expectation is estimated.
#[derive(Clone, Debug, PartialEq)]
pub enum Payoff {
    /// First state coordinate.
    Identity,
    Coordinate(usize),
    /// First coordinate raised to a power.
    Power(i32),
    Expr(String, Expr),
}

impl Payoff {
    pub fn parse(s: &str, n: usize) -> Result<Payoff> {
        let p = if s == "identity" {
            Payoff::Identity
        } else if let Some(i) = s.strip_prefix("coordinate:") {
            Payoff::Coordinate(i.trim().parse().map_err(|_| Error::Payoff(format!("bad coordinate in {s:?}")))?)
        } else if let Some(p) = s.strip_prefix("power:") {
            Payoff::Power(p.trim().parse().map_err(|_| Error::Payoff(format!("bad power in {s:?}")))?)
        } else {
            let src = s.strip_prefix("expr:").unwrap_or(s);
            Payoff::Expr(src.to_string(), Expr::parse(src, n)?)
        };
        if let Payoff::Coordinate(i) = p {
            if i >= n {
                return Err(Error::Payoff(format!("coordinate {i} outside state of dimension {n}")));
            }
        }
        Ok(p)
    }

    pub fn eval(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(match self {
            Payoff::Identity => x[0],
            Payoff::Coordinate(i) => x[*i],
            Payoff::Power(p) => x[0].powi(*p),
            Payoff::Expr(_, e) => e.eval(x.as_slice()),
        })
    }

    /// The linear functional `x ↦ c·x` when the payoff is linear.
    fn linear(&self, n: usize) -> Option<DVector<f64>> {
        let mut c = DVector::zeros(n);
        match self {
            Payoff::Identity | Payoff::Power(1) => c[0] = 1.0,
            Payoff::Coordinate(i) => c[*i] = 1.0,
            _ => return None,
        }
        Some(c)
    }
}

impl std::fmt::Display for Payoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Payoff::Identity => f.write_str("identity"),
            Payoff::Coordinate(i) => write!(f, "coordinate:{i}"),
            Payoff::Power(p) => write!(f, "power:{p}"),
            Payoff::Expr(s, _) => write!(f, "expr:{s}"),
        }
    }
}

/// An SDE `dX = Σ_j V_j(X) ∘ dB^j` from `x0` over `[0, t]` with a payoff.
#[derive(Clone, Debug)]
pub struct SDEProblem {
    pub field: VectorFieldSpec,
    pub x0: DVector<f64>,
    pub payoff: Payoff,
    pub t: f64,
    /// Reference value of `E[φ(X_t)]` at the problem's own horizon.
    pub reference: Option<f64>,
}

impl SDEProblem {
    pub fn new(field: VectorFieldSpec, x0: DVector<f64>, payoff: Payoff, t: f64) -> Result<Self> {
        if x0.len() != field.state_dim() {
            return Err(Error::DimensionMismatch { expected: field.state_dim(), found: x0.len() });
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidProblem(format!("horizon must be positive, got {t}")));
        }
        Ok(SDEProblem { field, x0, payoff, t, reference: None })
    }

    /// Stratonovich geometric Brownian motion, started at `x0`, with the identity payoff.
    pub fn gbm(a: f64, b: &[f64], x0: f64, t: f64) -> Self {
        Self::new(VectorFieldSpec::scalar_linear(a, b), DVector::from_element(1, x0), Payoff::Identity, t)
            .expect("valid scalar problem")
    }

    pub fn with_horizon(&self, t: f64) -> Self {
        let mut p = self.clone();
        p.t = t;
        if t != self.t {
            p.reference = None;
        }
        p
    }

    /// Exact `E[φ(X_t)]` when available: affine fields with a linear payoff
    /// have closed-form means; otherwise a stored reference at the problem's
    /// own horizon is used.
    pub fn reference_at(&self, t: f64) -> Option<f64> {
        if let (FieldKind::Affine { a, b }, Some(c)) = (self.field.kind(), self.payoff.linear(self.x0.len())) {
            return Some(c.dot(&affine_mean(a, b, &self.x0, t)));
        }
        (t == self.t).then_some(self.reference).flatten()
    }
}

/// `E[X_t]` for `dX = Σ (A_j X + b_j) ∘ dB^j`, which solves the linear ODE
/// `m' = (A_0 + ½ΣA_j²) m + (b_0 + ½ΣA_j b_j)`.
pub fn affine_mean(a: &[DMatrix<f64>], b: &[DVector<f64>], x0: &DVector<f64>, t: f64) -> DVector<f64> {
    let n = x0.len();
    let mut m = a[0].clone();
    let mut c = b[0].clone();
    for j in 1..a.len() {
        m += &a[j] * &a[j] * 0.5;
        c += &a[j] * &b[j] * 0.5;
    }
    // augmented generator [[M, c], [0, 0]]
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g.view_mut((0, 0), (n, n)).copy_from(&m);
    g.view_mut((0, n), (n, 1)).copy_from(&c);
    let e = (g * t).exp();
    let mut y = DVector::zeros(n + 1);
    y.rows_mut(0, n).copy_from(x0);
    y[n] = 1.0;
    (e * y).rows(0, n).into_owned()
}

/// `X0 exp((a + Σb²/2) t)`: mean of Stratonovich geometric Brownian motion.
pub fn gbm_mean(x0: f64, a: f64, b: &[f64], t: f64) -> f64 {
    x0 * ((a + 0.5 * b.iter().map(|v| v * v).sum::<f64>()) * t).exp()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    state_dim: usize,
    driving_dim: usize,
    kind: String,
    params: Value,
    x0: Vec<f64>,
    #[serde(default = "default_payoff")]
    payoff: String,
    #[serde(rename = "T")]
    t: f64,
    #[serde(default)]
    reference: Option<f64>,
}

fn default_payoff() -> String {
    "identity".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GbmParams {
    a: f64,
    b: Bscalar,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Bscalar {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineParams {
    /// One row-major `n×n` matrix per direction.
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<f64>>>,
    b: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    /// `fields[j][r]`: monomials of component `r` of `V_j`.
    fields: Vec<Vec<Vec<Monomial>>>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidProblem(msg.into())
}

impl SDEProblem {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ProblemFile = serde_json::from_str(text)?;
        let n = f.state_dim;
        let d = f.driving_dim;
        let field = match f.kind.as_str() {
            "gbm" => {
                let p: GbmParams = serde_json::from_value(f.params)?;
                let b = match p.b {
                    Bscalar::One(v) => vec![v],
                    Bscalar::Many(v) => v,
                };
                if n != 1 || b.len() != d {
                    return Err(bad(format!("gbm needs state_dim 1 and {d} diffusion coefficients")));
                }
                VectorFieldSpec::scalar_linear(p.a, &b)
            }
            "affine" => {
                let p: AffineParams = serde_json::from_value(f.params)?;
                if p.a.len() != d + 1 {
                    return Err(bad(format!("affine needs {} matrices", d + 1)));
                }
                let mats = p
                    .a
                    .iter()
                    .map(|rows| {
                        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                            return Err(bad(format!("matrices must be {n}x{n}")));
                        }
                        Ok(DMatrix::from_row_iterator(n, n, rows.iter().flatten().copied()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let vecs = match p.b {
                    Some(b) => b.into_iter().map(DVector::from_vec).collect(),
                    None => vec![DVector::zeros(n); d + 1],
                };
                VectorFieldSpec::affine(mats, vecs)?
            }
            "polynomial" => {
                let p: PolynomialParams = serde_json::from_value(f.params)?;
                if p.fields.len() != d + 1 {
                    return Err(bad(format!("polynomial needs {} directions", d + 1)));
                }
                let fields = p
                    .fields
                    .iter()
                    .map(|comps| {
                        comps
                            .iter()
                            .map(|ms| Polynomial::from_monomials(n, ms).ok_or_else(|| bad(format!("monomials need {n} powers"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                VectorFieldSpec::polynomial(fields)?
            }
            k => return Err(bad(format!("unknown kind {k:?}"))),
        };
        if field.state_dim() != n || field.driving_dim() != d {
            return Err(bad("declared dimensions do not match the parameters"));
        }
        let payoff = Payoff::parse(&f.payoff, n)?;
        let mut p = SDEProblem::new(field, DVector::from_vec(f.x0), payoff, f.t)?;
        p.reference = f.reference;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gbm_reference() {
        let p = SDEProblem::gbm(0.05, &[0.2], 1.0, 0.5);
        let r = p.reference_at(0.5).unwrap();
        assert!((r - gbm_mean(1.0, 0.05, &[0.2], 0.5)).abs() < 1e-14);
    }

    #[test]
    fn parse_files() {
        let gbm = r#"{"state_dim":1,"driving_dim":1,"kind":"gbm","params":{"a":0.05,"b":0.2},"x0":[1.0],"payoff":"identity","T":0.25,"reference":null}"#;
        let p = SDEProblem::from_json(gbm).unwrap();
        assert_eq!(p.field.driving_dim(), 1);
        let affine = r#"{"state_dim":2,"driving_dim":1,"kind":"affine","params":{"A":[[[0,1],[-1,0]],[[0.1,0],[0,0.1]]],"b":[[0,0],[1,0]]},"x0":[1,0],"payoff":"expr:x0^2 + x1","T":1}"#;
        let p = SDEProblem::from_json(affine).unwrap();
        assert!(p.reference_at(1.0).is_none());
        assert_eq!(p.payoff.eval(&DVector::from_vec(vec![2.0, 1.0])).unwrap(), 5.0);
        let poly = r#"{"state_dim":1,"driving_dim":1,"kind":"polynomial","params":{"fields":[[[{"coeff":1,"powers":[1]}]],[[{"coeff":0.5,"powers":[2]}]]]},"x0":[0.5],"payoff":"power:2","T":0.5,"reference":0.3}"#;
        let p = SDEProblem::from_json(poly).unwrap();
        assert_eq!(p.reference_at(0.5), Some(0.3));
        assert_eq!(p.reference_at(0.25), None);
        assert!(SDEProblem::from_json(&gbm.replace("\"gbm\"", "\"weird\"")).is_err());
        assert!(SDEProblem::from_json(&gbm.replace("identity", "coordinate:3")).is_err());
    }
}
