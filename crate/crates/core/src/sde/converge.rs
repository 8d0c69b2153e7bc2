use std::path::Path;

use serde::Serialize;

use super::problem::SDEProblem;
use super::solver::{cubature_tree, Method, TreeConfig};
use crate::error::{Error, Result};
use crate::wiener::WienerCubatureFormula;

pub const DEFAULT_ERROR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub degree: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub steps: usize,
    pub method: &'static str,
    pub estimate: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceResult {
    pub rows: Vec<ConvergenceRow>,
    /// `(degree, fitted slope of log error against log step size)`.
    pub slopes: Vec<(usize, Result<f64, String>)>,
}

impl ConvergenceResult {
    pub fn slope(&self, degree: usize) -> Option<f64> {
        self.slopes.iter().find(|(d, _)| *d == degree).and_then(|(_, s)| s.as_ref().ok().copied())
    }

    /// `degree,T,steps,method,estimate,abs_error`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Least-squares slope of `ln y` against `ln x`, skipping `y <= floor`.
pub fn fit_slope(points: &[(f64, f64)], floor: f64) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *y > floor && *x > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(Error::DegenerateFit { usable: usable.len() });
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { usable: 1 });
    }
    Ok(sxy / sxx)
}

/// Runs every formula at every horizon in `times` and step count in `steps`,
/// then fits the error slope against the step size `T/k` per formula.
pub fn convergence_experiment(
    problem: &SDEProblem,
    formulas: &[WienerCubatureFormula<f64>],
    times: &[f64],
    steps: &[usize],
    cfg: &TreeConfig,
    floor: f64,
) -> Result<ConvergenceResult> {
    if cfg.method == Method::MonteCarlo {
        return Err(Error::Unsupported("convergence experiments use cubature methods".into()));
    }
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for f in formulas {
        let mut pts = Vec::new();
        for &t in times {
            let p = problem.with_horizon(t);
            let reference = p
                .reference_at(t)
                .ok_or_else(|| Error::MissingReference(format!("no reference value at T = {t}")))?;
            for &k in steps {
                let rep = cubature_tree(&p, f, k, cfg)?;
                let err = (rep.estimate - reference).abs();
                pts.push((t / k as f64, err));
                rows.push(ConvergenceRow {
                    degree: f.degree,
                    t,
                    steps: k,
                    method: cfg.method.name(),
                    estimate: rep.estimate,
                    abs_error: err,
                });
            }
        }
        slopes.push((f.degree, fit_slope(&pts, floor).map_err(|e| e.to_string())));
    }
    Ok(ConvergenceResult { rows, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..6).map(|k| {
            let x = 0.5f64.powi(k);
            (x, 3.0 * x.powi(2))
        }).collect();
        assert!((fit_slope(&pts, 1e-12).unwrap() - 2.0).abs() < 1e-12);
        let flat: Vec<_> = pts.iter().map(|(x, _)| (*x, 1e-15)).collect();
        assert!(matches!(fit_slope(&flat, 1e-12), Err(Error::DegenerateFit { usable: 0 })));
    }
}
