use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{ContractedField, Tower, VectorFieldSpec};
use super::problem::SDEProblem;
use crate::algebra::{TensorElement, TensorSpace};
use crate::error::{Error, Result};
use crate::lie::LiePolynomial;
use crate::wiener::{scale_formula, WienerCubatureFormula};

pub const DEFAULT_ODE_STEPS: usize = 8;
pub const DEFAULT_LEAF_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Taylor,
    LogOde,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Taylor => "taylor",
            Method::LogOde => "logode",
            Method::MonteCarlo => "mc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(Method::Taylor),
            "logode" | "log-ode" => Ok(Method::LogOde),
            "mc" | "montecarlo" => Ok(Method::MonteCarlo),
            _ => Err(Error::Unsupported(format!("method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverReport {
    pub estimate: f64,
    pub method: Method,
    /// Cubature leaves (`n^k`) or Monte Carlo paths.
    pub leaf_count: u128,
    pub step_count: usize,
    pub weight_sum: f64,
    pub std_error: Option<f64>,
    pub reference: Option<f64>,
    pub abs_error: Option<f64>,
    /// Not serialized, so that report files are reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
}

fn finite(x: DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// `Σ_w L[w] g_w(x)`: the truncated stochastic Taylor image of `x`.
/// `L` should be truncated at the intended degree.
pub fn taylor_step(x: &DVector<f64>, l: &TensorElement<f64>, v: &VectorFieldSpec) -> Result<DVector<f64>> {
    finite(v.contract(l)?.eval(x), "taylor step")
}

/// Classical RK4 on `z' = F(z)` over `u ∈ [0, 1]`.
pub fn rk4(f: &ContractedField, x: &DVector<f64>, steps: usize) -> Result<DVector<f64>> {
    let h = 1.0 / steps.max(1) as f64;
    let mut z = x.clone();
    for _ in 0..steps.max(1) {
        let k1 = f.eval(&z);
        let k2 = f.eval(&(&z + &k1 * (h / 2.0)));
        let k3 = f.eval(&(&z + &k2 * (h / 2.0)));
        let k4 = f.eval(&(&z + &k3 * h));
        z += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("log-ODE integration"));
        }
    }
    Ok(z)
}

/// Solves `z' = Σ_w ℓ[w] g_w(z)` from `z(0) = x` to `z(1)`, with `ℓ`
/// expanded at graded degree `m`.
pub fn logode_step(
    x: &DVector<f64>,
    l: &LiePolynomial<f64>,
    v: &VectorFieldSpec,
    m: usize,
    ode_steps: usize,
) -> Result<DVector<f64>> {
    let space = TensorSpace::graded(v.driving_dim(), m)?;
    let f = v.contract(&l.expand(&space)?)?;
    rk4(&f, x, ode_steps)
}

#[derive(Clone, Debug)]
pub struct TreeConfig {
    pub method: Method,
    pub ode_steps: usize,
    pub leaf_budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { method: Method::Taylor, ode_steps: DEFAULT_ODE_STEPS, leaf_budget: DEFAULT_LEAF_BUDGET, threads: None }
    }
}

impl TreeConfig {
    pub fn with_method(method: Method) -> Self {
        TreeConfig { method, ..Default::default() }
    }
}

enum StepMap {
    Taylor(ContractedField),
    LogOde(ContractedField, usize),
}

impl StepMap {
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            StepMap::Taylor(f) => finite(f.eval(x), "taylor step"),
            StepMap::LogOde(f, n) => rk4(f, x, *n),
        }
    }
}

fn step_maps(
    v: &VectorFieldSpec,
    f: &WienerCubatureFormula<f64>,
    method: Method,
    ode_steps: usize,
) -> Result<Vec<(f64, StepMap)>> {
    let space = TensorSpace::graded(v.driving_dim(), f.degree)?;
    let tower = Tower::new(v, &space)?;
    f.entries
        .par_iter()
        .map(|e| {
            let l = e.poly.expand(&space)?;
            let map = match method {
                Method::Taylor => StepMap::Taylor(tower.contract(&l.exp()?)?),
                Method::LogOde => StepMap::LogOde(tower.contract(&l)?, ode_steps),
                Method::MonteCarlo => return Err(Error::Unsupported("Monte Carlo is not a cubature method".into())),
            };
            Ok((e.weight, map))
        })
        .collect()
}

/// `(Σ weight·φ, Σ weight)` over the subtree below `x` with `depth` steps left.
fn subtree(
    maps: &[(f64, StepMap)],
    x: &DVector<f64>,
    depth: usize,
    payoff: &(dyn Fn(&DVector<f64>) -> Result<f64> + Sync),
) -> Result<(f64, f64)> {
    if depth == 0 {
        return Ok((payoff(x)?, 1.0));
    }
    let (mut acc, mut wsum) = (0.0, 0.0);
    for (w, m) in maps {
        let (v, s) = subtree(maps, &m.apply(x)?, depth - 1, payoff)?;
        acc += w * v;
        wsum += w * s;
    }
    Ok((acc, wsum))
}

/// Composes the formula, scaled to `T/k`, over `k` uniform steps: `n^k`
/// deterministic trajectories. First-level subtrees run in parallel and are
/// summed in entry order, so the result is independent of the thread count.
pub fn cubature_tree(
    problem: &SDEProblem,
    f: &WienerCubatureFormula<f64>,
    steps: usize,
    cfg: &TreeConfig,
) -> Result<SolverReport> {
    let start = Instant::now();
    if steps == 0 {
        return Err(Error::InvalidProblem("at least one step is required".into()));
    }
    if f.dim != problem.field.driving_dim() {
        return Err(Error::DimensionMismatch { expected: problem.field.driving_dim(), found: f.dim });
    }
    let leaves = (f.len() as u128).checked_pow(steps as u32).unwrap_or(u128::MAX);
    if leaves > cfg.leaf_budget as u128 {
        return Err(Error::LeafBudget { leaves, budget: cfg.leaf_budget });
    }
    let scaled = scale_formula(f, problem.t / steps as f64)?;
    let run = || -> Result<(f64, f64)> {
        let maps = step_maps(&problem.field, &scaled, cfg.method, cfg.ode_steps)?;
        let payoff = |x: &DVector<f64>| problem.payoff.eval(x);
        let parts: Vec<(f64, f64)> = maps
            .par_iter()
            .map(|(_, m)| subtree(&maps, &m.apply(&problem.x0)?, steps - 1, &payoff))
            .collect::<Result<_>>()?;
        let (mut acc, mut wsum) = (0.0, 0.0);
        for ((w, _), (v, s)) in maps.iter().zip(parts) {
            acc += w * v;
            wsum += w * s;
        }
        Ok((acc, wsum))
    };
    let (estimate, weight_sum) = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let reference = problem.reference_at(problem.t);
    Ok(SolverReport {
        estimate,
        method: cfg.method,
        leaf_count: leaves,
        step_count: steps,
        weight_sum,
        std_error: None,
        reference,
        abs_error: reference.map(|r| (estimate - r).abs()),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug)]
pub struct MonteCarloConfig {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

/// Paths per random stream. Chunk `c` draws from stream `c` of the seeded
/// generator, and chunk sums are combined in order.
const MC_CHUNK: usize = 1024;

/// Heun (Stratonovich) Monte Carlo baseline.
pub fn monte_carlo(problem: &SDEProblem, cfg: &MonteCarloConfig) -> Result<SolverReport> {
    let start = Instant::now();
    if cfg.paths == 0 || cfg.steps == 0 {
        return Err(Error::InvalidProblem("paths and steps must be positive".into()));
    }
    let v = &problem.field;
    let d = v.driving_dim();
    let h = problem.t / cfg.steps as f64;
    let sqrt_h = h.sqrt();
    let chunks = cfg.paths.div_ceil(MC_CHUNK);
    let run_chunk = |c: usize| -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c as u64);
        let count = MC_CHUNK.min(cfg.paths - c * MC_CHUNK);
        let (mut s, mut s2) = (0.0, 0.0);
        let mut db = vec![0.0; d + 1];
        db[0] = h;
        for _ in 0..count {
            let mut x = problem.x0.clone();
            for _ in 0..cfg.steps {
                for dbj in db.iter_mut().skip(1) {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *dbj = z * sqrt_h;
                }
                let drift: Vec<DVector<f64>> = (0..=d).map(|j| v.eval(j, &x)).collect();
                let mut pred = x.clone();
                for (vj, dbj) in drift.iter().zip(&db) {
                    pred += vj * *dbj;
                }
                let mut next = x.clone();
                for (j, (vj, dbj)) in drift.iter().zip(&db).enumerate() {
                    next += (vj + v.eval(j, &pred)) * (0.5 * dbj);
                }
                x = next;
            }
            let p = problem.payoff.eval(&x)?;
            if !p.is_finite() {
                return Err(Error::NonFinite("Monte Carlo path"));
            }
            s += p;
            s2 += p * p;
        }
        Ok((s, s2))
    };
    let run = || -> Result<Vec<(f64, f64)>> { (0..chunks).into_par_iter().map(run_chunk).collect() };
    let parts = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let (mut s, mut s2) = (0.0, 0.0);
    for (a, b) in parts {
        s += a;
        s2 += b;
    }
    let n = cfg.paths as f64;
    let mean = s / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
    let reference = problem.reference_at(problem.t);
    Ok(SolverReport {
        estimate: mean,
        method: Method::MonteCarlo,
        leaf_count: cfg.paths as u128,
        step_count: cfg.steps,
        weight_sum: 1.0,
        std_error: Some((var / n).sqrt()),
        reference,
        abs_error: reference.map(|r| (mean - r).abs()),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
