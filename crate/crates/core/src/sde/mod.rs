//! Weak approximation of Stratonovich SDEs by cubature on Wiener space.

mod augment;
mod converge;
mod expr;
mod field;
mod polynomial;
mod problem;
mod solver;

pub use augment::{signature_level_system, SignatureLayout, MAX_LEVEL};
pub use converge::{convergence_experiment, fit_slope, ConvergenceResult, ConvergenceRow, DEFAULT_ERROR_FLOOR};
pub use expr::Expr;
pub use field::{ContractedField, FieldFn, FieldKind, Tower, VectorFieldSpec};
pub use polynomial::{Monomial, Polynomial};
pub use problem::{affine_mean, gbm_mean, Payoff, SDEProblem};
pub use solver::{
    cubature_tree, logode_step, monte_carlo, rk4, taylor_step, Method, MonteCarloConfig, SolverReport, TreeConfig,
    DEFAULT_LEAF_BUDGET, DEFAULT_ODE_STEPS,
};
