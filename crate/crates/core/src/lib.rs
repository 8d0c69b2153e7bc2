//! Free Lie algebra arithmetic, cubature formulas on Wiener space and
//! cubature-based weak solvers for Stratonovich SDEs.

pub mod algebra;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod lie;
pub mod measures;
pub mod sde;
pub mod wiener;

pub use error::{Error, Result};
