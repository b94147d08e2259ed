//! Shared numerical kernel.
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! outputs, so the higher-level reports are reproducible run to run.

mod diverge;
mod interp;
mod invert;
mod quad;

pub use diverge::{
    classify_divergence, default_cutoffs, DivergenceOptions, DivergenceVerdict, Verdict,
};
pub use interp::{geometric_knots, pchip_table, CubicHermite, CumulativeTable, TailTable};
pub use invert::{invert_decreasing, invert_monotone, invert_monotone_expanding, Inversion};
pub use quad::{integrate, integrate_with, QuadratureOptions, QuadratureResult};

use thiserror::Error;

/// Errors raised by the numerical kernel.
#[derive(Debug, Clone, Error)]
pub enum CalculusError {
    #[error("integrand returned a non-finite value at t = {at:e}")]
    NonFiniteEvaluation { at: f64 },
    #[error("subdivision budget exhausted: error {error:e} on value {value:e}, target {target:e}")]
    ToleranceNotMet { value: f64, error: f64, target: f64 },
    #[error("target {y:e} outside bracket image [{f_lo:e}, {f_hi:e}]")]
    BracketInvalid { y: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
