//! Spectral solver for the lattice wave / Klein–Gordon equation on periodic
//! boxes, Fourier multipliers (e^{±itD}, 1/D) and space-time norm experiments.

mod field;
mod linear;
mod nonlinear;
mod norms;

use thiserror::Error;

pub use field::{FftNd, LatticeField};
pub use linear::{linear_propagate, min_box_side, require_box, EvolutionState, InvDResult, Propagator};
pub use nonlinear::{nonlinear_solve, NonlinearOptions};
pub use norms::{
    lplq_experiment, lplq_target, mixed_norm, random_small_support, strichartz_ratio, strichartz_sample, time_norm, write_lplq_csv,
    write_mixed_csv, LplqRow, LplqTable, MixedNormReport, StrichartzSample,
};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("box side {side} is below {needed} needed for pointwise comparison up to t={t}")]
    BoxTooSmall { side: usize, needed: usize, t: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("solution blew up at t={t} (sup |u| = {sup:.3e})")]
    Blowup { t: f64, sup: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
