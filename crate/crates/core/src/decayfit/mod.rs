//! Fitting sampled magnitudes to C·t^β·log^p t and comparing with theory.

mod fit;
mod suites;

use thiserror::Error;

pub use fit::{fit_decay, geometric_schedule, DecayFit, DecaySamples, FitOptions, PowerFit};
pub use suites::{
    ray_indices, read_samples_csv, run_case, run_conj_suite, run_model_phase_suite, run_table1_suite, sample_case, table1_cases,
    write_samples_csv, ModelSuiteOptions, RaySampler, RaySuiteOptions, StratumCase, SuiteRow,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
    #[error("invalid samples: {0}")]
    InvalidSamples(String),
    #[error(transparent)]
    Quad(#[from] crate::oscquad::QuadError),
}
