//! Exact-rational polynomials and truncated series, Newton polyhedra, and the
//! phase decompositions at degenerate critical points of the lattice wave phase.

mod lp;
mod newton;
mod parse;
mod phase;
mod poly;
mod series;
mod univariate;

use thiserror::Error;

pub use parse::{parse_poly, parse_poly_in, ParseError};
pub use lp::{solve_standard, LpOutcome};
pub use newton::{
    check_r_nondegenerate, default_certificate_eps, face_part, newton_data, varchenko_bound, DistanceCertificate, Face, FaceJson,
    FaceVerdict, Facet, NewtonData, NewtonDataJson, SamplerOptions, Verdict,
};
pub use phase::{
    build_conj_phase, corank_two_expansion_d4, is_in_h, corner_expansion, make_q, make_y, taylor_phase, weight_wd,
    weighted_min_degree, BaseCoord, ConjPhase, Containment, CorankTwoExpansion, CornerExpansion, PhaseSeries, Weight,
};
pub use poly::{rat, rat_int, rat_string, rat_to_f64, Exponent, Rat, SparsePoly};
pub use series::{Germ, TruncatedSeries};
pub use univariate::{adapted_check_2d, AdaptedCheck, UPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("series has a nonzero constant term")]
    NonzeroConstant,
    #[error("base point is not critical (linear term {residual:e})")]
    NotCritical { residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("face is not a face of the Newton polyhedron")]
    FaceNotFound,
    #[error("not applicable: {0}")]
    NotApplicable(String),
}
