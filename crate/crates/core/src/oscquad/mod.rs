//! Oscillatory integrals: the Green's function G(x,t), the integral I(v,t) with
//! its split near the origin, and the generic integral J(t, S, ψ).

mod catalog;
mod green;
pub mod grid;
mod jint;
mod oint;
mod probe;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalog::{model_phase_catalog, ModelPhase};
pub use green::{cos_kernel, green_g, green_g_unfolded};
pub use grid::quad_torus;
pub use jint::{oscint_j, JOptions};
pub use oint::{inv_d_kernel, oscint_i, split_integral, SplitResult};
pub use probe::{perturbation_probe, ProbeLevel, ProbeResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature would need {evaluations:.3e} evaluations (budget {budget:.3e})")]
    BudgetExceeded { evaluations: f64, budget: f64 },
    #[error("no convergence after refining to N={last_n} (relative change {rel_change:.3e})")]
    NotConverged { last_n: usize, rel_change: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Controls for the refine-until-converged loops.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rtol: f64,
    /// Absolute floor added to the convergence test, for values near zero.
    pub atol: f64,
    pub budget: f64,
    pub max_doublings: usize,
    pub n_min: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rtol: 1e-9, atol: 1e-14, budget: 2e9, max_doublings: 6, n_min: 64 }
    }
}

impl QuadOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        QuadOptions { rtol, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Final grid size per dimension (or node count for non-grid rules).
    pub n: usize,
    pub history: Vec<(usize, Complex64)>,
    pub converged: bool,
    pub rel_change: f64,
}

impl QuadratureResult {
    pub fn exact(value: Complex64) -> Self {
        QuadratureResult { value, n: 0, history: Vec::new(), converged: true, rel_change: 0.0 }
    }
}

/// Evaluates `eval(n)` for n = n0, 2n0, … until two successive values agree.
pub(crate) fn refine<F>(n0: usize, opts: &QuadOptions, mut eval: F) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(usize) -> Result<Complex64, QuadError>,
{
    let mut n = n0;
    let mut history: Vec<(usize, Complex64)> = Vec::new();
    let mut rel_change = f64::INFINITY;
    for _ in 0..=opts.max_doublings {
        let v = match eval(n) {
            Ok(v) => v,
            Err(QuadError::BudgetExceeded { .. }) if !history.is_empty() => {
                return Err(QuadError::NotConverged { last_n: history.last().unwrap().0, rel_change });
            }
            Err(e) => return Err(e),
        };
        if let Some(&(_, prev)) = history.last() {
            let diff = (v - prev).norm();
            rel_change = diff / v.norm().max(f64::MIN_POSITIVE);
            if diff <= opts.rtol * v.norm() + opts.atol {
                history.push((n, v));
                return Ok(QuadratureResult { value: v, n, history, converged: true, rel_change });
            }
        }
        history.push((n, v));
        n *= 2;
    }
    Err(QuadError::NotConverged { last_n: history.last().map_or(n0, |h| h.0), rel_change })
}

/// Like [`refine`], but `eval(n)` returns the values on the grid of size n and
/// on its nested half-resolution subgrid, so each level costs one evaluation.
pub(crate) fn refine_nested<F>(n0: usize, opts: &QuadOptions, mut eval: F) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(usize) -> Result<(Complex64, Complex64), QuadError>,
{
    let mut n = n0;
    let mut history: Vec<(usize, Complex64)> = Vec::new();
    let mut rel_change = f64::INFINITY;
    for _ in 0..=opts.max_doublings {
        let (fine, coarse) = match eval(n) {
            Ok(v) => v,
            Err(QuadError::BudgetExceeded { .. }) if !history.is_empty() => {
                return Err(QuadError::NotConverged { last_n: history.last().unwrap().0, rel_change });
            }
            Err(e) => return Err(e),
        };
        if history.last().map(|h| h.0) != Some(n / 2) {
            history.push((n / 2, coarse));
        }
        history.push((n, fine));
        let diff = (fine - coarse).norm();
        rel_change = diff / fine.norm().max(f64::MIN_POSITIVE);
        if diff <= opts.rtol * fine.norm() + opts.atol {
            return Ok(QuadratureResult { value: fine, n, history, converged: true, rel_change });
        }
        n *= 2;
    }
    Err(QuadError::NotConverged { last_n: history.last().map_or(n0, |h| h.0), rel_change })
}
