use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dispersion::DispersionRelation;

use super::grid::{fold_multiplicity, quad_torus, separable_cost, separable_sum_nested};
use super::{refine_nested, QuadError, QuadOptions, QuadratureResult};

/// Folded torus weights cos(x_j ξ_k)·m_k/N and c(ξ_k) = 2 − 2cos ξ_k on
/// ξ_k = 2πk/N, k = 0..=N/2.
pub(crate) fn torus_weights(x: &[f64], n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = n / 2 + 1;
    let xi: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let cvals = xi.iter().map(|s| 2.0 - 2.0 * s.cos()).collect();
    let weights = x
        .iter()
        .map(|&xj| {
            (0..m)
                .map(|k| (xj * xi[k]).cos() * fold_multiplicity(k, n) / n as f64)
                .collect()
        })
        .collect();
    (weights, cvals)
}

pub(crate) fn check_budget(weights: &[Vec<f64>], opts: &QuadOptions) -> Result<(), QuadError> {
    let cost = separable_cost(weights);
    if cost > opts.budget {
        return Err(QuadError::BudgetExceeded { evaluations: cost, budget: opts.budget });
    }
    Ok(())
}

fn initial_grid(x: &[i64], t: f64, opts: &QuadOptions) -> usize {
    let xmax = x.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
    let osc = 4 * (1.0 + t.abs()).ceil() as usize;
    // multiple of 4 so the nested half grid keeps the point ξ = π
    opts.n_min.max(osc).max(2 * xmax + 8).div_ceil(4) * 4
}

fn radial_kernel_sum<K>(rel: &DispersionRelation, x: &[i64], t: f64, opts: &QuadOptions, kernel: K) -> Result<QuadratureResult, QuadError>
where
    K: Fn(f64) -> f64 + Sync,
{
    if x.len() != rel.dim() {
        return Err(QuadError::InvalidInput(format!("x has length {}, expected {}", x.len(), rel.dim())));
    }
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    let m2 = rel.mass() * rel.mass();
    let k = |s: f64| Complex64::new(kernel(m2 + s), 0.0);
    let d = x.len() as i32;
    refine_nested(initial_grid(x, t, opts), opts, |n| {
        let (w, c) = torus_weights(&xf, n);
        check_budget(&w, opts)?;
        let (fine, even) = separable_sum_nested(&w, &c, &k);
        Ok((fine, even * 2f64.powi(d)))
    })
}

/// G(x,t) = (2π)^{−d} ∫ e^{ix·ξ} sin(tω)/ω dξ over the torus.
///
/// The sine parts of e^{ix·ξ} cancel pairwise on the symmetric grid, so only the
/// cosine product is summed and the result is real by construction;
/// [`green_g_unfolded`] evaluates the complex sum for auditing.
pub fn green_g(rel: &DispersionRelation, x: &[i64], t: f64, opts: &QuadOptions) -> Result<QuadratureResult, QuadError> {
    if t == 0.0 {
        return Ok(QuadratureResult::exact(Complex64::new(0.0, 0.0)));
    }
    radial_kernel_sum(rel, x, t, opts, |w2| {
        if w2 == 0.0 {
            t
        } else {
            let w = w2.sqrt();
            (t * w).sin() / w
        }
    })
}

/// (2π)^{−d} ∫ e^{ix·ξ} cos(tω) dξ, the time derivative of G.
pub fn cos_kernel(rel: &DispersionRelation, x: &[i64], t: f64, opts: &QuadOptions) -> Result<QuadratureResult, QuadError> {
    radial_kernel_sum(rel, x, t, opts, |w2| (t * w2.sqrt()).cos())
}

/// G(x,t) by the plain full-grid trapezoid with the complex exponential kept.
pub fn green_g_unfolded(rel: &DispersionRelation, x: &[i64], t: f64, n: usize, budget: f64) -> Result<Complex64, QuadError> {
    let d = rel.dim();
    let v = quad_torus(
        |xi| {
            let w = rel.omega(xi);
            let f = if w == 0.0 { t } else { (t * w).sin() / w };
            let ph: f64 = x.iter().zip(xi).map(|(a, b)| *a as f64 * b).sum();
            Complex64::from_polar(f, ph)
        },
        d,
        n,
        budget,
    )?;
    Ok(v / (2.0 * PI).powi(d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_and_oddness() {
        let r = DispersionRelation::wave(3);
        let o = QuadOptions::default();
        assert_eq!(green_g(&r, &[1, 0, 2], 0.0, &o).unwrap().value.re, 0.0);
        let a = green_g(&r, &[1, 0, 2], 3.7, &o).unwrap().value.re;
        let b = green_g(&r, &[1, 0, 2], -3.7, &o).unwrap().value.re;
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn small_time_taylor_d4() {
        let r = DispersionRelation::wave(4);
        let t = 1e-2;
        let g = green_g(&r, &[0, 0, 0, 0], t, &QuadOptions::default()).unwrap().value.re;
        let approx = t - 4.0 / 3.0 * t.powi(3);
        assert!((g - approx).abs() < 1e-9, "{g} vs {approx}");
    }

    #[test]
    fn folded_matches_unfolded_and_is_real() {
        let r = DispersionRelation::wave(2);
        let x = [3, -1];
        let n = 64;
        let full = green_g_unfolded(&r, &x, 5.0, n, 1e9).unwrap();
        let (w, c) = torus_weights(&[3.0, -1.0], n);
        let folded = super::super::grid::separable_sum(&w, &c, &|s: f64| {
            let w = s.sqrt();
            Complex64::new(if w == 0.0 { 5.0 } else { (5.0 * w).sin() / w }, 0.0)
        });
        assert!(full.im.abs() <= 1e-10);
        assert!((full.re - folded.re).abs() < 1e-13);
    }

    #[test]
    fn lattice_symmetry() {
        let r = DispersionRelation::wave(3);
        let o = QuadOptions::default();
        let a = green_g(&r, &[2, -1, 0], 6.0, &o).unwrap().value.re;
        let b = green_g(&r, &[0, 2, 1], 6.0, &o).unwrap().value.re;
        assert!((a - b).abs() < 1e-10);
    }
}
