//! I(v,t) = (2π)^{−d} ∫ e^{it(v·ξ − ω)} / ω, written as I₁ + I₂ with the
//! plateau cutoff χ(ω) near the origin.
//!
//! For non-integer x = tv the exponential is not periodic; the integral is then
//! taken over ℝ^d against the partition of unity η (which reduces to the torus
//! integral whenever x ∈ ℤ^d).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{eta1, OriginCutoff, ETA_RADIUS};
use crate::dispersion::DispersionRelation;
use crate::numerics::{composite_gauss, gauss_legendre, pairwise_sum_c};

use super::green::{check_budget, torus_weights};
use super::grid::separable_sum_nested;
use super::{refine, refine_nested, QuadError, QuadOptions, QuadratureResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub total: Complex64,
    /// Part inside the cutoff, by polar quadrature.
    pub i1: QuadratureResult,
    /// Smooth remainder, by the tensor trapezoid.
    pub i2: QuadratureResult,
    pub cutoff_radius: f64,
}

fn eta_weights(x: &[f64], n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    let m = (ETA_RADIUS / h).ceil() as usize + 1;
    let xi: Vec<f64> = (0..m).map(|k| k as f64 * h).collect();
    let eta: Vec<f64> = xi.iter().map(|&s| eta1(s)).collect();
    let cvals = xi.iter().map(|s| 2.0 - 2.0 * s.cos()).collect();
    let weights = x
        .iter()
        .map(|&xj| {
            (0..m)
                .map(|k| {
                    let mult = if k == 0 { 1.0 } else { 2.0 };
                    (xj * xi[k]).cos() * mult * eta[k] / n as f64
                })
                .collect()
        })
        .collect();
    (weights, cvals)
}

fn is_integer_vector(x: &[f64]) -> bool {
    x.iter().all(|v| (v - v.round()).abs() <= 1e-12 * v.abs().max(1.0))
}

/// (2π)^{−d} ∫ e^{i(x·ξ − τω)} / ω dξ, split at the cutoff.
pub fn split_integral(
    rel: &DispersionRelation,
    x: &[f64],
    tau: f64,
    cutoff: OriginCutoff,
    opts: &QuadOptions,
) -> Result<SplitResult, QuadError> {
    let d = rel.dim();
    if x.len() != d {
        return Err(QuadError::InvalidInput(format!("x has length {}, expected {d}", x.len())));
    }
    let massless = rel.mass() == 0.0;
    if massless && d < 2 {
        return Err(QuadError::InvalidInput("1/ω is not integrable for d = 1 without mass".into()));
    }
    if !(cutoff.radius > 0.0) {
        return Err(QuadError::InvalidInput("cutoff radius must be positive".into()));
    }
    let m2 = rel.mass() * rel.mass();
    let chi = move |w: f64| if massless { cutoff.eval(w) } else { 0.0 };

    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n0 = opts
        .n_min
        .max(4 * (1.0 + tau.abs()).ceil() as usize)
        .max(2 * xmax.ceil() as usize + 8)
        .div_ceil(4)
        * 4;
    let integer = is_integer_vector(x);
    let kernel = |s: f64| {
        let w = (m2 + s).sqrt();
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((1.0 - chi(w)) / w, -tau * w)
    };
    let i2 = refine_nested(n0, opts, |n| {
        let (w, c) = if integer { torus_weights(x, n) } else { eta_weights(x, n) };
        check_budget(&w, opts)?;
        let (fine, even) = separable_sum_nested(&w, &c, &kernel);
        Ok((fine, even * 2f64.powi(d as i32)))
    })?;

    // I₁ only needs accuracy relative to the total, which I₂ dominates for large τ.
    let i1_opts = QuadOptions { atol: opts.atol.max(0.5 * opts.rtol * i2.value.norm()), ..*opts };
    let i1 = if massless {
        polar_part(rel, x, tau, cutoff, &i1_opts)?
    } else {
        QuadratureResult::exact(Complex64::new(0.0, 0.0))
    };
    Ok(SplitResult { total: i1.value + i2.value, i1, i2, cutoff_radius: cutoff.radius })
}

/// Unit vectors and weights of a product rule on S^{d−1}: Gauss–Legendre in
/// the polar angles (with their sine Jacobians), trapezoid in the azimuth.
fn sphere_rule(d: usize, n: usize) -> Vec<(Vec<f64>, f64)> {
    let n_phi = n.max(8);
    let n_theta = (n / 2).max(4);
    let (gx, gw) = gauss_legendre(n_theta);
    let thetas: Vec<(f64, f64)> = gx.iter().zip(&gw).map(|(x, w)| (0.5 * PI * (x + 1.0), 0.5 * PI * w)).collect();
    let mut out = Vec::new();
    let polar = d - 2;
    let count = n_theta.pow(polar as u32);
    for mut idx in 0..count {
        let mut dir_prefix = Vec::with_capacity(d);
        let mut s = 1.0;
        let mut w = 1.0;
        for level in 0..polar {
            let (th, tw) = thetas[idx % n_theta];
            idx /= n_theta;
            dir_prefix.push(s * th.cos());
            w *= tw * th.sin().powi((d - 2 - level) as i32);
            s *= th.sin();
        }
        for k in 0..n_phi {
            let ph = 2.0 * PI * k as f64 / n_phi as f64;
            let mut u = dir_prefix.clone();
            u.push(s * ph.cos());
            u.push(s * ph.sin());
            out.push((u, w * 2.0 * PI / n_phi as f64));
        }
    }
    out
}

fn polar_part(
    rel: &DispersionRelation,
    x: &[f64],
    tau: f64,
    cutoff: OriginCutoff,
    opts: &QuadOptions,
) -> Result<QuadratureResult, QuadError> {
    let d = rel.dim();
    // ω ≥ (2/π)|ξ| on the torus, so χ(ω) vanishes for |ξ| ≥ π r0 / 2.
    let rho_max = 0.5 * PI * cutoff.radius;
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    // Radial phase varies by at most ρ(|x| + |τ|), angular phase by ρ|x|;
    // 8-point Gauss panels take about 6 radians each.
    let n0 = ((rho_max * (xnorm + tau.abs()) * 8.0 / 6.0).ceil() as usize + 32).div_ceil(8) * 8;
    let ang0 = (1.5 * rho_max * xnorm).ceil() as usize + 16;
    let norm = (2.0 * PI).powi(-(d as i32));
    refine(n0, opts, |n| {
        let n_ang = ang0 * n / n0;
        let n_theta = (n_ang / 2).max(4);
        let cost = n as f64 * n_ang as f64 * (n_theta as f64).powi(d as i32 - 2);
        if cost > opts.budget {
            return Err(QuadError::BudgetExceeded { evaluations: cost, budget: opts.budget });
        }
        let (rs, rw) = composite_gauss(0.0, rho_max, n / 8, 8);
        let dirs = sphere_rule(d, n_ang);
        let parts: Vec<Complex64> = dirs
            .par_iter()
            .map(|(u, aw)| {
                let xu: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
                let mut xi = vec![0.0; d];
                let terms: Vec<Complex64> = rs
                    .iter()
                    .zip(&rw)
                    .map(|(&r, &wr)| {
                        for (slot, ui) in xi.iter_mut().zip(u) {
                            *slot = r * ui;
                        }
                        let w = rel.omega(&xi);
                        let c = cutoff.eval(w);
                        if c == 0.0 || w == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        Complex64::from_polar(c * r.powi(d as i32 - 1) * wr / w, r * xu - tau * w)
                    })
                    .collect();
                pairwise_sum_c(&terms) * *aw
            })
            .collect();
        Ok(pairwise_sum_c(&parts) * norm)
    })
}

/// I(v,t) with x = tv.
pub fn oscint_i(rel: &DispersionRelation, v: &[f64], t: f64, cutoff: OriginCutoff, opts: &QuadOptions) -> Result<SplitResult, QuadError> {
    let x: Vec<f64> = v.iter().map(|a| a * t).collect();
    split_integral(rel, &x, t, cutoff, opts)
}

/// Real-space kernel of 1/D on ℤ^d: (2π)^{−d} ∫ e^{ix·ξ}/ω dξ.
pub fn inv_d_kernel(rel: &DispersionRelation, x: &[i64], cutoff: OriginCutoff, opts: &QuadOptions) -> Result<SplitResult, QuadError> {
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    split_integral(rel, &xf, 0.0, cutoff, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscquad::green_g;

    #[test]
    fn sphere_rule_has_correct_area() {
        for (d, area) in [(2, 2.0 * PI), (3, 4.0 * PI), (4, 2.0 * PI * PI)] {
            let total: f64 = sphere_rule(d, 64).iter().map(|(_, w)| w).sum();
            assert!((total / area - 1.0).abs() < 1e-13, "d={d} {total} {area}");
        }
    }

    #[test]
    fn duality_with_green_function() {
        let r = DispersionRelation::wave(2);
        let o = QuadOptions::with_rtol(1e-8);
        let i = split_integral(&r, &[5.0, 5.0], 10.0, OriginCutoff::default(), &o).unwrap();
        let g = green_g(&r, &[5, 5], 10.0, &o).unwrap().value.re;
        assert!((-i.total.im - g).abs() < 1e-7 * g.abs().max(1e-3), "{} vs {g}", -i.total.im);
    }

    #[test]
    fn cutoff_radius_does_not_change_total() {
        let r = DispersionRelation::wave(3);
        let o = QuadOptions::with_rtol(1e-8);
        let a = oscint_i(&r, &[0.2, 0.1, -0.3], 7.3, OriginCutoff::new(1.0), &o).unwrap();
        let b = oscint_i(&r, &[0.2, 0.1, -0.3], 7.3, OriginCutoff::new(0.6), &o).unwrap();
        assert!((a.total - b.total).norm() < 1e-8, "{} vs {}", a.total, b.total);
    }

    #[test]
    fn even_in_velocity_and_real_at_zero_time() {
        let r = DispersionRelation::wave(2);
        let o = QuadOptions::with_rtol(1e-8);
        let a = oscint_i(&r, &[0.31, -0.17], 9.0, OriginCutoff::default(), &o).unwrap().total;
        let b = oscint_i(&r, &[-0.31, 0.17], 9.0, OriginCutoff::default(), &o).unwrap().total;
        assert!((a - b).norm() < 1e-10);
        let z = oscint_i(&r, &[0.31, -0.17], 0.0, OriginCutoff::default(), &o).unwrap().total;
        assert!(z.im.abs() < 1e-12);
    }
}
