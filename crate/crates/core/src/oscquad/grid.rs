//! Tensor trapezoid sums.
//!
//! The integrands of G, I and the 1/D kernel have the form
//! Π_j w_j(ξ_j) · K(Σ_j c(ξ_j)), a separable weight times a kernel of the
//! radial-like variable s = Σ(2 − 2cos ξ_j). After folding ±ξ_j the sum runs
//! over indices 0..M per axis, and axes carrying identical weight vectors are
//! summed over non-decreasing index tuples with multinomial multiplicities.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::numerics::{factorial, pairwise_sum_c, par_sum_c};

use super::QuadError;

/// (2π)^d times the mean of `f` over the uniform N^d grid on [−π, π)^d.
pub fn quad_torus<F>(f: F, d: usize, n: usize, budget: f64) -> Result<Complex64, QuadError>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    if n < 4 || d == 0 {
        return Err(QuadError::InvalidInput(format!("quad_torus needs N >= 4 and d >= 1 (N={n}, d={d})")));
    }
    let evals = (n as f64).powi(d as i32);
    if evals > budget {
        return Err(QuadError::BudgetExceeded { evaluations: evals, budget });
    }
    let h = 2.0 * PI / n as f64;
    let inner = n.pow(d as u32 - 1);
    let total = par_sum_c(n, |i0| {
        let mut xi = vec![0.0; d];
        xi[0] = -PI + i0 as f64 * h;
        let mut acc = Vec::with_capacity(inner);
        for mut rest in 0..inner {
            for slot in xi.iter_mut().skip(1) {
                *slot = -PI + (rest % n) as f64 * h;
                rest /= n;
            }
            acc.push(f(&xi));
        }
        pairwise_sum_c(&acc)
    });
    Ok(total * (2.0 * PI).powi(d as i32) / evals)
}

/// Number of kernel evaluations `separable_sum` performs.
pub fn separable_cost(weights: &[Vec<f64>]) -> f64 {
    let m = weights.first().map_or(0, |w| w.len()) as f64;
    group_sizes(weights)
        .iter()
        .map(|&g| {
            // multisets of size g from m items
            (0..g).map(|i| (m + i as f64) / (i as f64 + 1.0)).product::<f64>()
        })
        .product()
}

fn grouping(weights: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (j, w) in weights.iter().enumerate() {
        match groups.iter_mut().find(|g| weights[g[0]] == *w) {
            Some(g) => g.push(j),
            None => groups.push(vec![j]),
        }
    }
    groups
}

fn group_sizes(weights: &[Vec<f64>]) -> Vec<usize> {
    grouping(weights).iter().map(|g| g.len()).collect()
}

struct Plan<'a> {
    weights: Vec<&'a [f64]>,
    /// true when this level opens a new group
    opens: Vec<bool>,
    /// g! for the group opened at this level
    group_factor: Vec<f64>,
    cvals: &'a [f64],
}

/// Σ over folded indices of Π_j weights[j][k_j] · kernel(Σ_j cvals[k_j]).
///
/// All weight vectors and `cvals` share the same length M. The outer index is
/// distributed over the rayon pool; the reduction order is fixed.
pub fn separable_sum<K>(weights: &[Vec<f64>], cvals: &[f64], kernel: &K) -> Complex64
where
    K: Fn(f64) -> Complex64 + Sync,
{
    separable_sum_nested(weights, cvals, kernel).0
}

/// Like [`separable_sum`], also returning the partial sum over tuples whose
/// indices are all even. On a uniform grid that subset is the grid of half the
/// resolution, so one pass yields the values at N and N/2.
pub fn separable_sum_nested<K>(weights: &[Vec<f64>], cvals: &[f64], kernel: &K) -> (Complex64, Complex64)
where
    K: Fn(f64) -> Complex64 + Sync,
{
    let d = weights.len();
    assert!(d >= 1);
    assert!(weights.iter().all(|w| w.len() == cvals.len()));
    let groups = grouping(weights);
    let mut plan = Plan { weights: Vec::new(), opens: Vec::new(), group_factor: Vec::new(), cvals };
    for g in &groups {
        for (pos, &j) in g.iter().enumerate() {
            plan.weights.push(&weights[j]);
            plan.opens.push(pos == 0);
            plan.group_factor.push(if pos == 0 { factorial(g.len()) } else { 1.0 });
        }
    }
    let m = cvals.len();
    let zero = Complex64::new(0.0, 0.0);
    let parts: Vec<(Complex64, Complex64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let w = plan.weights[0][k] * plan.group_factor[0];
            if w == 0.0 {
                return (zero, zero);
            }
            if d == 1 {
                let v = kernel(cvals[k]) * w;
                return (v, if k % 2 == 0 { v } else { zero });
            }
            recurse(&plan, kernel, 1, k, 1, cvals[k], w, k % 2 == 0)
        })
        .collect();
    let fine: Vec<Complex64> = parts.iter().map(|p| p.0).collect();
    let even: Vec<Complex64> = parts.iter().map(|p| p.1).collect();
    (pairwise_sum_c(&fine), pairwise_sum_c(&even))
}

#[allow(clippy::too_many_arguments)]
fn recurse<K>(plan: &Plan, kernel: &K, level: usize, prev: usize, run: usize, s: f64, w: f64, even: bool) -> (Complex64, Complex64)
where
    K: Fn(f64) -> Complex64 + Sync,
{
    let wv = plan.weights[level];
    let opens = plan.opens[level];
    let lo = if opens { 0 } else { prev };
    let base = w * plan.group_factor[level];
    let last = level + 1 == plan.weights.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut acc_even = Complex64::new(0.0, 0.0);
    for k in lo..wv.len() {
        if wv[k] == 0.0 {
            continue;
        }
        let r = if !opens && k == prev { run + 1 } else { 1 };
        let wk = base * wv[k] / r as f64;
        let sk = s + plan.cvals[k];
        let ev = even && k % 2 == 0;
        if last {
            let v = kernel(sk) * wk;
            acc += v;
            if ev {
                acc_even += v;
            }
        } else {
            let (a, b) = recurse(plan, kernel, level + 1, k, r, sk, wk, ev);
            acc += a;
            acc_even += b;
        }
    }
    (acc, acc_even)
}

/// Fold multiplicities for the symmetric N-point grid: 1 at k ∈ {0, N/2}, else 2.
pub fn fold_multiplicity(k: usize, n: usize) -> f64 {
    if k == 0 || 2 * k == n {
        1.0
    } else {
        2.0
    }
}
