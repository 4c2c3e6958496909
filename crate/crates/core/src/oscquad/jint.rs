//! J(t, S, ψ) = ∫ e^{itS(x)} ψ(x) dx for a real polynomial phase S.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{bump_mass, profile, AmplitudeSpec, BumpTransform};
use crate::numerics::pairwise_sum_c;
use crate::polynewton::SparsePoly;

use super::{refine_nested, QuadError, QuadOptions, QuadratureResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JOptions {
    pub quad: QuadOptions,
    /// Grid points per unit of phase variation.
    pub c_osc: f64,
    /// Factor variable-disjoint blocks of a separable integrand.
    pub split_blocks: bool,
    /// Integrate out one linearly occurring variable with the tabulated transform.
    pub collapse_linear: bool,
}

impl Default for JOptions {
    fn default() -> Self {
        JOptions {
            quad: QuadOptions { rtol: 1e-9, atol: 1e-15, ..QuadOptions::default() },
            c_osc: 4.0,
            split_blocks: true,
            collapse_linear: true,
        }
    }
}

type Terms = Vec<(Vec<u32>, f64)>;

const MAX_GRID_VARS: usize = 4;

fn transform_for(radius: f64, kmax: f64) -> Arc<BumpTransform> {
    static CACHE: OnceLock<Mutex<Vec<Arc<BumpTransform>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("transform cache poisoned");
    if let Some(t) = guard.iter().find(|t| t.radius() == radius && t.kmax() >= kmax) {
        return t.clone();
    }
    let k = kmax.max(64.0).log2().ceil().exp2();
    let t = Arc::new(BumpTransform::new(radius, k));
    guard.push(t.clone());
    t
}

/// Coefficient bound on sup |∇S| over the box [−R, R]^n.
fn gradient_bound(terms: &Terms, nv: usize, r: f64) -> f64 {
    (0..nv)
        .map(|j| {
            terms
                .iter()
                .filter(|(e, _)| e[j] > 0)
                .map(|(e, c)| {
                    let deg: u32 = e.iter().sum();
                    c.abs() * e[j] as f64 * r.powi(deg as i32 - 1)
                })
                .sum::<f64>()
                .powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn sup_bound(terms: &Terms, r: f64) -> f64 {
    terms.iter().map(|(e, c)| c.abs() * r.powi(e.iter().sum::<u32>() as i32)).sum()
}

/// Groups variables into connected components of the "appear in a common term" relation.
fn blocks(terms: &Terms, nv: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for (e, _) in terms {
        let vars: Vec<usize> = (0..nv).filter(|&j| e[j] > 0).collect();
        for w in vars.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..nv {
        if !terms.iter().any(|(e, _)| e[j] > 0) {
            continue;
        }
        let r = find(&mut parent, j);
        match groups.iter_mut().find(|g| find(&mut parent, g[0]) == r) {
            Some(g) => g.push(j),
            None => groups.push(vec![j]),
        }
    }
    groups
}

fn restrict(terms: &Terms, vars: &[usize]) -> Terms {
    terms
        .iter()
        .filter(|(e, _)| vars.iter().any(|&j| e[j] > 0))
        .map(|(e, c)| (vars.iter().map(|&j| e[j]).collect(), *c))
        .collect()
}

/// ∫ e^{itS(x)} ψ(x) dx.
pub fn oscint_j(phase: &SparsePoly, amp: &AmplitudeSpec, t: f64, opts: &JOptions) -> Result<QuadratureResult, QuadError> {
    let nv = phase.nvars();
    let r = amp.radius();
    if !(r > 0.0) || !t.is_finite() {
        return Err(QuadError::InvalidInput("amplitude radius must be positive and t finite".into()));
    }
    let all = phase.to_f64_terms();
    let c0: f64 = all.iter().filter(|(e, _)| e.iter().all(|&k| k == 0)).map(|(_, c)| c).sum();
    let terms: Terms = all.into_iter().filter(|(e, _)| e.iter().any(|&k| k > 0)).collect();
    let prefactor = Complex64::from_polar(1.0, t * c0);

    if !amp.is_separable() || !opts.split_blocks {
        if nv > MAX_GRID_VARS {
            return Err(QuadError::InvalidInput(format!("at most {MAX_GRID_VARS} variables on a grid, got {nv}")));
        }
        let mut res = block_integral(&terms, nv, amp, t, opts)?;
        res.value *= prefactor;
        for h in &mut res.history {
            h.1 *= prefactor;
        }
        return Ok(res);
    }

    let groups = blocks(&terms, nv);
    let used: usize = groups.iter().map(|g| g.len()).sum();
    let mut value = prefactor * bump_mass(r).powi((nv - used) as i32);
    let mut n = 0;
    let mut converged = true;
    let mut rel_change: f64 = 0.0;
    let mut single_history = None;
    for g in &groups {
        let sub = restrict(&terms, g);
        let res = block_integral(&sub, g.len(), amp, t, opts)?;
        value *= res.value;
        n = n.max(res.n);
        converged &= res.converged;
        rel_change = rel_change.max(res.rel_change);
        single_history = Some(res.history);
    }
    let history = if groups.len() == 1 {
        let scale = value / single_history.as_ref().and_then(|h| h.last()).map_or(Complex64::new(1.0, 0.0), |h| h.1);
        single_history.unwrap().into_iter().map(|(k, v)| (k, v * scale)).collect()
    } else {
        vec![(n, value)]
    };
    Ok(QuadratureResult { value, n, history, converged, rel_change })
}

fn block_integral(terms: &Terms, nv: usize, amp: &AmplitudeSpec, t: f64, opts: &JOptions) -> Result<QuadratureResult, QuadError> {
    let r = amp.radius();
    let linear = if amp.is_separable() && opts.collapse_linear {
        (0..nv).find(|&j| terms.iter().all(|(e, _)| e[j] <= 1) && terms.iter().any(|(e, _)| e[j] == 1))
    } else {
        None
    };
    match linear {
        Some(j) => {
            let rest: Vec<usize> = (0..nv).filter(|&i| i != j).collect();
            let a: Terms = terms.iter().filter(|(e, _)| e[j] == 0).map(|(e, c)| (rest.iter().map(|&i| e[i]).collect(), *c)).collect();
            let b: Terms = terms.iter().filter(|(e, _)| e[j] == 1).map(|(e, c)| (rest.iter().map(|&i| e[i]).collect(), *c)).collect();
            let table = transform_for(r, t.abs() * sup_bound(&b, r) + 1.0);
            if rest.is_empty() {
                let k = t * b.iter().map(|(_, c)| c).sum::<f64>();
                return Ok(QuadratureResult::exact(Complex64::new(table.eval(k), 0.0)));
            }
            if rest.len() > MAX_GRID_VARS {
                return Err(QuadError::InvalidInput(format!("block has {} grid variables", rest.len())));
            }
            // ψ̂(tB(y)) varies on the scale 1/(R·t·|∇B|).
            let l = gradient_bound(&a, rest.len(), r) + r * gradient_bound(&b, rest.len(), r);
            tensor_trapezoid(rest.len(), r, t, l, opts, amp, &|y, pw| {
                let pa = eval_terms(&a, pw, y);
                let pb = eval_terms(&b, pw, y);
                Complex64::from_polar(table.eval(t * pb), t * pa)
            })
        }
        None => {
            if nv > MAX_GRID_VARS {
                return Err(QuadError::InvalidInput(format!("block has {nv} grid variables")));
            }
            let l = gradient_bound(terms, nv, r);
            tensor_trapezoid(nv, r, t, l, opts, amp, &|y, pw| Complex64::from_polar(1.0, t * eval_terms(terms, pw, y)))
        }
    }
}

/// Evaluates a term list from the per-axis power tables at grid index tuple `y`.
fn eval_terms(terms: &Terms, pw: &[Vec<Vec<f64>>], y: &[usize]) -> f64 {
    terms
        .iter()
        .map(|(e, c)| {
            let mut v = *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    v *= pw[j][y[j]][k as usize];
                }
            }
            v
        })
        .sum()
}

fn tensor_trapezoid(
    nv: usize,
    r: f64,
    t: f64,
    lip: f64,
    opts: &JOptions,
    amp: &AmplitudeSpec,
    integrand: &(dyn Fn(&[usize], &[Vec<Vec<f64>>]) -> Complex64 + Sync),
) -> Result<QuadratureResult, QuadError> {
    let n0 = opts.quad.n_min.max((opts.c_osc * (1.0 + t.abs() * lip).ceil()) as usize).div_ceil(2) * 2;
    refine_nested(n0, &opts.quad, |n| {
        let inner = n - 1; // endpoints carry zero amplitude
        let evals = (inner as f64).powi(nv as i32);
        if evals > opts.quad.budget {
            return Err(QuadError::BudgetExceeded { evaluations: evals, budget: opts.quad.budget });
        }
        let h = 2.0 * r / n as f64;
        let nodes: Vec<f64> = (1..n).map(|i| -r + i as f64 * h).collect();
        let maxdeg = 12;
        let pw_axis: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&x| {
                let mut p = vec![1.0; maxdeg + 1];
                for k in 1..=maxdeg {
                    p[k] = p[k - 1] * x;
                }
                p
            })
            .collect();
        let pw: Vec<Vec<Vec<f64>>> = vec![pw_axis; nv];
        let psi: Vec<f64> = nodes.iter().map(|&x| profile(x / r)).collect();
        let separable = amp.is_separable();
        let rest = inner.pow(nv as u32 - 1);
        // node index i corresponds to grid point i + 1; the half grid is odd i
        let parts: Vec<(Complex64, Complex64)> = (0..inner)
            .into_par_iter()
            .map(|i0| {
                let mut y = vec![0usize; nv];
                y[0] = i0;
                let mut acc = Vec::with_capacity(rest);
                let mut acc_half = Vec::new();
                for mut idx in 0..rest {
                    for slot in y.iter_mut().skip(1) {
                        *slot = idx % inner;
                        idx /= inner;
                    }
                    let a = if separable {
                        y.iter().map(|&i| psi[i]).product::<f64>()
                    } else {
                        let rr = y.iter().map(|&i| nodes[i] * nodes[i]).sum::<f64>().sqrt();
                        profile(rr / r)
                    };
                    if a == 0.0 {
                        continue;
                    }
                    let v = integrand(&y, &pw) * a;
                    acc.push(v);
                    if y.iter().all(|&i| i % 2 == 1) {
                        acc_half.push(v);
                    }
                }
                (pairwise_sum_c(&acc), pairwise_sum_c(&acc_half))
            })
            .collect();
        let fine: Vec<Complex64> = parts.iter().map(|p| p.0).collect();
        let half: Vec<Complex64> = parts.iter().map(|p| p.1).collect();
        let hn = h.powi(nv as i32);
        Ok((pairwise_sum_c(&fine) * hn, pairwise_sum_c(&half) * hn * 2f64.powi(nv as i32)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynewton::parse_poly;

    #[test]
    fn zero_time_gives_mass() {
        let s = parse_poly("x1^2*x2 - x2^3").unwrap();
        let a = AmplitudeSpec::default();
        let j = oscint_j(&s, &a, 0.0, &JOptions::default()).unwrap();
        assert!((j.value.re - bump_mass(1.0).powi(2)).abs() < 1e-10);
    }

    #[test]
    fn fresnel_leading_term() {
        let s = parse_poly("x1^2").unwrap();
        let a = AmplitudeSpec::default();
        let t = 400.0;
        let j = oscint_j(&s, &a, t, &JOptions::default()).unwrap().value;
        let lead = (std::f64::consts::PI / t).sqrt();
        assert!((j.norm() / lead - 1.0).abs() < 0.01, "{}", j.norm() / lead);
    }

    #[test]
    fn conjugation_symmetry_is_exact() {
        let s = parse_poly("x1*x2*x3 + 1/3*x1^2 - x2").unwrap();
        let a = AmplitudeSpec::default();
        let o = JOptions::default();
        let p = oscint_j(&s, &a, 13.5, &o).unwrap().value;
        let m = oscint_j(&s, &a, -13.5, &o).unwrap().value;
        assert!((p - m.conj()).norm() < 1e-12);
    }

    #[test]
    fn collapse_and_split_agree_with_plain_grid() {
        let s = parse_poly("x1*x2 + x3^2").unwrap();
        let a = AmplitudeSpec::default();
        let fast = oscint_j(&s, &a, 9.0, &JOptions::default()).unwrap().value;
        let plain = JOptions { split_blocks: false, collapse_linear: false, ..JOptions::default() };
        let slow = oscint_j(&s, &a, 9.0, &plain).unwrap().value;
        assert!((fast - slow).norm() < 1e-8, "{fast} vs {slow}");
    }

    #[test]
    fn radial_amplitude() {
        let s = parse_poly("x1^2 + x2^2").unwrap();
        let a = AmplitudeSpec::Radial { radius: 1.0 };
        let j = oscint_j(&s, &a, 0.0, &JOptions::default()).unwrap().value;
        // ∫ ψ(|x|) over the unit disk, by a 1-D radial oracle
        let (x, w) = crate::numerics::composite_gauss(0.0, 1.0, 64, 16);
        let oracle: f64 = 2.0 * std::f64::consts::PI * x.iter().zip(&w).map(|(r, w)| w * r * profile(*r)).sum::<f64>();
        assert!((j.re - oracle).abs() < 1e-8);
    }
}
