//! Strang splitting for u_tt − Δu + m²u = |u|^{k−1}u with the exact linear flow.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::LatticeField;
use super::linear::{EvolutionState, Propagator};
use super::EvolveError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearOptions {
    /// Power k ≥ 3 of F(s) = |s|^{k−1}s; None runs the linear flow through the same stepper.
    pub k: Option<u32>,
    pub dt: f64,
    pub t_end: f64,
    /// Call the observer every this many steps (and at the final step).
    pub observe_every: usize,
    /// Abort with Blowup once sup |u| exceeds this.
    pub cap: f64,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        NonlinearOptions { k: Some(4), dt: 0.1, t_end: 10.0, observe_every: 1, cap: 1e6 }
    }
}

fn nonlinearity(u: Complex64, k: u32) -> Complex64 {
    u * u.norm().powi(k as i32 - 1)
}

/// One (u, u_t) pair held in Fourier space, advanced exactly by the linear flow.
fn linear_step(p: &Propagator, uh: &mut [Complex64], uth: &mut [Complex64], dt: f64) {
    uh.par_iter_mut().zip(uth.par_iter_mut()).zip(p.omega().par_iter()).for_each(|((a, b), &w)| {
        let (s, c) = (dt * w).sin_cos();
        let sinc = if w == 0.0 { dt } else { s / w };
        let na = *a * c + *b * sinc;
        let nb = -*a * (w * s) + *b * c;
        *a = na;
        *b = nb;
    });
}

/// Integrates from (g, f) at t = 0 to `t_end` with steps of `dt`:
/// half linear step, kick u_t ← u_t + dt·F(u), half linear step.
///
/// `observe(state)` sees the state at t = 0 and after every `observe_every`-th step.
pub fn nonlinear_solve(
    p: &Propagator,
    g: &LatticeField,
    f: &LatticeField,
    opts: &NonlinearOptions,
    mut observe: impl FnMut(&EvolutionState),
) -> Result<EvolutionState, EvolveError> {
    if !(opts.dt > 0.0) || !opts.t_end.is_finite() || opts.t_end < 0.0 {
        return Err(EvolveError::InvalidInput(format!("need dt > 0 and t_end >= 0, got dt={} t_end={}", opts.dt, opts.t_end)));
    }
    if let Some(k) = opts.k {
        if k < 3 {
            return Err(EvolveError::InvalidInput(format!("power k must be >= 3, got {k}")));
        }
    }
    let steps = (opts.t_end / opts.dt).round() as usize;
    if (steps as f64 * opts.dt - opts.t_end).abs() > 1e-9 * opts.t_end.max(1.0) {
        return Err(EvolveError::InvalidInput("t_end must be a multiple of dt".into()));
    }
    let every = opts.observe_every.max(1);
    let mut uh = p.to_fourier(g);
    let mut uth = p.to_fourier(f);
    let snapshot = |uh: &[Complex64], uth: &[Complex64], t: f64| EvolutionState {
        u: p.from_fourier(uh.to_vec()),
        ut: p.from_fourier(uth.to_vec()),
        t,
    };
    observe(&EvolutionState { u: g.clone(), ut: f.clone(), t: 0.0 });
    let half = 0.5 * opts.dt;
    for step in 1..=steps {
        linear_step(p, &mut uh, &mut uth, half);
        if let Some(k) = opts.k {
            let u = p.from_fourier(uh.clone());
            let sup = u.lp_norm(f64::INFINITY);
            if !(sup <= opts.cap) {
                return Err(EvolveError::Blowup { t: (step as f64 - 0.5) * opts.dt, sup });
            }
            let kick = p.to_fourier(&u.map(|z| nonlinearity(z, k)));
            uth.par_iter_mut().zip(kick.par_iter()).for_each(|(b, &fk)| *b += fk * opts.dt);
        }
        linear_step(p, &mut uh, &mut uth, half);
        if step % every == 0 || step == steps {
            observe(&snapshot(&uh, &uth, step as f64 * opts.dt));
        }
    }
    Ok(snapshot(&uh, &uth, steps as f64 * opts.dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionRelation;

    fn bump(d: usize, l: usize, amp: f64) -> LatticeField {
        let mut f = LatticeField::zeros(d, l);
        for i in 0..f.len() {
            let x = f.coords_of(i);
            let r2: f64 = x.iter().map(|&c| (c * c) as f64).sum();
            f.data[i] = Complex64::new(amp * (-r2 / 4.0).exp(), 0.0);
        }
        f
    }

    #[test]
    fn linear_path_matches_exact_flow() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 16);
        let g = bump(2, 16, 0.3);
        let f = bump(2, 16, -0.2);
        let opts = NonlinearOptions { k: None, dt: 0.25, t_end: 5.0, observe_every: 4, cap: 1e6 };
        let mut seen = Vec::new();
        let end = nonlinear_solve(&p, &g, &f, &opts, |s| seen.push(s.t)).unwrap();
        let exact = p.propagate(&g, &f, 5.0).unwrap();
        assert!(end.u.max_abs_diff(&exact.u) < 1e-12);
        assert_eq!(seen, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn second_order_in_dt() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 16);
        let g = bump(2, 16, 1.0);
        let f = LatticeField::zeros(2, 16);
        let run = |dt: f64| {
            let o = NonlinearOptions { k: Some(3), dt, t_end: 2.0, observe_every: 1000, cap: 1e6 };
            nonlinear_solve(&p, &g, &f, &o, |_| {}).unwrap().u
        };
        let reference = run(0.003125);
        let errs: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dt| run(dt).max_abs_diff(&reference)).collect();
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!((rate - 2.0).abs() < 0.1, "rate {rate}, errors {errs:?}");
        }
    }

    #[test]
    fn blowup_and_validation() {
        let rel = DispersionRelation::wave(1);
        let p = Propagator::new(&rel, 8);
        let g = LatticeField::from_real(1, 8, &[5.0; 8]).unwrap();
        let f = LatticeField::zeros(1, 8);
        let o = NonlinearOptions { k: Some(3), dt: 0.1, t_end: 10.0, observe_every: 1, cap: 100.0 };
        assert!(matches!(nonlinear_solve(&p, &g, &f, &o, |_| {}), Err(EvolveError::Blowup { .. })));
        let bad = NonlinearOptions { k: Some(2), ..o.clone() };
        assert!(matches!(nonlinear_solve(&p, &g, &f, &bad, |_| {}), Err(EvolveError::InvalidInput(_))));
    }
}
