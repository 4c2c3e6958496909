//! Stability of decay under small linear perturbations S ↦ S + w·x.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::AmplitudeSpec;
use crate::polynewton::SparsePoly;

use super::{oscint_j, JOptions, QuadError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLevel {
    pub eps: f64,
    /// sup over the perturbations with |w| ≤ eps (and w = 0) of |J(t)|, per t.
    pub envelope: Vec<f64>,
    /// max over t of envelope / unperturbed.
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub t: Vec<f64>,
    pub unperturbed: Vec<f64>,
    pub levels: Vec<ProbeLevel>,
    pub seed: u64,
    pub count: usize,
}

fn unit_ball_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // Box–Muller directions, radius U^{1/n}
            let mut g: Vec<f64> = (0..n)
                .map(|_| {
                    let u1: f64 = 1.0 - rng.gen::<f64>();
                    let u2: f64 = rng.gen();
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                })
                .collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let radius = rng.gen::<f64>().powf(1.0 / n as f64);
            for x in &mut g {
                *x *= radius / norm;
            }
            g
        })
        .collect()
}

fn perturbed(phase: &SparsePoly, w: &[f64]) -> SparsePoly {
    let n = phase.nvars();
    let mut p = phase.clone();
    for (j, &wj) in w.iter().enumerate() {
        let mut e = vec![0; n];
        e[j] = 1;
        p.add_term(e, BigRational::from_float(wj).expect("finite perturbation"));
    }
    p
}

/// Envelopes of |J(t, S + w·x, ψ)| over random w in nested balls.
///
/// The same `count` unit-ball samples u_i are scaled to every level, and the
/// set at level k is {0} ∪ {ε_j u_i : j ≤ k}, so envelopes are monotone in ε.
pub fn perturbation_probe(
    phase: &SparsePoly,
    amp: &AmplitudeSpec,
    eps_levels: &[f64],
    count: usize,
    t_schedule: &[f64],
    seed: u64,
    opts: &JOptions,
) -> Result<ProbeResult, QuadError> {
    if count == 0 || eps_levels.iter().any(|e| !(*e >= 0.0)) {
        return Err(QuadError::InvalidInput("need count >= 1 and eps >= 0".into()));
    }
    let mut levels: Vec<f64> = eps_levels.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let units = unit_ball_samples(phase.nvars(), count, seed);
    let abs_j = |p: &SparsePoly| -> Result<Vec<f64>, QuadError> {
        t_schedule.iter().map(|&t| oscint_j(p, amp, t, opts).map(|r| r.value.norm())).collect()
    };
    let unperturbed = abs_j(phase)?;
    let mut envelope = unperturbed.clone();
    let mut out = Vec::with_capacity(levels.len());
    for &eps in &levels {
        let rows: Vec<Vec<f64>> = units
            .par_iter()
            .map(|u| {
                let w: Vec<f64> = u.iter().map(|x| x * eps).collect();
                abs_j(&perturbed(phase, &w))
            })
            .collect::<Result<_, _>>()?;
        for row in rows {
            for (e, v) in envelope.iter_mut().zip(row) {
                *e = e.max(v);
            }
        }
        let max_ratio = envelope
            .iter()
            .zip(&unperturbed)
            .map(|(e, u)| if *u > 0.0 { e / u } else { f64::INFINITY })
            .fold(1.0f64, f64::max);
        out.push(ProbeLevel { eps, envelope: envelope.clone(), max_ratio });
    }
    Ok(ProbeResult { t: t_schedule.to_vec(), unperturbed, levels: out, seed, count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynewton::parse_poly;

    #[test]
    fn zero_eps_reproduces_unperturbed() {
        let s = parse_poly("x1^2*x2 - x2^3").unwrap();
        let r = perturbation_probe(&s, &AmplitudeSpec::default(), &[0.0], 3, &[5.0, 10.0], 7, &JOptions::default()).unwrap();
        assert_eq!(r.levels[0].envelope, r.unperturbed);
        assert_eq!(r.levels[0].max_ratio, 1.0);
    }

    #[test]
    fn envelope_monotone_in_eps() {
        let s = parse_poly("x1^3").unwrap();
        let r = perturbation_probe(&s, &AmplitudeSpec::default(), &[0.2, 0.05, 0.1], 5, &[5.0, 20.0], 1, &JOptions::default()).unwrap();
        for pair in r.levels.windows(2) {
            assert!(pair[0].eps < pair[1].eps);
            for (a, b) in pair[0].envelope.iter().zip(&pair[1].envelope) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn samples_lie_in_unit_ball() {
        for u in unit_ball_samples(4, 200, 3) {
            assert!(u.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12);
        }
    }
}
