//! Mixed space-time norms and the lᵖ → l^q and Strichartz experiments.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::pairwise_sum;

use super::field::{lp_norm_of, LatticeField};
use super::linear::Propagator;
use super::EvolveError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedNormReport {
    pub q: f64,
    pub r: f64,
    pub times: Vec<f64>,
    pub lr: Vec<f64>,
    /// ‖u‖_{L^q_t l^r} over [times₀, times_last].
    pub value: f64,
}

/// L^q in time (trapezoid on the given grid, sup for q = ∞) of per-snapshot values.
pub fn time_norm(times: &[f64], values: &[f64], q: f64) -> f64 {
    assert_eq!(times.len(), values.len());
    if q.is_infinite() {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    if times.len() < 2 {
        return 0.0;
    }
    let pieces: Vec<f64> = times.windows(2).zip(values.windows(2)).map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q))).collect();
    pairwise_sum(&pieces).powf(1.0 / q)
}

/// L^q_t l^r of a sampled trajectory.
pub fn mixed_norm(trajectory: &[(f64, LatticeField)], q: f64, r: f64) -> MixedNormReport {
    let times: Vec<f64> = trajectory.iter().map(|(t, _)| *t).collect();
    let lr: Vec<f64> = trajectory.iter().map(|(_, u)| u.lp_norm(r)).collect();
    let value = time_norm(&times, &lr, q);
    MixedNormReport { q, r, times, lr, value }
}

/// Decay exponent paired with (p, q) for d = 4, and whether a log(2+t) factor
/// accompanies it.
///
/// On the dual line 1/p + 1/q = 1 (1 ≤ p ≤ 2) and on the segment joining
/// (1/p, 1/q) = (3/4, 1/2) and (1, 0) the rate is ζ_q = (3/2)(1 − 2/q); where
/// 1/p − 1/q ≥ 1/2 it is 3(1/p − 1/q − 1/2). Nominal exponents, without the
/// ε-loss. The log factor is attached only at (1, ∞).
pub fn lplq_target(p: f64, q: f64) -> Result<(f64, bool), EvolveError> {
    if !(p >= 1.0 && q >= p) {
        return Err(EvolveError::InvalidInput(format!("need 1 <= p <= q, got p={p}, q={q}")));
    }
    let (ip, iq) = (1.0 / p, 1.0 / q);
    let zeta = 1.5 * (1.0 - 2.0 * iq);
    let on_dual = (ip + iq - 1.0).abs() < 1e-12 && p <= 2.0;
    let on_segment = (iq - (2.0 - 2.0 * ip)).abs() < 1e-12 && (0.75..=1.0).contains(&ip);
    let log = p == 1.0 && q.is_infinite();
    if on_dual || on_segment {
        return Ok((zeta, log));
    }
    if ip - iq >= 0.5 {
        return Ok((3.0 * (ip - iq - 0.5), log));
    }
    Err(EvolveError::InvalidInput(format!("(p, q) = ({p}, {q}) is outside the covered range")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LplqRow {
    pub t: f64,
    pub norm_q: f64,
    /// ‖u(t)‖_q (1+t)^target [/ log(2+t)] / ‖f‖_p.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LplqTable {
    pub p: f64,
    pub q: f64,
    pub target: f64,
    pub log_factor: bool,
    pub f_norm_p: f64,
    pub rows: Vec<LplqRow>,
    /// The normalized column over the later half of the times never exceeds
    /// twice its maximum over the earlier half.
    pub bounded: bool,
    /// Norms are of the periodic box solution, not of the ℤ^d solution.
    pub label: String,
}

pub(crate) fn bounded_column(values: &[f64]) -> bool {
    let mid = values.len() / 2;
    if mid == 0 {
        return true;
    }
    let early = values[..mid].iter().cloned().fold(0.0, f64::max);
    let late = values[mid..].iter().cloned().fold(0.0, f64::max);
    late <= 2.0 * early
}

/// Norms of u(t) = (sin tD / D) f for several q from one set of snapshots.
pub fn lplq_experiment(p_op: &Propagator, f: &LatticeField, pairs: &[(f64, f64)], times: &[f64]) -> Result<Vec<LplqTable>, EvolveError> {
    let targets: Vec<(f64, bool)> = pairs.iter().map(|&(p, q)| lplq_target(p, q)).collect::<Result<_, _>>()?;
    let fh = p_op.to_fourier(f);
    let mut norms = vec![Vec::with_capacity(times.len()); pairs.len()];
    for &t in times {
        let h: Vec<Complex64> = fh.par_iter().zip(p_op.omega().par_iter()).map(|(&z, &w)| z * if w == 0.0 { t } else { (t * w).sin() / w }).collect();
        let u = p_op.from_fourier(h);
        for (k, &(_, q)) in pairs.iter().enumerate() {
            norms[k].push(u.lp_norm(q));
        }
    }
    Ok(pairs
        .iter()
        .zip(targets)
        .zip(norms)
        .map(|((&(p, q), (target, log_factor)), ns)| {
            let f_norm_p = f.lp_norm(p);
            let rows: Vec<LplqRow> = times
                .iter()
                .zip(&ns)
                .map(|(&t, &n)| {
                    let mut v = n * (1.0 + t).powf(target) / f_norm_p;
                    if log_factor {
                        v /= (2.0 + t).ln();
                    }
                    LplqRow { t, norm_q: n, normalized: v }
                })
                .collect();
            let bounded = bounded_column(&rows.iter().map(|r| r.normalized).collect::<Vec<_>>());
            LplqTable { p, q, target, log_factor, f_norm_p, rows, bounded, label: "periodic surrogate".into() }
        })
        .collect())
}

/// ‖u‖_{L^q_t l^r}/‖f‖_{4/3} for u = (sin tD / D) f on the given time grid.
pub fn strichartz_ratio(p_op: &Propagator, f: &LatticeField, q: f64, r: f64, times: &[f64]) -> f64 {
    let fh = p_op.to_fourier(f);
    let lr: Vec<f64> = times
        .iter()
        .map(|&t| {
            let h: Vec<Complex64> = fh.iter().zip(p_op.omega()).map(|(&z, &w)| z * if w == 0.0 { t } else { (t * w).sin() / w }).collect();
            let u = p_op.from_fourier(h);
            lp_norm_of(u.data.iter().map(|z| z.norm()), r)
        })
        .collect();
    time_norm(times, &lr, q) / f.lp_norm(4.0 / 3.0)
}

/// Random real data supported in the cube [0, support)^d with entries in [−1, 1].
pub fn random_small_support(d: usize, l: usize, support: usize, rng: &mut ChaCha8Rng) -> LatticeField {
    let mut f = LatticeField::zeros(d, l);
    let n = support.pow(d as u32);
    for i in 0..n {
        let mut rest = i;
        let x: Vec<i64> = (0..d)
            .map(|_| {
                let c = (rest % support) as i64;
                rest /= support;
                c
            })
            .collect();
        f.set(&x, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    }
    f
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrichartzSample {
    pub q: f64,
    pub r: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub seed: u64,
}

pub fn strichartz_sample(p_op: &Propagator, q: f64, r: f64, times: &[f64], count: usize, support: usize, seed: u64) -> StrichartzSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<LatticeField> = (0..count).map(|_| random_small_support(p_op.dim(), p_op.side(), support, &mut rng)).collect();
    let ratios: Vec<f64> = fields.iter().map(|f| strichartz_ratio(p_op, f, q, r, times)).collect();
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    StrichartzSample { q, r, ratios, max_ratio, min_ratio, seed }
}

pub fn write_lplq_csv(w: &mut impl Write, table: &LplqTable, d: usize, l: usize) -> io::Result<()> {
    writeln!(w, "# latticewave v1, lplq, d={d}, L={l}, p={}, q={}, target={}, log={}, {}", table.p, table.q, table.target, table.log_factor, table.label)?;
    writeln!(w, "t,norm_q,normalized")?;
    for r in &table.rows {
        writeln!(w, "{},{:.17e},{:.17e}", r.t, r.norm_q, r.normalized)?;
    }
    Ok(())
}

pub fn write_mixed_csv(w: &mut impl Write, rep: &MixedNormReport, tag: &str) -> io::Result<()> {
    writeln!(w, "# latticewave v1, {tag}, q={}, r={}, value={:.17e}", rep.q, rep.r, rep.value)?;
    writeln!(w, "t,lr")?;
    for (t, v) in rep.times.iter().zip(&rep.lr) {
        writeln!(w, "{t},{v:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::DispersionRelation;

    #[test]
    fn constant_in_time_mixed_norm() {
        let f = LatticeField::from_real(1, 4, &[1.0, 2.0, 0.0, -2.0]).unwrap();
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let traj: Vec<(f64, LatticeField)> = times.iter().map(|&t| (t, f.clone())).collect();
        let rep = mixed_norm(&traj, 4.0, 2.0);
        assert!((rep.value - 3.0f64.powf(0.25) * 3.0).abs() < 1e-12);
        assert_eq!(mixed_norm(&traj, f64::INFINITY, f64::INFINITY).value, 2.0);
        assert!(rep.lr.iter().all(|&v| v >= f.lp_norm(4.0)));
    }

    #[test]
    fn targets() {
        assert_eq!(lplq_target(1.0, f64::INFINITY).unwrap(), (1.5, true));
        assert_eq!(lplq_target(2.0, 2.0).unwrap(), (0.0, false));
        assert!((lplq_target(4.0 / 3.0, 4.0).unwrap().0 - 0.75).abs() < 1e-12);
        assert!((lplq_target(4.0 / 3.0, 2.0).unwrap().0 - 0.0).abs() < 1e-12);
        assert!((lplq_target(1.0, 4.0).unwrap().0 - 0.75).abs() < 1e-12);
        assert!(lplq_target(3.0, 2.0).is_err());
    }

    #[test]
    fn bounded_flag() {
        assert!(bounded_column(&[1.0, 3.0, 2.0, 2.5, 1.0, 5.9]));
        assert!(!bounded_column(&[1.0, 1.0, 1.0, 1.0, 3.0]));
    }

    #[test]
    fn plancherel_column_is_bounded() {
        let rel = DispersionRelation::wave(3);
        let p = Propagator::new(&rel, 24);
        let f = LatticeField::delta(3, 24);
        let times: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let tabs = lplq_experiment(&p, &f, &[(2.0, 2.0), (1.0, f64::INFINITY)], &times).unwrap();
        assert!(tabs[0].bounded);
        // ‖u‖₂ ≤ sup |sin tω/ω| ≤ t
        assert!(tabs[0].rows.iter().all(|r| r.norm_q <= r.t + 1e-12));
        assert!(tabs[1].rows[0].norm_q > 0.0);
    }

    #[test]
    fn strichartz_ratio_scales_out() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_small_support(2, 16, 3, &mut rng);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let a = strichartz_ratio(&p, &f, 4.0, 4.0, &times);
        let b = strichartz_ratio(&p, &f.map(|z| z * 7.0), 4.0, 4.0, &times);
        assert!((a - b).abs() < 1e-12 * a);
        let s = strichartz_sample(&p, 4.0, 4.0, &times, 5, 3, 9);
        assert_eq!(s.ratios.len(), 5);
        assert!(s.min_ratio > 0.0 && s.max_ratio.is_finite());
    }
}
