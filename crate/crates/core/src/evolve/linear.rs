//! Exact-in-time linear flow and Fourier multipliers on the periodic box.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::DispersionRelation;
use crate::numerics::pairwise_sum;

use super::field::{FftNd, LatticeField};
use super::EvolveError;

/// u and ∂_t u at time t.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionState {
    pub u: LatticeField,
    pub ut: LatticeField,
    pub t: f64,
}

/// Output of 1/D with the zero-mode diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct InvDResult {
    pub field: LatticeField,
    /// |f̂(0)| when it exceeds 1e-12·‖f‖₁ (the mean mode was discarded).
    pub mean_not_zero: Option<f64>,
}

/// Smallest side for which periodic images cannot reach a pointwise comparison
/// with the ℤ^d solution up to time t.
pub fn min_box_side(t: f64) -> usize {
    (2.0 * (t.abs() + 8.0)).ceil() as usize
}

pub fn require_box(l: usize, t: f64) -> Result<(), EvolveError> {
    let need = min_box_side(t);
    if l < need {
        return Err(EvolveError::BoxTooSmall { side: l, needed: need, t });
    }
    Ok(())
}

/// Multipliers of the lattice (Klein–)Gordon operator on (ℤ/Lℤ)^d.
pub struct Propagator {
    d: usize,
    l: usize,
    mass: f64,
    fft: FftNd,
    /// ω at every wave number 2πk/L, in storage order.
    omega: Vec<f64>,
    /// 2 − 2cos(2πk/L) per axis.
    axis_sym: Vec<f64>,
}

impl Propagator {
    pub fn new(rel: &DispersionRelation, l: usize) -> Self {
        let d = rel.dim();
        let axis_sym: Vec<f64> = (0..l).map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / l as f64).cos()).collect();
        let m2 = rel.mass() * rel.mass();
        let n = l.pow(d as u32);
        let omega = (0..n)
            .into_par_iter()
            .map(|mut idx| {
                let mut s = m2;
                for _ in 0..d {
                    s += axis_sym[idx % l];
                    idx /= l;
                }
                s.sqrt()
            })
            .collect();
        Propagator { d, l, mass: rel.mass(), fft: FftNd::new(d, l), omega, axis_sym }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.l
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    fn check(&self, f: &LatticeField) -> Result<(), EvolveError> {
        if f.dim() != self.d || f.side() != self.l {
            return Err(EvolveError::Shape(format!(
                "field is d={}, L={} but propagator is d={}, L={}",
                f.dim(),
                f.side(),
                self.d,
                self.l
            )));
        }
        Ok(())
    }

    pub fn to_fourier(&self, f: &LatticeField) -> Vec<Complex64> {
        let mut h = f.data.clone();
        self.fft.forward(&mut h);
        h
    }

    pub fn from_fourier(&self, mut h: Vec<Complex64>) -> LatticeField {
        self.fft.inverse(&mut h);
        LatticeField::from_data(self.d, self.l, h).expect("shape preserved")
    }

    /// Applies a real multiplier m(ω) in Fourier space.
    pub fn apply_multiplier(&self, f: &LatticeField, m: impl Fn(f64) -> Complex64 + Sync) -> Result<LatticeField, EvolveError> {
        self.check(f)?;
        let mut h = self.to_fourier(f);
        h.par_iter_mut().zip(self.omega.par_iter()).for_each(|(z, &w)| *z *= m(w));
        Ok(self.from_fourier(h))
    }

    /// Solution of u_tt = Δu − m²u with u(0) = g, u_t(0) = f:
    /// û(t) = cos(tω)ĝ + sin(tω)/ω · f̂, where sin(tω)/ω = t at ω = 0.
    pub fn propagate(&self, g: &LatticeField, f: &LatticeField, t: f64) -> Result<EvolutionState, EvolveError> {
        self.check(g)?;
        self.check(f)?;
        if t == 0.0 {
            return Ok(EvolutionState { u: g.clone(), ut: f.clone(), t });
        }
        let gh = self.to_fourier(g);
        let fh = self.to_fourier(f);
        let (uh, uth): (Vec<Complex64>, Vec<Complex64>) = gh
            .par_iter()
            .zip(fh.par_iter())
            .zip(self.omega.par_iter())
            .map(|((&a, &b), &w)| {
                let (s, c) = (t * w).sin_cos();
                let sinc = if w == 0.0 { t } else { s / w };
                (a * c + b * sinc, -a * (w * s) + b * c)
            })
            .unzip();
        Ok(EvolutionState { u: self.from_fourier(uh), ut: self.from_fourier(uth), t })
    }

    /// Advances a state by dt.
    pub fn advance(&self, s: &EvolutionState, dt: f64) -> Result<EvolutionState, EvolveError> {
        let mut next = self.propagate(&s.u, &s.ut, dt)?;
        next.t = s.t + dt;
        Ok(next)
    }

    /// e^{±itD} f.
    pub fn half_wave(&self, f: &LatticeField, t: f64, sign: f64) -> Result<LatticeField, EvolveError> {
        let s = sign.signum();
        self.apply_multiplier(f, |w| Complex64::from_polar(1.0, s * t * w))
    }

    /// D f.
    pub fn apply_d(&self, f: &LatticeField) -> Result<LatticeField, EvolveError> {
        self.apply_multiplier(f, |w| Complex64::new(w, 0.0))
    }

    /// (1/D) f with the output zero mode set to 0.
    pub fn inv_d(&self, f: &LatticeField) -> Result<InvDResult, EvolveError> {
        self.check(f)?;
        let mut h = self.to_fourier(f);
        let mean = h[0].norm();
        let l1 = f.lp_norm(1.0);
        h.par_iter_mut().zip(self.omega.par_iter()).for_each(|(z, &w)| *z = if w == 0.0 { Complex64::new(0.0, 0.0) } else { *z / w });
        let mean_not_zero = (mean > 1e-12 * l1).then_some(mean);
        Ok(InvDResult { field: self.from_fourier(h), mean_not_zero })
    }

    /// E = ‖u_t‖² + Σ_edges |u(x) − u(y)|² + m²‖u‖², summed in real space.
    pub fn energy(&self, s: &EvolutionState) -> f64 {
        let u = &s.u;
        let l = self.l;
        let n = u.len();
        let d = self.d;
        let per_site: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|idx| {
                let mut e = s.ut.data[idx].norm_sqr() + self.mass * self.mass * u.data[idx].norm_sqr();
                let mut stride = 1;
                for _ in 0..d {
                    let k = (idx / stride) % l;
                    let nb = if k + 1 == l { idx + stride - l * stride } else { idx + stride };
                    e += (u.data[nb] - u.data[idx]).norm_sqr();
                    stride *= l;
                }
                e
            })
            .collect();
        pairwise_sum(&per_site)
    }

    /// Same energy computed from Fourier coefficients (Parseval).
    pub fn energy_fourier(&self, s: &EvolutionState) -> f64 {
        let uh = self.to_fourier(&s.u);
        let uth = self.to_fourier(&s.ut);
        let terms: Vec<f64> = uh.iter().zip(&uth).zip(&self.omega).map(|((a, b), w)| b.norm_sqr() + w * w * a.norm_sqr()).collect();
        pairwise_sum(&terms) / uh.len() as f64
    }

    /// ‖f‖₂ from the Fourier side.
    pub fn l2_fourier(&self, f: &LatticeField) -> f64 {
        let h = self.to_fourier(f);
        let terms: Vec<f64> = h.iter().map(|z| z.norm_sqr()).collect();
        (pairwise_sum(&terms) / h.len() as f64).sqrt()
    }

    /// Symbol 2 − 2cos ξ along one axis, for callers building other multipliers.
    pub fn axis_symbol(&self) -> &[f64] {
        &self.axis_sym
    }
}

/// One-shot linear propagation from (g, f) on a box of side L.
pub fn linear_propagate(rel: &DispersionRelation, g: &LatticeField, f: &LatticeField, t: f64) -> Result<EvolutionState, EvolveError> {
    Propagator::new(rel, g.side()).propagate(g, f, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(d: usize, l: usize, seed: u64, complex: bool) -> LatticeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..l.pow(d as u32)).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), if complex { rng.gen_range(-1.0..1.0) } else { 0.0 })).collect();
        LatticeField::from_data(d, l, data).unwrap()
    }

    #[test]
    fn zero_time_is_identity_and_semigroup_holds() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 16);
        let g = random_field(2, 16, 1, false);
        let f = random_field(2, 16, 2, false);
        let s0 = p.propagate(&g, &f, 0.0).unwrap();
        assert_eq!(s0.u, g);
        let a = p.advance(&p.propagate(&g, &f, 1.3).unwrap(), 2.1).unwrap();
        let b = p.propagate(&g, &f, 3.4).unwrap();
        assert!(a.u.max_abs_diff(&b.u) < 1e-12);
        assert!(a.ut.max_abs_diff(&b.ut) < 1e-12);
        assert!((a.t - 3.4).abs() < 1e-15);
    }

    #[test]
    fn energy_is_conserved_and_matches_fourier_side() {
        let rel = DispersionRelation::new(3, 0.5).unwrap();
        let p = Propagator::new(&rel, 10);
        let s = p.propagate(&random_field(3, 10, 3, false), &random_field(3, 10, 4, false), 0.0).unwrap();
        let e0 = p.energy(&s);
        assert!((e0 - p.energy_fourier(&s)).abs() < 1e-10 * e0);
        for t in [1.0, 17.5, 100.0] {
            let e = p.energy(&p.propagate(&s.u, &s.ut, t).unwrap());
            assert!((e - e0).abs() < 1e-10 * e0, "t={t}");
        }
    }

    #[test]
    fn half_wave_unitary_group() {
        let rel = DispersionRelation::wave(3);
        let p = Propagator::new(&rel, 8);
        let f = random_field(3, 8, 5, true);
        let n0 = f.lp_norm(2.0);
        let a = p.half_wave(&f, 2.5, 1.0).unwrap();
        assert!((a.lp_norm(2.0) - n0).abs() < 1e-12 * n0);
        let ab = p.half_wave(&a, -0.7, 1.0).unwrap();
        let c = p.half_wave(&f, 1.8, 1.0).unwrap();
        assert!(ab.max_abs_diff(&c) < 1e-12);
        assert!(p.half_wave(&f, 0.0, -1.0).unwrap().max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn inv_d_inverts_off_the_mean() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 12);
        let f = random_field(2, 12, 6, false);
        let r = p.inv_d(&f).unwrap();
        assert!(r.mean_not_zero.is_some());
        let back = p.apply_d(&r.field).unwrap();
        let mean = f.data.iter().sum::<Complex64>() / f.len() as f64;
        let expected = f.map(|z| z - mean);
        assert!(back.max_abs_diff(&expected) < 1e-12);
        let zero_mean = expected.clone();
        assert!(p.inv_d(&zero_mean).unwrap().mean_not_zero.is_none());
    }

    #[test]
    fn parseval_and_box_guard() {
        let rel = DispersionRelation::wave(2);
        let p = Propagator::new(&rel, 12);
        let f = random_field(2, 12, 7, true);
        assert!((p.l2_fourier(&f) - f.lp_norm(2.0)).abs() < 1e-12);
        assert!(require_box(56, 20.0).is_ok());
        assert!(matches!(require_box(40, 20.0), Err(EvolveError::BoxTooSmall { .. })));
    }

    #[test]
    fn light_cone_and_one_dim_bessel() {
        // d = 1, f = δ0: u(x,t) = ∫_0^t J_{2x}(2s) ds; check u_t = J_{2x}(2t)
        let rel = DispersionRelation::wave(1);
        let p = Propagator::new(&rel, 128);
        let s = p.propagate(&LatticeField::zeros(1, 128), &LatticeField::delta(1, 128), 10.0).unwrap();
        let j0 = 0.167_024_664_340_583_2; // J_0(20)
        assert!((s.ut.get(&[0]).re - j0).abs() < 1e-12);
        for x in 40..64 {
            assert!(s.u.get(&[x]).norm() < 1e-8);
        }
    }
}
