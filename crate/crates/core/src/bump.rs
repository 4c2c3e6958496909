//! Smooth compactly supported cutoffs built from the exponential bump
//! `exp(1 - 1/(1 - r²))` and the amplitude descriptions used by the integrators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::composite_gauss;

/// The standard bump, normalized to 1 at the origin and supported in |r| < 1.
pub fn profile(r: f64) -> f64 {
    let r2 = r * r;
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

fn edge(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C^∞ step: 0 for x ≤ 0, 1 for x ≥ 1.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = edge(x);
        a / (a + edge(1.0 - x))
    }
}

/// Support radius of the torus partition of unity.
pub const ETA_RADIUS: f64 = 1.5 * PI;

/// One-dimensional partition of unity on ℝ: Σ_k η₁(s + 2πk) = 1, supported in
/// |s| < 3π/2 and identically 1 on |s| ≤ π/2.
pub fn eta1(s: f64) -> f64 {
    let b = profile(s / ETA_RADIUS);
    if b == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in -2..=2 {
        total += profile((s + 2.0 * PI * k as f64) / ETA_RADIUS);
    }
    b / total
}

/// Product cutoff η(ξ) = Π η₁(ξ_j) whose 2π-periodization is identically 1.
pub fn eta(xi: &[f64]) -> f64 {
    xi.iter().map(|&s| eta1(s)).product()
}

/// Plateau cutoff in the frequency variable: 1 for ω ≤ r/2, 0 for ω ≥ r.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginCutoff {
    pub radius: f64,
}

impl OriginCutoff {
    pub fn new(radius: f64) -> Self {
        OriginCutoff { radius }
    }

    pub fn inner(&self) -> f64 {
        0.5 * self.radius
    }

    pub fn eval(&self, omega: f64) -> f64 {
        1.0 - smooth_step((omega - self.inner()) / (self.radius - self.inner()))
    }
}

impl Default for OriginCutoff {
    fn default() -> Self {
        OriginCutoff { radius: 1.0 }
    }
}

/// Amplitude functions for the generic integral J.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmplitudeSpec {
    /// Π_j ψ(x_j / R): a product of one-dimensional bumps on the box [-R, R]^n.
    Separable { radius: f64 },
    /// ψ(|x| / R), radial, supported in the ball of radius R.
    Radial { radius: f64 },
}

impl AmplitudeSpec {
    pub fn radius(&self) -> f64 {
        match self {
            AmplitudeSpec::Separable { radius } | AmplitudeSpec::Radial { radius } => *radius,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AmplitudeSpec::Separable { radius } => x.iter().map(|&s| profile(s / radius)).product(),
            AmplitudeSpec::Radial { radius } => {
                let r = x.iter().map(|s| s * s).sum::<f64>().sqrt();
                profile(r / radius)
            }
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, AmplitudeSpec::Separable { .. })
    }
}

impl Default for AmplitudeSpec {
    fn default() -> Self {
        AmplitudeSpec::Separable { radius: 1.0 }
    }
}

/// Integral of the 1-D bump `profile(x / R)` over ℝ.
pub fn bump_mass(radius: f64) -> f64 {
    let (x, w) = composite_gauss(-1.0, 1.0, 64, 16);
    radius * x.iter().zip(&w).map(|(x, w)| w * profile(*x)).sum::<f64>()
}

/// Tabulated Fourier transform k ↦ ∫ e^{ikx} ψ(x/R) dx of the 1-D bump,
/// used to integrate out a variable that enters the phase linearly.
#[derive(Clone, Debug)]
pub struct BumpTransform {
    radius: f64,
    step: f64,
    values: Vec<f64>,
}

const INTERP_POINTS: usize = 8;

impl BumpTransform {
    /// Table covering |k| ≤ kmax with spacing 1/32.
    pub fn new(radius: f64, kmax: f64) -> Self {
        let step = 1.0 / 32.0;
        let count = (kmax.abs() / step).ceil() as usize + INTERP_POINTS + 2;
        // The bump is C^∞ with compact support, so Gauss panels resolving the
        // highest frequency converge very fast.
        let panels = ((kmax.abs() * radius) / 4.0).ceil() as usize + 32;
        let (xs, ws) = composite_gauss(-radius, radius, panels, 16);
        let amp: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * profile(x / radius)).collect();
        let values = (0..count)
            .map(|i| {
                let k = i as f64 * step;
                xs.iter().zip(&amp).map(|(x, a)| a * (k * x).cos()).sum()
            })
            .collect();
        BumpTransform { radius, step, values }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn kmax(&self) -> f64 {
        (self.values.len() - INTERP_POINTS - 2) as f64 * self.step
    }

    /// Real and even in k; evaluated by local Lagrange interpolation.
    pub fn eval(&self, k: f64) -> f64 {
        let k = k.abs();
        let pos = k / self.step;
        let n = self.values.len();
        let half = INTERP_POINTS / 2;
        let base = pos.floor() as isize - (half as isize - 1);
        let start = base.max(0) as usize;
        let start = start.min(n - INTERP_POINTS);
        let mut acc = 0.0;
        for i in 0..INTERP_POINTS {
            let xi = (start + i) as f64;
            let mut li = 1.0;
            for j in 0..INTERP_POINTS {
                if j != i {
                    let xj = (start + j) as f64;
                    li *= (pos - xj) / (xi - xj);
                }
            }
            acc += li * self.values[start + i];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_is_one_at_center_and_vanishes_outside() {
        assert_eq!(profile(0.0), 1.0);
        assert_eq!(profile(1.0), 0.0);
        assert_eq!(profile(-1.5), 0.0);
        assert!(profile(0.999) < 1e-200);
    }

    #[test]
    fn smooth_step_is_monotone_with_half_at_center() {
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn eta_partition_of_unity() {
        for i in 0..200 {
            let s = -PI + 2.0 * PI * i as f64 / 200.0;
            let total: f64 = (-3..=3).map(|k| eta1(s + 2.0 * PI * k as f64)).sum();
            assert!((total - 1.0).abs() < 1e-14);
        }
        assert_eq!(eta1(0.4 * PI), 1.0);
        assert_eq!(eta1(1.6 * PI), 0.0);
    }

    #[test]
    fn origin_cutoff_has_plateau() {
        let c = OriginCutoff::new(1.0);
        assert_eq!(c.eval(0.2), 1.0);
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(1.0), 0.0);
        assert!(c.eval(0.75) > 0.0 && c.eval(0.75) < 1.0);
    }

    #[test]
    fn transform_matches_direct_quadrature() {
        let tr = BumpTransform::new(1.0, 200.0);
        assert!((tr.eval(0.0) - bump_mass(1.0)).abs() < 1e-13);
        let (xs, ws) = composite_gauss(-1.0, 1.0, 200, 16);
        for &k in &[0.3, 7.77, 41.123, 150.5] {
            let direct: f64 = xs.iter().zip(&ws).map(|(x, w)| w * profile(*x) * (k * x).cos()).sum();
            assert!((tr.eval(k) - direct).abs() < 1e-11, "k={k}");
            assert_eq!(tr.eval(-k), tr.eval(k));
        }
    }
}
