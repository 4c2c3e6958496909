//! The lattice dispersion relation ω(ξ)² = m² + Σ(2 − 2cos ξ_j), its derivatives,
//! and the classification of critical points of the phase v·ξ − ω(ξ).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DispersionError {
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("mass must be finite and nonnegative, got {0}")]
    BadMass(f64),
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ω vanishes at this point; derivatives are undefined")]
    SingularPoint,
    #[error("|cos ξ_{index}| is below 1e-12; sec has a pole there")]
    SecPole { index: usize },
    #[error("eigenvalue corank {corank} disagrees with symbolic label {label}")]
    ClassificationConflict { corank: usize, label: Stratum },
    #[error("operation requires the massless case")]
    NeedsMassless,
    #[error("operation requires d >= {0}")]
    DimensionTooSmall(usize),
    #[error("sup moved by {change:.3e} under grid doubling")]
    NotConverged { change: f64 },
}

/// Degeneracy stratum of a critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Stratum {
    /// Nondegenerate.
    Sigma0,
    /// Corank one, no coordinate at ±π/2.
    Sigma1Prime,
    /// Corank one, exactly two coordinates at ±π/2.
    Sigma1DoublePrime,
    /// Corank k ≥ 2 (k + 1 coordinates at ±π/2).
    Sigma(usize),
}

impl Stratum {
    pub fn corank(&self) -> usize {
        match self {
            Stratum::Sigma0 => 0,
            Stratum::Sigma1Prime | Stratum::Sigma1DoublePrime => 1,
            Stratum::Sigma(k) => *k,
        }
    }
}

impl From<Stratum> for String {
    fn from(s: Stratum) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Stratum {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        match s.as_str() {
            "Sigma0" => Ok(Stratum::Sigma0),
            "Sigma1'" => Ok(Stratum::Sigma1Prime),
            "Sigma1''" => Ok(Stratum::Sigma1DoublePrime),
            _ => match s.strip_prefix("Sigma").and_then(|k| k.parse::<usize>().ok()) {
                Some(k) if k >= 2 => Ok(Stratum::Sigma(k)),
                _ => Err(format!("unknown stratum {s}")),
            },
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Sigma0 => write!(f, "Sigma0"),
            Stratum::Sigma1Prime => write!(f, "Sigma1'"),
            Stratum::Sigma1DoublePrime => write!(f, "Sigma1''"),
            Stratum::Sigma(k) => write!(f, "Sigma{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub xi: Vec<f64>,
    pub corank: usize,
    pub label: Stratum,
    pub velocity: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionRelation {
    d: usize,
    mass: f64,
}

/// Relative eigenvalue threshold used to count the corank.
pub const CORANK_TOL: f64 = 1e-8;

fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

impl DispersionRelation {
    pub fn new(d: usize, mass: f64) -> Result<Self, DispersionError> {
        if d == 0 {
            return Err(DispersionError::BadDimension);
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(DispersionError::BadMass(mass));
        }
        Ok(DispersionRelation { d, mass })
    }

    pub fn wave(d: usize) -> Self {
        DispersionRelation { d, mass: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn check_len(&self, xi: &[f64]) -> Result<(), DispersionError> {
        if xi.len() != self.d {
            return Err(DispersionError::DimensionMismatch { expected: self.d, got: xi.len() });
        }
        Ok(())
    }

    /// ω² as a function of s = Σ(2 − 2cos ξ_j).
    pub fn omega_sq(&self, xi: &[f64]) -> f64 {
        self.mass * self.mass + xi.iter().map(|x| 2.0 - 2.0 * x.cos()).sum::<f64>()
    }

    pub fn omega(&self, xi: &[f64]) -> f64 {
        self.omega_sq(xi).sqrt()
    }

    /// φ(v, ξ) = v·ξ − ω(ξ).
    pub fn phase(&self, v: &[f64], xi: &[f64]) -> f64 {
        v.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>() - self.omega(xi)
    }

    fn nonzero_omega(&self, xi: &[f64]) -> Result<f64, DispersionError> {
        self.check_len(xi)?;
        let w = self.omega(xi);
        if w == 0.0 {
            return Err(DispersionError::SingularPoint);
        }
        Ok(w)
    }

    pub fn grad_omega(&self, xi: &[f64]) -> Result<Vec<f64>, DispersionError> {
        let w = self.nonzero_omega(xi)?;
        Ok(xi.iter().map(|x| x.sin() / w).collect())
    }

    pub fn hess_omega(&self, xi: &[f64]) -> Result<DMatrix<f64>, DispersionError> {
        let w = self.nonzero_omega(xi)?;
        let d = self.d;
        let s: Vec<f64> = xi.iter().map(|x| x.sin()).collect();
        let w3 = w * w * w;
        let mut h = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let mut v = -s[i] * s[j] / w3;
                if i == j {
                    v += xi[i].cos() / w;
                }
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        Ok(h)
    }

    /// |∇ω|² in the closed form Σ sin²ξ_j / Σ(2 − 2cos ξ_j).
    pub fn group_speed_sq(&self, xi: &[f64]) -> Result<f64, DispersionError> {
        if self.mass != 0.0 {
            return Err(DispersionError::NeedsMassless);
        }
        let w = self.nonzero_omega(xi)?;
        let num: f64 = xi.iter().map(|x| x.sin().powi(2)).sum();
        Ok(num / (w * w))
    }

    /// Σ(cos ξ_j + sec ξ_j) − 2d; vanishes on the Σ₁′ locus.
    pub fn sigma1prime_residual(&self, xi: &[f64]) -> Result<f64, DispersionError> {
        self.check_len(xi)?;
        let mut total = 0.0;
        for (j, x) in xi.iter().enumerate() {
            let c = x.cos();
            if c.abs() < 1e-12 {
                return Err(DispersionError::SecPole { index: j });
            }
            total += c + 1.0 / c;
        }
        Ok(total - 2.0 * self.d as f64)
    }

    /// Eigenvalue corank of Hess ω at ξ with threshold `tol`·‖Hess‖₂.
    pub fn corank(&self, xi: &[f64], tol: f64) -> Result<usize, DispersionError> {
        let h = self.hess_omega(xi)?;
        let eig = SymmetricEigen::new(h);
        let norm = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        Ok(eig.eigenvalues.iter().filter(|l| l.abs() <= tol * norm).count())
    }

    /// Symbolic label from the count of coordinates at ±π/2 and the Σ₁′ residual.
    pub fn symbolic_label(&self, xi: &[f64], tol: f64) -> Result<Stratum, DispersionError> {
        self.check_len(xi)?;
        let halves = xi.iter().filter(|x| x.cos().abs() <= tol).count();
        Ok(match halves {
            0 => {
                let r = self.sigma1prime_residual(xi)?;
                if r.abs() <= 100.0 * tol {
                    Stratum::Sigma1Prime
                } else {
                    Stratum::Sigma0
                }
            }
            1 => Stratum::Sigma0,
            2 => Stratum::Sigma1DoublePrime,
            m => Stratum::Sigma(m - 1),
        })
    }

    pub fn classify(&self, xi: &[f64], tol: f64) -> Result<CriticalPoint, DispersionError> {
        if self.mass != 0.0 {
            return Err(DispersionError::NeedsMassless);
        }
        let velocity = self.grad_omega(xi)?;
        let corank = self.corank(xi, tol)?;
        let label = self.symbolic_label(xi, tol)?;
        if label.corank() != corank {
            return Err(DispersionError::ClassificationConflict { corank, label });
        }
        Ok(CriticalPoint { xi: xi.to_vec(), corank, label, velocity })
    }

    /// All ξ ∈ (−π, π]^d with ∇ω(ξ) = v, accepted when ‖∇ω(ξ) − v‖ ≤ `tol`.
    ///
    /// Writing w = ω(ξ), each coordinate satisfies sin ξ_j = v_j w, so ξ_j is one
    /// of two arcsin branches. For every branch pattern the remaining condition
    /// Σ(2 − 2cos ξ_j(w)) = w² is a scalar equation in w.
    pub fn find_critical_points(&self, v: &[f64], tol: f64) -> Result<Vec<CriticalPoint>, DispersionError> {
        if self.mass != 0.0 {
            return Err(DispersionError::NeedsMassless);
        }
        self.check_len(v)?;
        let d = self.d;
        let speed: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if speed >= 1.0 {
            return Ok(Vec::new());
        }
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut w_max = (4.0 * d as f64).sqrt();
        if vmax > 0.0 {
            w_max = w_max.min(1.0 / vmax);
        }
        let mut found: Vec<Vec<f64>> = Vec::new();
        for mask in 0..(1usize << d) {
            let branch = |w: f64| -> f64 {
                let mut s = 0.0;
                for j in 0..d {
                    let c = (1.0 - (v[j] * w).powi(2)).max(0.0).sqrt();
                    let c = if mask >> j & 1 == 1 { -c } else { c };
                    s += 2.0 - 2.0 * c;
                }
                s - w * w
            };
            for w in scalar_roots(&branch, w_max) {
                let xi: Vec<f64> = (0..d)
                    .map(|j| {
                        let a = (v[j] * w).clamp(-1.0, 1.0).asin();
                        wrap_angle(if mask >> j & 1 == 1 { PI - a } else { a })
                    })
                    .collect();
                let xi = self.polish(v, xi);
                let Ok(g) = self.grad_omega(&xi) else { continue };
                let res = g.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if res > tol {
                    continue;
                }
                let dup = found.iter().any(|p| {
                    p.iter().zip(&xi).all(|(a, b)| wrap_angle(a - b).abs() <= 1e-8)
                });
                if !dup {
                    found.push(xi);
                }
            }
        }
        found.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut out = Vec::with_capacity(found.len());
        for xi in found {
            let velocity = self.grad_omega(&xi)?;
            let corank = self.corank(&xi, CORANK_TOL)?;
            let label = self.symbolic_label(&xi, CORANK_TOL).unwrap_or(Stratum::Sigma0);
            out.push(CriticalPoint { xi, corank, label, velocity });
        }
        Ok(out)
    }

    /// A few damped Newton steps on ∇ω(ξ) = v; skipped where the Hessian is
    /// singular, which is exactly where the branch construction is already exact.
    fn polish(&self, v: &[f64], mut xi: Vec<f64>) -> Vec<f64> {
        let resid = |xi: &[f64]| -> Option<(Vec<f64>, f64)> {
            let g = self.grad_omega(xi).ok()?;
            let r: Vec<f64> = g.iter().zip(v).map(|(a, b)| a - b).collect();
            let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            Some((r, n))
        };
        for _ in 0..8 {
            let Some((r, n)) = resid(&xi) else { break };
            if n <= 1e-15 {
                break;
            }
            let Ok(h) = self.hess_omega(&xi) else { break };
            let Some(step) = h.lu().solve(&nalgebra::DVector::from_vec(r)) else { break };
            let cand: Vec<f64> = xi.iter().zip(step.iter()).map(|(x, s)| x - s).collect();
            match resid(&cand) {
                Some((_, m)) if m < n => xi = cand.into_iter().map(wrap_angle).collect(),
                _ => break,
            }
        }
        xi
    }

    /// Roots ξ₁ ∈ (0, π/2) ∪ (π/2, π) of the Σ₁′ residual with ξ₂..ξ_d fixed.
    pub fn sigma1prime_first_coordinate(&self, rest: &[f64]) -> Vec<f64> {
        let target = 2.0 * self.d as f64 - rest.iter().map(|x| x.cos() + 1.0 / x.cos()).sum::<f64>();
        let mut out = Vec::new();
        // c + 1/c is increasing in ξ on both subintervals, with ranges (2, ∞)
        // and (−∞, −2).
        for (lo, hi, feasible) in [
            (0.0, FRAC_PI_2, target > 2.0),
            (FRAC_PI_2, PI, target < -2.0),
        ] {
            if !feasible || !target.is_finite() {
                continue;
            }
            let f = |x: f64| x.cos() + 1.0 / x.cos() - target;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m == a || m == b {
                    break;
                }
                let fm = f(m);
                // f increases from below on (0, π/2) and from −∞ on (π/2, π).
                if fm < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }

    /// Numerical sup of |∇ω| over the degenerate strata Σ (d ≥ 3).
    pub fn estimate_b0(&self, grid_density: usize) -> Result<B0Estimate, DispersionError> {
        if self.mass != 0.0 {
            return Err(DispersionError::NeedsMassless);
        }
        if self.d < 3 {
            return Err(DispersionError::DimensionTooSmall(3));
        }
        let n = grid_density.max(4);
        let coarse = self.b0_at(n);
        let fine = self.b0_at(2 * n);
        let change = (fine.sup - coarse.sup).abs();
        let est = B0Estimate {
            sup: fine.sup,
            delta: 1.0 - fine.sup,
            argmax: fine.argmax,
            sigma1prime_sup: fine.s1p,
            sigma_slice_sup: fine.slices,
            grid_density: 2 * n,
            refinement_change: change,
            converged: change <= 1e-4,
        };
        if !est.converged {
            return Err(DispersionError::NotConverged { change });
        }
        Ok(est)
    }

    fn b0_at(&self, n: usize) -> B0Pass {
        let d = self.d;
        let speed = |xi: &[f64]| self.group_speed_sq(xi).map(|s| s.sqrt()).unwrap_or(0.0);

        // Σ₁′: grid over ξ₂..ξ_d, ξ₁ from the monotone residual.
        let s1p_value = |rest: &[f64]| -> (f64, Vec<f64>) {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            if rest.iter().any(|x| x.cos().abs() < 1e-9) {
                return best;
            }
            for x1 in self.sigma1prime_first_coordinate(rest) {
                let mut xi = vec![x1];
                xi.extend_from_slice(rest);
                let s = speed(&xi);
                if s > best.0 {
                    best = (s, xi);
                }
            }
            best
        };
        let (s1p, s1p_arg) = grid_max(d - 1, n, &|p: &[f64]| s1p_value(p).0);
        let mut best = (f64::NEG_INFINITY, Vec::new());
        if let Some(p) = s1p_arg {
            let p = compass_max(&|q: &[f64]| s1p_value(q).0, p, PI / n as f64);
            best = s1p_value(&p);
        }
        let s1p = best.0.max(s1p);

        // Σ_k slices: m ≥ 2 coordinates pinned at π/2, the rest free.
        let mut slices = f64::NEG_INFINITY;
        let mut slice_arg = Vec::new();
        for m in 2..=d {
            let free = d - m;
            let f = |p: &[f64]| {
                let mut xi = vec![FRAC_PI_2; m];
                xi.extend_from_slice(p);
                speed(&xi)
            };
            let (val, arg) = if free == 0 {
                (f(&[]), Some(Vec::new()))
            } else {
                grid_max(free, n, &f)
            };
            let (val, arg) = match arg {
                Some(p) if free > 0 => {
                    let p = compass_max(&f, p, PI / n as f64);
                    (f(&p).max(val), p)
                }
                Some(p) => (val, p),
                None => (val, Vec::new()),
            };
            if val > slices {
                slices = val;
                slice_arg = vec![FRAC_PI_2; m];
                slice_arg.extend(arg);
            }
        }
        let (sup, argmax) = if s1p >= slices { (s1p, best.1) } else { (slices, slice_arg) };
        B0Pass { sup, argmax, s1p, slices }
    }
}

struct B0Pass {
    sup: f64,
    argmax: Vec<f64>,
    s1p: f64,
    slices: f64,
}

/// Max of `f` over an n^k offset grid of [0, π]^k (offset avoids π/2 exactly).
fn grid_max(k: usize, n: usize, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> (f64, Option<Vec<f64>>) {
    use rayon::prelude::*;
    let total = n.pow(k as u32);
    let point = |mut idx: usize| -> Vec<f64> {
        let mut p = vec![0.0; k];
        for slot in p.iter_mut() {
            *slot = PI * ((idx % n) as f64 + 0.5) / n as f64;
            idx /= n;
        }
        p
    };
    let best = (0..total)
        .into_par_iter()
        .map(|i| (f(&point(i)), i))
        .filter(|(v, _)| v.is_finite())
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    if best.1 == usize::MAX {
        (f64::NEG_INFINITY, None)
    } else {
        (best.0, Some(point(best.1)))
    }
}

/// Compass search for a local maximum, confined to [0, π]^k.
fn compass_max(f: &dyn Fn(&[f64]) -> f64, mut p: Vec<f64>, mut step: f64) -> Vec<f64> {
    let mut fp = f(&p);
    while step > 1e-10 {
        let mut improved = false;
        for j in 0..p.len() {
            for sgn in [1.0, -1.0] {
                let mut q = p.clone();
                q[j] = (q[j] + sgn * step).clamp(0.0, PI);
                let fq = f(&q);
                if fq > fp {
                    p = q;
                    fp = fq;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    p
}

/// Roots of a scalar function on (0, w_max]: sign changes on a fine grid refined
/// by bisection, tangential zeros found at small local minima of |F|, and the
/// right endpoint (where arcsin branches meet).
fn scalar_roots(f: &dyn Fn(f64) -> f64, w_max: f64) -> Vec<f64> {
    const GRID: usize = 4096;
    let h = w_max / GRID as f64;
    let ws: Vec<f64> = (0..=GRID).map(|i| (i as f64 * h).max(h * 1e-6)).collect();
    let fs: Vec<f64> = ws.iter().map(|&w| f(w)).collect();
    let mut roots = Vec::new();
    let bisect = |mut a: f64, mut b: f64| -> f64 {
        let mut fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = f(m);
            if fm == 0.0 {
                return m;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    for i in 1..GRID {
        let (a, b) = (fs[i], fs[i + 1]);
        if a == 0.0 {
            roots.push(ws[i]);
        } else if (a < 0.0) != (b < 0.0) && b != 0.0 {
            roots.push(bisect(ws[i], ws[i + 1]));
        }
    }
    // Tangential zeros: local minima of |F| without a sign change nearby.
    let scale = fs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 1..GRID {
        let (l, c, r) = (fs[i - 1].abs(), fs[i].abs(), fs[i + 1].abs());
        if !(c <= l && c <= r) || (fs[i - 1] < 0.0) != (fs[i + 1] < 0.0) {
            continue;
        }
        if c > 1e-2 * scale {
            continue;
        }
        let sgn = fs[i].signum();
        let g = |w: f64| sgn * f(w);
        // Golden-section minimization of sgn·F on the bracket.
        let (mut a, mut b) = (ws[i - 1], ws[i + 1]);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - gr * (b - a);
        let mut x2 = a + gr * (b - a);
        let (mut g1, mut g2) = (g(x1), g(x2));
        for _ in 0..200 {
            if g1 < g2 {
                b = x2;
                x2 = x1;
                g2 = g1;
                x1 = b - gr * (b - a);
                g1 = g(x1);
            } else {
                a = x1;
                x1 = x2;
                g1 = g2;
                x2 = a + gr * (b - a);
                g2 = g(x2);
            }
            if b - a < 1e-15 * w_max {
                break;
            }
        }
        let wm = 0.5 * (a + b);
        let gm = g(wm);
        if gm <= 0.0 {
            if gm < 0.0 {
                roots.push(bisect(ws[i - 1], wm));
                roots.push(bisect(wm, ws[i + 1]));
            } else {
                roots.push(wm);
            }
        } else if gm <= 1e-13 * scale {
            roots.push(wm);
        }
    }
    if fs[GRID].abs() <= 1e-12 * scale {
        roots.push(w_max);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * w_max);
    roots
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct B0Estimate {
    pub sup: f64,
    pub delta: f64,
    pub argmax: Vec<f64>,
    pub sigma1prime_sup: f64,
    pub sigma_slice_sup: f64,
    pub grid_density: usize,
    pub refinement_change: f64,
    pub converged: bool,
}
