//! Decay suites: model phases through J, strata velocities through I(v,t),
//! and the conjugate-phase velocity v₀ = (1/√(2d), …).

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bump::{AmplitudeSpec, OriginCutoff};
use crate::dispersion::DispersionRelation;
use crate::oscquad::{model_phase_catalog, oscint_i, oscint_j, JOptions, QuadOptions};

use super::fit::{fit_decay, geometric_schedule, DecayFit, DecaySamples, FitOptions};
use super::FitError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub name: String,
    pub target_beta: f64,
    pub target_p: u32,
    pub beta_tol: f64,
    pub fit: DecayFit,
    pub pass: bool,
    pub samples: DecaySamples,
}

fn row(name: &str, target_beta: f64, target_p: u32, beta_tol: f64, samples: DecaySamples, opts: &FitOptions, upper_only: bool) -> Result<SuiteRow, FitError> {
    let fit = fit_decay(&samples, opts)?;
    let beta_ok = if upper_only { fit.beta <= target_beta + beta_tol } else { (fit.beta - target_beta).abs() <= beta_tol };
    let pass = beta_ok && (upper_only || fit.p == target_p);
    Ok(SuiteRow { name: name.to_string(), target_beta, target_p, beta_tol, fit, pass, samples })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSuiteOptions {
    pub t: Vec<f64>,
    /// Bump radius R of the separable amplitude, shared by all phases.
    pub radius: f64,
    pub beta_tol: f64,
    /// Restrict to these catalog names (all when empty).
    pub names: Vec<String>,
    pub j: JOptions,
    pub fit: FitOptions,
}

impl Default for ModelSuiteOptions {
    fn default() -> Self {
        ModelSuiteOptions {
            t: geometric_schedule(10.0, 200.0, 1.1),
            radius: 2.0,
            beta_tol: 0.05,
            names: Vec::new(),
            j: JOptions::default(),
            fit: FitOptions::default(),
        }
    }
}

/// Fits |J(t, S, ψ_R)| for the catalog phases; pass iff |β − β*| ≤ tol and p = p*.
pub fn run_model_phase_suite(opts: &ModelSuiteOptions) -> Result<Vec<SuiteRow>, FitError> {
    let ratio_ok = opts.t.windows(2).all(|w| w[1] / w[0] <= 1.2 + 1e-12);
    if !ratio_ok {
        return Err(FitError::InsufficientRange("schedule ratio exceeds 1.2".into()));
    }
    let amp = AmplitudeSpec::Separable { radius: opts.radius };
    let phases: Vec<_> = model_phase_catalog().into_iter().filter(|m| opts.names.is_empty() || opts.names.contains(&m.name)).collect();
    phases
        .par_iter()
        .map(|mp| {
            let poly = mp.poly();
            let m: Vec<f64> = opts.t.iter().map(|&t| oscint_j(&poly, &amp, t, &opts.j).map(|r| r.value.norm())).collect::<Result<_, _>>()?;
            let s = DecaySamples::new(opts.t.clone(), m, format!("J {}", mp.expr))?;
            row(&mp.name, mp.beta, mp.log_power, opts.beta_tol, s, &opts.fit, false)
        })
        .collect()
}

/// How magnitudes are sampled for a velocity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RaySampler {
    /// x = m·w ∈ ℤ^d with t = m|w|/|v| (v ∥ w), so v = x/t exactly.
    Lattice { direction: Vec<i64> },
    /// Arbitrary v on the given times.
    Velocity { t: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumCase {
    pub name: String,
    pub dim: usize,
    pub velocity: Vec<f64>,
    pub sampler: RaySampler,
    pub t_max: f64,
    pub target_beta: f64,
    pub target_p: u32,
    pub beta_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaySuiteOptions {
    pub quad: QuadOptions,
    pub cutoff: OriginCutoff,
    pub fit: FitOptions,
    /// Geometric ratio used to thin lattice ray indices m; 1 keeps every m.
    pub ratio: f64,
    pub t_min: f64,
}

impl Default for RaySuiteOptions {
    fn default() -> Self {
        RaySuiteOptions {
            quad: QuadOptions { rtol: 1e-6, ..QuadOptions::default() },
            cutoff: OriginCutoff::default(),
            fit: FitOptions::default(),
            ratio: 1.0,
            t_min: 8.0,
        }
    }
}

/// Distinct integers m with m·step in [t_min, t_max], roughly geometric
/// (every m when `ratio` ≤ 1).
pub fn ray_indices(step: f64, t_min: f64, t_max: f64, ratio: f64) -> Vec<u64> {
    let m0 = (t_min / step).ceil().max(1.0);
    let m1 = (t_max / step).floor();
    if m1 < m0 {
        return Vec::new();
    }
    if ratio <= 1.0 {
        return (m0 as u64..=m1 as u64).collect();
    }
    let mut out: Vec<u64> = geometric_schedule(m0, m1.max(m0 + 1.0), ratio).iter().map(|m| m.round() as u64).filter(|&m| m as f64 <= m1).collect();
    out.dedup();
    out
}

/// |I(v, t)| along the case's samples; returns (t, |I|).
pub fn sample_case(case: &StratumCase, opts: &RaySuiteOptions) -> Result<(Vec<f64>, Vec<f64>), FitError> {
    let rel = DispersionRelation::wave(case.dim);
    let vnorm = case.velocity.iter().map(|x| x * x).sum::<f64>().sqrt();
    let points: Vec<(f64, Vec<f64>)> = match &case.sampler {
        RaySampler::Lattice { direction } => {
            let wnorm = direction.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            let step = wnorm / vnorm;
            ray_indices(step, opts.t_min, case.t_max, opts.ratio)
                .into_iter()
                .map(|m| {
                    let t = m as f64 * step;
                    let v: Vec<f64> = direction.iter().map(|&w| (m as i64 * w) as f64 / t).collect();
                    (t, v)
                })
                .collect()
        }
        RaySampler::Velocity { t } => t.iter().filter(|&&t| t <= case.t_max).map(|&t| (t, case.velocity.clone())).collect(),
    };
    let mags: Vec<f64> = points
        .par_iter()
        .map(|(t, v)| oscint_i(&rel, v, *t, opts.cutoff, &opts.quad).map(|r| r.total.norm()))
        .collect::<Result<_, _>>()?;
    Ok((points.into_iter().map(|(t, _)| t).collect(), mags))
}

pub fn run_case(case: &StratumCase, opts: &RaySuiteOptions, upper_only: bool) -> Result<SuiteRow, FitError> {
    let (t, m) = sample_case(case, opts)?;
    let s = DecaySamples::new(t, m, format!("|I| d={} {}", case.dim, case.name))?;
    let fo = FitOptions { t_min: opts.t_min, ..opts.fit.clone() };
    row(&case.name, case.target_beta, case.target_p, case.beta_tol, s, &fo, upper_only)
}

/// Velocities of the strata with their predicted decay, per dimension.
pub fn table1_cases(d: usize) -> Vec<StratumCase> {
    let s = |x: f64| x.sqrt();
    let case = |name: &str, velocity: Vec<f64>, dir: Vec<i64>, t_max: f64, beta: f64, p: u32, tol: f64| StratumCase {
        name: name.into(),
        dim: velocity.len(),
        velocity,
        sampler: RaySampler::Lattice { direction: dir },
        t_max,
        target_beta: beta,
        target_p: p,
        beta_tol: tol,
    };
    match d {
        2 => {
            let mut out = vec![case("Sigma1''", vec![0.5, 0.5], vec![1, 1], 500.0, -0.75, 0, 0.05)];
            // Σ₁′: ξ = (ξ₁, 2.0) on the locus Σ(cos + sec) = 4
            let rel = DispersionRelation::wave(2);
            if let Some(&x1) = rel.sigma1prime_first_coordinate(&[2.0]).first() {
                let v = rel.grad_omega(&[x1, 2.0]).expect("nonzero ω");
                out.push(StratumCase {
                    name: "Sigma1'".into(),
                    dim: 2,
                    velocity: v,
                    sampler: RaySampler::Velocity { t: geometric_schedule(8.0, 500.0, 1.1) },
                    t_max: 500.0,
                    target_beta: -5.0 / 6.0,
                    target_p: 0,
                    beta_tol: 0.05,
                });
            }
            out
        }
        3 => vec![case("Sigma2", vec![1.0 / s(6.0); 3], vec![1, 1, 1], 120.0, -7.0 / 6.0, 0, 0.08)],
        4 => vec![
            case("Sigma3", vec![1.0 / s(8.0); 4], vec![1, 1, 1, 1], 60.0, -1.5, 1, 0.15),
            StratumCase {
                name: "Sigma2".into(),
                dim: 4,
                velocity: DispersionRelation::wave(4).grad_omega(&[FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 1.0]).expect("nonzero ω"),
                sampler: RaySampler::Velocity { t: geometric_schedule(8.0, 60.0, 1.1) },
                t_max: 60.0,
                target_beta: -5.0 / 3.0,
                target_p: 0,
                beta_tol: 0.1,
            },
        ],
        _ => Vec::new(),
    }
}

/// Runs the given cases (all of `table1_cases(d)` when `names` is empty).
pub fn run_table1_suite(d: usize, names: &[String], opts: &RaySuiteOptions) -> Result<Vec<SuiteRow>, FitError> {
    if !(2..=4).contains(&d) {
        return Err(FitError::InvalidSamples(format!("d must be 2, 3 or 4, got {d}")));
    }
    table1_cases(d).iter().filter(|c| names.is_empty() || names.contains(&c.name)).map(|c| run_case(c, opts, false)).collect()
}

/// |I(v₀, t)| at v₀ = (1/√(2d), …) along the lattice diagonal; pass iff
/// β ≤ −(2d+1)/6 + tol.
pub fn run_conj_suite(d: usize, t_max: f64, beta_tol: f64, opts: &RaySuiteOptions) -> Result<SuiteRow, FitError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(FitError::InvalidSamples(format!("d must be odd and >= 3, got {d}")));
    }
    let case = StratumCase {
        name: format!("conj d={d}"),
        dim: d,
        velocity: vec![1.0 / ((2 * d) as f64).sqrt(); d],
        sampler: RaySampler::Lattice { direction: vec![1; d] },
        t_max,
        target_beta: -((2 * d + 1) as f64) / 6.0,
        target_p: 0,
        beta_tol,
    };
    run_case(&case, opts, true)
}

pub fn write_samples_csv(w: &mut impl Write, s: &DecaySamples) -> io::Result<()> {
    writeln!(w, "# latticewave v1, decay-samples, tag={}", s.tag)?;
    writeln!(w, "t,magnitude,tag")?;
    for (t, m) in s.t.iter().zip(&s.m) {
        writeln!(w, "{t},{m:.17e},{}", s.tag)?;
    }
    Ok(())
}

/// Parses `t,magnitude[,tag]` rows; `#` lines and a non-numeric header are skipped.
pub fn read_samples_csv(text: &str) -> Result<DecaySamples, FitError> {
    let mut t = Vec::new();
    let mut m = Vec::new();
    let mut tag = String::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let (Ok(a), Some(Ok(b))) = (cols[0].parse::<f64>(), cols.get(1).map(|c| c.parse::<f64>())) else {
            if t.is_empty() {
                continue;
            }
            return Err(FitError::InvalidSamples(format!("bad row: {line}")));
        };
        t.push(a);
        m.push(b);
        if tag.is_empty() {
            if let Some(g) = cols.get(2) {
                tag = g.to_string();
            }
        }
    }
    DecaySamples::new(t, m, if tag.is_empty() { "csv".to_string() } else { tag })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_indices_are_distinct_and_in_range() {
        let m = ray_indices(8f64.sqrt(), 8.0, 60.0, 1.1);
        assert_eq!(*m.first().unwrap(), 3);
        assert_eq!(*m.last().unwrap(), 21);
        assert!(m.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn cases_have_exact_ray_velocities() {
        for d in 2..=4 {
            for c in table1_cases(d) {
                if let RaySampler::Lattice { direction } = &c.sampler {
                    let vn = c.velocity.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let wn = direction.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                    for (v, &w) in c.velocity.iter().zip(direction) {
                        assert!((v / vn - w as f64 / wn).abs() < 1e-15);
                    }
                }
                let rel = DispersionRelation::wave(d);
                assert!(!rel.find_critical_points(&c.velocity, 1e-9).unwrap().is_empty(), "{}", c.name);
            }
        }
    }

    #[test]
    fn conj_suite_rejects_even_and_short_ranges() {
        assert!(run_conj_suite(4, 100.0, 0.1, &RaySuiteOptions::default()).is_err());
        assert!(matches!(run_conj_suite(3, 9.0, 0.1, &RaySuiteOptions::default()), Err(FitError::InsufficientRange(_)) | Err(FitError::InvalidSamples(_))));
    }

    #[test]
    fn csv_round_trip() {
        let s = DecaySamples::new(vec![1.0, 2.0], vec![0.5, 0.25], "x").unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &s).unwrap();
        let back = read_samples_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn model_suite_single_phase() {
        let opts = ModelSuiteOptions { names: vec!["A1".into()], ..ModelSuiteOptions::default() };
        let rows = run_model_phase_suite(&opts).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].pass, "{:?}", rows[0].fit);
    }
}
