//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Run a subset with `cargo test --test acceptance -- 1 5 9`. The process
//! exits 0 whenever every criterion ran to completion; failures are reported
//! in the output, not hidden.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use latticewave::bump::{AmplitudeSpec, OriginCutoff};
use latticewave::decayfit::{
    fit_decay, geometric_schedule, run_model_phase_suite, run_table1_suite, DecaySamples, FitOptions, ModelSuiteOptions, RaySuiteOptions,
};
use latticewave::dispersion::{DispersionRelation, Stratum};
use latticewave::evolve::{
    lplq_experiment, nonlinear_solve, random_small_support, strichartz_sample, EvolutionState, LatticeField, NonlinearOptions, Propagator,
};
use latticewave::numerics::linear_fit;
use latticewave::oscquad::{cos_kernel, green_g, inv_d_kernel, perturbation_probe, JOptions, QuadOptions};
use latticewave::polynewton::{build_conj_phase, corank_two_expansion_d4, corner_expansion, newton_data, parse_poly, rat, rat_string};

type Outcome = (bool, String);

fn c1_table2() -> Outcome {
    let cases = [("x1^3", rat(3, 1), 1), ("x1^2 + x1*x2^2", rat(4, 3), 1), ("x1^2*x2 - x2^3", rat(3, 2), 1), ("x1*x2*x3", rat(1, 1), 3)];
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (expr, d_s, k_s) in cases {
        let nd = newton_data(&parse_poly(expr).unwrap()).unwrap();
        ok &= nd.d_s == d_s && nd.k_s == k_s;
        parts.push(format!("{expr}: {} k={}", rat_string(&nd.d_s), nd.k_s));
    }
    let secs = t0.elapsed().as_secs_f64();
    (ok && secs < 1.0, format!("{} in {secs:.3}s", parts.join("; ")))
}

fn c2_conj_newton() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, expected) in [(3, rat(6, 7)), (5, rat(6, 11)), (7, rat(2, 5))] {
        let cp = build_conj_phase(d, 4).unwrap();
        let data_ok = cp.newton.d_s == expected && cp.newton.k_s == 1 && cp.principal_identity && cp.combination_verified;
        // the relative-interior statements are required for N = (d-1)/2 = 2, 3
        let ri_ok = d == 3 || cp.containments.iter().all(|c| c.relative_interior);
        ok &= data_ok && ri_ok;
        let failed: Vec<String> =
            cp.containments.iter().filter(|c| !c.relative_interior).map(|c| format!("{} ({} offenders)", c.label, c.offenders.len())).collect();
        parts.push(format!(
            "d={d}: d_S={} k_S={}{}",
            rat_string(&cp.newton.d_s),
            cp.newton.k_s,
            if failed.is_empty() { String::new() } else { format!(", not in ri: {}", failed.join(", ")) }
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    (ok && secs < 30.0, format!("{} in {secs:.1}s", parts.join("; ")))
}

fn c3_model_suite() -> Outcome {
    let names = ["A1", "A2", "A3", "D4-", "x1^2x2", "x1x2x3"];
    let opts = ModelSuiteOptions { names: names.iter().map(|s| s.to_string()).collect(), ..ModelSuiteOptions::default() };
    let rows = run_model_phase_suite(&opts).unwrap();
    let mut ok = rows.len() == names.len();
    let mut parts = Vec::new();
    for r in &rows {
        ok &= r.pass;
        let dom = match (r.fit.residual(0), r.fit.residual(1)) {
            (Some(a), Some(b)) if r.target_p == 1 => format!(" p0/p1 residual {:.2}", a / b),
            _ => String::new(),
        };
        parts.push(format!("{} beta={:.4} p={}{}{}", r.name, r.fit.beta, r.fit.p, dom, if r.pass { "" } else { " (miss)" }));
    }
    (ok, parts.join("; "))
}

fn c4_table1() -> Outcome {
    let opts = RaySuiteOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, name) in [(2, "Sigma1''"), (3, "Sigma2"), (4, "Sigma3")] {
        let rows = run_table1_suite(d, &[name.to_string()], &opts).unwrap();
        let r = &rows[0];
        ok &= r.pass;
        parts.push(format!("d={d} {name} beta={:.4} p={} (target {:.4}, p={}){}", r.fit.beta, r.fit.p, r.target_beta, r.target_p, if r.pass { "" } else { " miss" }));
    }
    (ok, parts.join("; "))
}

/// J_n(z) by its power series; adequate for z ≤ 12 in double precision.
fn bessel_j(n: u32, z: f64) -> f64 {
    let h = z / 2.0;
    let mut term = h.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for k in 1..200u32 {
        term *= -h * h / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn c5_backends() -> Outcome {
    let opts = QuadOptions::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (d, l, reach, times) in [(2usize, 32usize, 7i64, vec![1.0, 2.5, 4.0, 5.0, 6.0]), (3, 32, 4, vec![1.5, 4.0])] {
        let rel = DispersionRelation::wave(d);
        let p = Propagator::new(&rel, l);
        let zero = LatticeField::zeros(d, l);
        let delta = LatticeField::delta(d, l);
        let side = 2 * reach + 1;
        let pts: Vec<Vec<i64>> = (0..side.pow(d as u32))
            .map(|mut i| {
                (0..d)
                    .map(|_| {
                        let c = i % side - reach;
                        i /= side;
                        c
                    })
                    .collect()
            })
            .collect();
        for &t in &times {
            let u = p.propagate(&zero, &delta, t).unwrap().u;
            for x in &pts {
                let g = green_g(&rel, x, t, &opts).unwrap().value.re;
                worst = worst.max((u.get(x).re - g).abs());
                count += 1;
            }
        }
    }
    let rel1 = DispersionRelation::wave(1);
    let mut worst1: f64 = 0.0;
    for x in 0..=8i64 {
        for t in [0.5, 2.0, 3.7, 6.0] {
            let c = cos_kernel(&rel1, &[x], t, &opts).unwrap().value.re;
            worst1 = worst1.max((c - bessel_j(2 * x as u32, 2.0 * t)).abs());
        }
    }
    let ok = worst <= 1e-8 && count >= 1000 && worst1 <= 1e-8;
    (ok, format!("FFT vs quadrature max diff {worst:.2e} over {count} (x,t) points; d=1 cosine kernel vs J_2x(2t) max diff {worst1:.2e}"))
}

fn random_coord(rng: &mut ChaCha8Rng) -> f64 {
    // away from 0 and ±π/2 so the constructed label is unambiguous
    loop {
        let x: f64 = rng.gen_range(-3.0..3.0);
        if x.abs() > 0.1 && x.cos().abs() > 0.05 {
            return x;
        }
    }
}

fn c6_classifier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let per = 1000;
    let mut total = 0;
    let mut agree = 0;
    let mut strata = Vec::new();
    for d in 2..=4usize {
        let rel = DispersionRelation::wave(d);
        let mut kinds: Vec<(Stratum, usize)> = vec![(Stratum::Sigma0, 0), (Stratum::Sigma1Prime, 0), (Stratum::Sigma1DoublePrime, 2)];
        for j in 2..d {
            kinds.push((Stratum::Sigma(j), j + 1));
        }
        for (label, halves) in kinds {
            let mut made = 0;
            while made < per {
                let mut xi: Vec<f64> = (0..d).map(|_| random_coord(&mut rng)).collect();
                match label {
                    Stratum::Sigma1Prime => {
                        let roots = rel.sigma1prime_first_coordinate(&xi[1..]);
                        let Some(&r) = roots.first() else { continue };
                        xi[0] = if rng.gen::<bool>() { r } else { -r };
                    }
                    _ => {
                        for x in xi.iter_mut().take(halves) {
                            *x = if rng.gen::<bool>() { FRAC_PI_2 } else { -FRAC_PI_2 };
                        }
                    }
                }
                if label == Stratum::Sigma0 && rel.sigma1prime_residual(&xi).unwrap().abs() < 1e-3 {
                    continue;
                }
                made += 1;
                total += 1;
                if let Ok(cp) = rel.classify(&xi, 1e-8) {
                    if cp.label == label && cp.corank == label.corank() {
                        agree += 1;
                    }
                }
            }
            strata.push(format!("d{d}:{label}"));
        }
    }
    let mut empty = 0;
    for _ in 0..1000 {
        let d = rng.gen_range(2..=4usize);
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let speed = rng.gen_range(1.0..2.0);
        v.iter_mut().for_each(|x| *x *= speed / n);
        if DispersionRelation::wave(d).find_critical_points(&v, 1e-9).unwrap().is_empty() {
            empty += 1;
        }
    }
    (agree == total && empty == 1000, format!("{agree}/{total} labels agree over {} strata; {empty}/1000 fast velocities have no critical point", strata.len()))
}

fn c7_b0() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [3, 4] {
        let rel = DispersionRelation::wave(d);
        let a = rel.estimate_b0(64).unwrap();
        let b = rel.estimate_b0(128).unwrap();
        let stable = (a.sup - b.sup).abs() <= 1e-4;
        ok &= a.converged && b.converged && a.delta > 0.0 && stable;
        parts.push(format!("d={d}: sup={:.6} delta={:.6} (doubling change {:.1e})", b.sup, b.delta, (a.sup - b.sup).abs()));
    }
    (ok, parts.join("; "))
}

fn c8_corner_expansion() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [3, 4, 5] {
        let le = corner_expansion(d, 6).unwrap();
        let inside = le.remainder_in_h();
        ok &= inside;
        parts.push(format!("d={d} remainder in H: {inside}"));
    }
    let ct = corank_two_expansion_d4(1.0, 4).unwrap();
    let kernel = ct.kernel_residual == 0.0;
    ok &= kernel;
    parts.push(format!("kernel vectors exact: {kernel}"));
    let secs = t0.elapsed().as_secs_f64();
    (ok && secs < 10.0, format!("{} in {secs:.1}s", parts.join("; ")))
}

fn c9_inv_d() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let rel = DispersionRelation::wave(d);
        let ms: Vec<i64> = geometric_schedule(10.0, 100.0, 1.25).iter().map(|m| m.round() as i64).collect();
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for &m in &ms {
            let mut x = vec![0i64; d];
            x[0] = m;
            let k = inv_d_kernel(&rel, &x, OriginCutoff::default(), &QuadOptions::default()).unwrap();
            lx.push((m as f64).ln());
            ly.push(k.total.norm().ln());
        }
        let (_, slope, _) = linear_fit(&lx, &ly);
        let pass = (slope + (d as f64 - 1.0)).abs() <= 0.1;
        ok &= pass;
        parts.push(format!("d={d} exponent {slope:.4}"));
    }
    (ok, parts.join("; "))
}

fn random_field(d: usize, l: usize, rng: &mut ChaCha8Rng) -> LatticeField {
    let data: Vec<f64> = (0..l.pow(d as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LatticeField::from_real(d, l, &data).unwrap()
}

fn c10_space_time() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut parts = Vec::new();

    let rel = DispersionRelation::wave(3);
    let p = Propagator::new(&rel, 24);
    let s0 = EvolutionState { u: random_field(3, 24, &mut rng), ut: random_field(3, 24, &mut rng), t: 0.0 };
    let e0 = p.energy(&s0);
    let energy_err = [1.0, 7.5, 40.0]
        .iter()
        .map(|&t| (p.energy(&p.propagate(&s0.u, &s0.ut, t).unwrap()) - e0).abs() / e0)
        .fold(0.0, f64::max);
    let energy_ok = energy_err <= 1e-10;
    parts.push(format!("energy drift {energy_err:.1e}"));

    let f = random_field(3, 24, &mut rng);
    let n0 = f.lp_norm(2.0);
    let a = p.half_wave(&f, 3.0, 1.0).unwrap();
    let unit = (a.lp_norm(2.0) - n0).abs() / n0;
    let ab = p.half_wave(&a, 4.5, 1.0).unwrap();
    let direct = p.half_wave(&f, 7.5, 1.0).unwrap();
    let group = ab.max_abs_diff(&direct) / f.lp_norm(f64::INFINITY);
    let half_ok = unit <= 1e-12 && group <= 1e-12;
    parts.push(format!("half-wave unitarity {unit:.1e}, group law {group:.1e}"));

    // d = 4 columns on a 64^4 periodic box (t ≤ 40 wraps around: periodic surrogate)
    let (lplq_ok, lplq_text) = {
        let p4 = Propagator::new(&DispersionRelation::wave(4), 64);
        let times: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
        let tables = lplq_experiment(&p4, &LatticeField::delta(4, 64), &[(1.0, f64::INFINITY), (4.0 / 3.0, 4.0), (2.0, 2.0)], &times).unwrap();
        let ok = tables.iter().all(|t| t.bounded);
        let flags: Vec<String> = tables.iter().map(|t| format!("({},{}):{}", t.p, t.q, if t.bounded { "bounded" } else { "growing" })).collect();
        (ok, format!("lplq {}", flags.join(" ")))
    };
    parts.push(lplq_text);

    let ps = Propagator::new(&DispersionRelation::wave(4), 24);
    let times: Vec<f64> = (0..=64).map(|i| i as f64 * 0.25).collect();
    let st = strichartz_sample(&ps, 4.0, 4.0, &times, 50, 3, 10);
    let spread = st.max_ratio / st.min_ratio;
    let strichartz_ok = st.ratios.iter().all(|r| r.is_finite() && *r > 0.0) && spread <= 10.0;
    parts.push(format!("Strichartz ratio in [{:.4}, {:.4}]", st.min_ratio, st.max_ratio));

    let pn = Propagator::new(&DispersionRelation::wave(4), 32);
    let mut f0 = random_small_support(4, 32, 2, &mut rng);
    let l1 = f0.lp_norm(1.0);
    f0 = f0.map(|z| z * (1e-3 / l1));
    let zero = LatticeField::zeros(4, 32);
    let opts = NonlinearOptions { k: Some(4), dt: 0.1, t_end: 10.0, observe_every: 10, cap: 1e6 };
    let mut worst: f64 = 1.0;
    nonlinear_solve(&pn, &zero, &f0, &opts, |s| {
        if s.t > 0.0 {
            let lin = pn.propagate(&zero, &f0, s.t).unwrap().u.lp_norm(f64::INFINITY);
            let r = s.u.lp_norm(f64::INFINITY) / lin;
            worst = worst.max(r.max(1.0 / r));
        }
    })
    .unwrap();
    let nl_ok = worst <= 2.0;
    parts.push(format!("nonlinear/linear sup within factor {worst:.6}"));

    (energy_ok && half_ok && lplq_ok && strichartz_ok && nl_ok, parts.join("; "))
}

fn c11_probe() -> Outcome {
    let phase = parse_poly("x1*x2*x3 + x4^2").unwrap();
    let ts = geometric_schedule(10.0, 100.0, 1.1);
    let res = perturbation_probe(&phase, &AmplitudeSpec::Separable { radius: 2.0 }, &[0.05], 100, &ts, 11, &JOptions::default()).unwrap();
    let lvl = &res.levels[0];
    let s = DecaySamples::new(res.t.clone(), lvl.envelope.clone(), "probe").unwrap();
    let fit = fit_decay(&s, &FitOptions { envelope_window: Some(5), ..FitOptions::default() }).unwrap();
    let ok = fit.beta <= -1.4 && lvl.max_ratio <= 3.0;
    let alt = fit.candidates.iter().find(|c| c.p == 1).map(|c| format!(" (p=1 beta={:.4}, rms {:.2}x p=0)", c.beta, c.rms / fit.candidates[0].rms)).unwrap_or_default();
    (ok, format!("envelope beta={:.4} p={}{alt}, max envelope/unperturbed {:.3}", fit.beta, fit.p, lvl.max_ratio))
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Newton distances of the reference polynomials", c1_table2),
        ("Newton data of the conjugated phases", c2_conj_newton),
        ("model-phase decay suite", c3_model_suite),
        ("decay at stratum velocities", c4_table1),
        ("FFT propagator vs quadrature", c5_backends),
        ("critical-point classifier", c6_classifier),
        ("b0 gap", c7_b0),
        ("remainder membership and kernel vectors", c8_corner_expansion),
        ("1/D kernel decay", c9_inv_d),
        ("space-time suite", c10_space_time),
        ("perturbation stability probe", c11_probe),
    ];
    let mut passed = 0;
    let mut ran = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !selected.is_empty() && !selected.contains(&k) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(e) => (false, format!("panicked: {}", e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())),
        };
        passed += ok as usize;
        println!("criterion {k:>2} {}: {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {passed}/{ran} criteria pass");
}
