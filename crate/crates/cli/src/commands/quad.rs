use rayon::prelude::*;
use serde_json::json;

use latticewave::bump::{AmplitudeSpec, OriginCutoff};
use latticewave::decayfit::{fit_decay, run_model_phase_suite, DecaySamples, FitOptions, ModelSuiteOptions};
use latticewave::dispersion::DispersionRelation;
use latticewave::oscquad::{cos_kernel, green_g, model_phase_catalog, oscint_i, oscint_j, perturbation_probe, JOptions, QuadOptions};
use latticewave::polynewton::parse_poly;

use super::{csv_header, fmt, join, schedule, Outcome};
use crate::args::{Amplitude, GreenArgs, JphaseArgs, Kernel, OscintArgs, ProbeArgs};
use crate::error::CliError;

pub fn green(a: &GreenArgs) -> Result<Outcome, CliError> {
    let rel = DispersionRelation::new(a.dim, a.mass)?;
    let opts = QuadOptions { rtol: a.rtol, budget: a.budget, ..QuadOptions::default() };
    let points: Vec<(u64, f64, Vec<i64>)> = match (&a.ray, &a.x) {
        (Some(w), None) => {
            if w.len() != a.dim || w.iter().all(|&c| c == 0) {
                return Err(CliError::Validation(format!("--ray needs {} components, not all zero", a.dim)));
            }
            if !(a.speed > 0.0 && a.speed < 1.0) || a.mmin > a.mmax {
                return Err(CliError::Validation("need 0 < speed < 1 and mmin <= mmax".into()));
            }
            let wn = w.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
            (a.mmin..=a.mmax).map(|m| (m, m as f64 * wn / a.speed, w.iter().map(|&c| c * m as i64).collect())).collect()
        }
        (None, Some(x)) => {
            if x.len() != a.dim {
                return Err(CliError::Validation(format!("--x needs {} components", a.dim)));
            }
            let ts = a.t.clone().ok_or_else(|| CliError::Validation("--x needs --t".into()))?;
            ts.into_iter().map(|t| (0, t, x.clone())).collect()
        }
        _ => return Err(CliError::Validation("give exactly one of --ray or --x".into())),
    };
    let values = points
        .par_iter()
        .map(|(_, t, x)| match a.kernel {
            Kernel::Green => green_g(&rel, x, *t, &opts),
            Kernel::Cos => cos_kernel(&rel, x, *t, &opts),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let xcols: Vec<String> = (1..=a.dim).map(|j| format!("x{j}")).collect();
    let mut cols = vec!["m", "t"];
    cols.extend(xcols.iter().map(String::as_str));
    cols.extend(["value", "n", "converged"]);
    let name = match a.kernel {
        Kernel::Green => "green",
        Kernel::Cos => "cos-kernel",
    };
    let mut out = csv_header(name, &[("d", a.dim.to_string()), ("mass", a.mass.to_string())], &cols);
    for ((m, t, x), r) in points.iter().zip(&values) {
        out.push_str(&format!("{m},{t},{},{},{},{}\n", join(x, ","), fmt(r.value.re), r.n, r.converged));
    }
    let peak = values.iter().map(|r| r.value.re.abs()).fold(0.0, f64::max);
    let summary = format!("{name}: {} points, d={}, max |value| = {peak:.6e}", points.len(), a.dim);
    Ok(Outcome::new(out, summary, json!({ "points": points.len(), "max_abs": peak })))
}

pub fn oscint(a: &OscintArgs) -> Result<Outcome, CliError> {
    let d = a.velocity.len();
    let rel = DispersionRelation::wave(d);
    let ts = schedule(&a.schedule.t, a.schedule.t_min, a.schedule.t_max, a.schedule.ratio)?;
    let opts = QuadOptions { rtol: a.rtol, budget: a.budget, ..QuadOptions::default() };
    let cutoff = OriginCutoff::new(a.cutoff);
    let rows = ts.par_iter().map(|&t| oscint_i(&rel, &a.velocity, t, cutoff, &opts)).collect::<Result<Vec<_>, _>>()?;
    let mut out = csv_header(
        "oscint",
        &[("d", d.to_string()), ("v", join(&a.velocity, " ")), ("cutoff", a.cutoff.to_string())],
        &["t", "re", "im", "abs", "abs_i1", "abs_i2"],
    );
    for (t, r) in ts.iter().zip(&rows) {
        out.push_str(&format!("{t},{},{},{},{},{}\n", fmt(r.total.re), fmt(r.total.im), fmt(r.total.norm()), fmt(r.i1.value.norm()), fmt(r.i2.value.norm())));
    }
    let summary = format!("oscint: {} times, d={d}, |I| at t={} is {:.6e}", ts.len(), ts[ts.len() - 1], rows[rows.len() - 1].total.norm());
    Ok(Outcome::new(out, summary, json!({ "times": ts.len() })))
}

fn amplitude(kind: Amplitude, radius: f64) -> Result<AmplitudeSpec, CliError> {
    if !(radius > 0.0) {
        return Err(CliError::Validation("--radius must be positive".into()));
    }
    Ok(match kind {
        Amplitude::Separable => AmplitudeSpec::Separable { radius },
        Amplitude::Radial => AmplitudeSpec::Radial { radius },
    })
}

pub fn jphase(a: &JphaseArgs) -> Result<Outcome, CliError> {
    let amp = amplitude(a.amplitude, a.radius)?;
    let ts = schedule(&a.schedule.t, a.schedule.t_min, a.schedule.t_max, a.schedule.ratio)?;
    let mut jopts = JOptions::default();
    jopts.quad.rtol = a.rtol;
    if a.suite {
        if a.poly.is_some() {
            return Err(CliError::Validation("--suite runs catalog phases; use --model to select them".into()));
        }
        let opts = ModelSuiteOptions { t: ts, radius: a.radius, names: a.model.clone().unwrap_or_default(), j: jopts, ..ModelSuiteOptions::default() };
        let rows = run_model_phase_suite(&opts)?;
        let mut out = csv_header("model-suite", &[("radius", a.radius.to_string())], &["phase", "beta", "p", "target_beta", "target_p", "resolved", "pass"]);
        for r in &rows {
            out.push_str(&format!("{},{:.6},{},{:.6},{},{},{}\n", r.name, r.fit.beta, r.fit.p, r.target_beta, r.target_p, r.fit.resolved, r.pass));
        }
        let passed = rows.iter().filter(|r| r.pass).count();
        let summary = format!("model suite: {passed}/{} phases pass", rows.len());
        let results = json!(rows.iter().map(|r| json!({"phase": r.name, "beta": r.fit.beta, "p": r.fit.p, "pass": r.pass})).collect::<Vec<_>>());
        let mut o = Outcome::new(out, summary, results);
        if passed < rows.len() {
            o.failed = Some(format!("{} of {} phases outside tolerance", rows.len() - passed, rows.len()));
        }
        return Ok(o);
    }
    let phases: Vec<(String, String)> = match (&a.poly, &a.model) {
        (Some(p), None) => vec![("poly".into(), p.clone())],
        (None, Some(names)) => {
            let cat = model_phase_catalog();
            names
                .iter()
                .map(|n| cat.iter().find(|m| &m.name == n).map(|m| (m.name.clone(), m.expr.clone())).ok_or_else(|| CliError::Validation(format!("unknown model phase {n}"))))
                .collect::<Result<_, _>>()?
        }
        _ => return Err(CliError::Validation("give exactly one of --poly or --model (or --suite)".into())),
    };
    let mut out = csv_header("jphase", &[("amplitude", format!("{:?}", a.amplitude).to_lowercase()), ("radius", a.radius.to_string())], &["phase", "t", "re", "im", "abs"]);
    let mut fits = Vec::new();
    for (name, expr) in &phases {
        let poly = parse_poly(expr)?;
        let vals = ts.par_iter().map(|&t| oscint_j(&poly, &amp, t, &jopts)).collect::<Result<Vec<_>, _>>()?;
        for (t, r) in ts.iter().zip(&vals) {
            out.push_str(&format!("{name},{t},{},{},{}\n", fmt(r.value.re), fmt(r.value.im), fmt(r.value.norm())));
        }
        let samples = DecaySamples::new(ts.clone(), vals.iter().map(|r| r.value.norm()).collect(), name.clone());
        if let Ok(fit) = samples.and_then(|s| fit_decay(&s, &FitOptions::default())) {
            fits.push(json!({"phase": name, "beta": fit.beta, "p": fit.p}));
        }
    }
    let summary = format!("jphase: {} phase(s) x {} times{}", phases.len(), ts.len(), fits.first().map(|f| format!(", fit beta = {:.4}", f["beta"].as_f64().unwrap_or(f64::NAN))).unwrap_or_default());
    Ok(Outcome::new(out, summary, json!(fits)))
}

pub fn probe(a: &ProbeArgs) -> Result<Outcome, CliError> {
    let poly = parse_poly(&a.poly)?;
    let ts = schedule(&None, a.t_min, a.t_max, a.ratio)?;
    let amp = AmplitudeSpec::Separable { radius: a.radius };
    let res = perturbation_probe(&poly, &amp, &a.eps, a.count, &ts, a.seed, &JOptions::default())?;
    let mut levels = Vec::new();
    for lvl in &res.levels {
        let s = DecaySamples::new(res.t.clone(), lvl.envelope.clone(), format!("eps={}", lvl.eps))?;
        let fit = fit_decay(&s, &FitOptions { envelope_window: Some(a.window), ..FitOptions::default() })?;
        levels.push(json!({"eps": lvl.eps, "beta": fit.beta, "p": fit.p, "max_ratio": lvl.max_ratio, "envelope": lvl.envelope}));
    }
    let doc = json!({"poly": a.poly, "count": a.count, "seed": a.seed, "t": res.t, "unperturbed": res.unperturbed, "levels": levels});
    let last = levels.last().cloned().unwrap_or_default();
    let summary = format!(
        "probe: {} perturbations, eps = {}, envelope beta = {:.4}, max ratio = {:.3}",
        a.count,
        join(&a.eps, ","),
        last["beta"].as_f64().unwrap_or(f64::NAN),
        last["max_ratio"].as_f64().unwrap_or(f64::NAN)
    );
    let results = json!(levels.iter().map(|l| json!({"eps": l["eps"], "beta": l["beta"], "max_ratio": l["max_ratio"]})).collect::<Vec<_>>());
    Ok(Outcome::new(super::json(&doc)?, summary, results))
}
