use num_complex::Complex64;
use serde_json::json;

use latticewave::dispersion::DispersionRelation;
use latticewave::evolve::{
    lplq_experiment, nonlinear_solve, require_box, strichartz_sample, write_lplq_csv, LatticeField, NonlinearOptions, Propagator,
};

use super::{csv_header, fmt, join, json, Outcome};
use crate::args::{EvolveArgs, LplqArgs, NonlinearArgs, StrichartzArgs};
use crate::error::CliError;

fn check_box(dim: usize, side: usize) -> Result<(), CliError> {
    if dim == 0 || side < 2 {
        return Err(CliError::Validation("need dim >= 1 and side >= 2".into()));
    }
    let sites = (side as f64).powi(dim as i32);
    if sites > 6.4e7 {
        return Err(CliError::Failure(format!("a {side}^{dim} box has {sites:.3e} sites, above the 6.4e7 memory budget")));
    }
    Ok(())
}

fn load_field(spec: &str, dim: usize, side: usize) -> Result<LatticeField, CliError> {
    let f = match spec {
        "zero" => LatticeField::zeros(dim, side),
        "delta" => LatticeField::delta(dim, side),
        path => {
            let mut file = std::fs::File::open(path).map_err(|e| CliError::Validation(format!("cannot open field {path}: {e}")))?;
            LatticeField::read_binary(&mut file)?
        }
    };
    if f.dim() != dim || f.side() != side {
        return Err(CliError::Validation(format!("field {spec} is {}^{}, expected {side}^{dim}", f.side(), f.dim())));
    }
    Ok(f)
}

pub fn evolve(a: &EvolveArgs) -> Result<Outcome, CliError> {
    check_box(a.dim, a.side)?;
    let rel = DispersionRelation::new(a.dim, a.mass)?;
    let t_last = a.t.iter().cloned().fold(0.0, |m: f64, t| m.max(t.abs()));
    if !a.periodic {
        require_box(a.side, t_last)?;
    }
    let f = load_field(&a.f, a.dim, a.side)?;
    let g = load_field(&a.g, a.dim, a.side)?;
    let p = Propagator::new(&rel, a.side);
    let mut out = csv_header(
        "evolve",
        &[("d", a.dim.to_string()), ("L", a.side.to_string()), ("mass", a.mass.to_string())],
        &["t", "sup_u", "l2_u", "energy"],
    );
    let mut last = None;
    for &t in &a.t {
        let s = p.propagate(&g, &f, t)?;
        out.push_str(&format!("{t},{},{},{}\n", fmt(s.u.lp_norm(f64::INFINITY)), fmt(s.u.lp_norm(2.0)), fmt(p.energy(&s))));
        last = Some(s);
    }
    let mut o = Outcome::new(out, format!("evolve: d={} L={} at {} times", a.dim, a.side, a.t.len()), json!({ "times": a.t }));
    if let (Some(path), Some(s)) = (&a.save, last) {
        let mut file = std::fs::File::create(path)?;
        s.u.write_binary(&mut file)?;
        o.files.push(path.clone());
    }
    Ok(o)
}

fn parse_exponent(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    let bad = || CliError::Validation(format!("bad exponent {s}"));
    let v = match s.split_once('/') {
        Some((n, d)) => n.trim().parse::<f64>().map_err(|_| bad())? / d.trim().parse::<f64>().map_err(|_| bad())?,
        None => s.parse::<f64>().map_err(|_| bad())?,
    };
    if !(v >= 1.0) {
        return Err(bad());
    }
    Ok(v)
}

pub fn parse_pairs(pairs: &[String]) -> Result<Vec<(f64, f64)>, CliError> {
    pairs
        .iter()
        .map(|s| {
            let (p, q) = s.split_once(':').ok_or_else(|| CliError::Validation(format!("pair {s} is not p:q")))?;
            Ok((parse_exponent(p)?, parse_exponent(q)?))
        })
        .collect()
}

pub fn lplq(a: &LplqArgs) -> Result<Outcome, CliError> {
    check_box(a.dim, a.side)?;
    if a.steps < 2 || !(a.t_max > a.t_min) {
        return Err(CliError::Validation("need steps >= 2 and t-max > t-min".into()));
    }
    let pairs = parse_pairs(&a.pairs)?;
    let times: Vec<f64> = (0..a.steps).map(|i| a.t_min + (a.t_max - a.t_min) * i as f64 / (a.steps - 1) as f64).collect();
    let p = Propagator::new(&DispersionRelation::wave(a.dim), a.side);
    let tables = lplq_experiment(&p, &LatticeField::delta(a.dim, a.side), &pairs, &times)?;
    let mut buf = Vec::new();
    for t in &tables {
        write_lplq_csv(&mut buf, t, a.dim, a.side)?;
    }
    let flags: Vec<String> = tables.iter().map(|t| format!("({},{})={}", t.p, t.q, if t.bounded { "bounded" } else { "growing" })).collect();
    let summary = format!("lplq: d={} L={} {}", a.dim, a.side, flags.join(" "));
    let results = json!(tables.iter().map(|t| json!({"p": t.p, "q": t.q, "target": t.target, "bounded": t.bounded})).collect::<Vec<_>>());
    Ok(Outcome::new(String::from_utf8(buf).expect("csv is utf-8"), summary, results))
}

pub fn strichartz(a: &StrichartzArgs) -> Result<Outcome, CliError> {
    check_box(a.dim, a.side)?;
    if !(a.dt > 0.0 && a.t_max > 0.0) || a.count == 0 || a.support == 0 || a.support > a.side {
        return Err(CliError::Validation("need dt, t-max > 0, count >= 1 and 1 <= support <= side".into()));
    }
    let n = (a.t_max / a.dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * a.dt).collect();
    let p = Propagator::new(&DispersionRelation::wave(a.dim), a.side);
    let s = strichartz_sample(&p, a.q, a.r, &times, a.count, a.support, a.seed);
    let summary = format!("strichartz: {} samples, ratio in [{:.6}, {:.6}]", a.count, s.min_ratio, s.max_ratio);
    Ok(Outcome::new(json(&s)?, summary, json!({ "max_ratio": s.max_ratio, "min_ratio": s.min_ratio })))
}

pub fn nonlinear(a: &NonlinearArgs) -> Result<Outcome, CliError> {
    check_box(a.dim, a.side)?;
    let p = Propagator::new(&DispersionRelation::wave(a.dim), a.side);
    let mut f = LatticeField::zeros(a.dim, a.side);
    f.set(&vec![0; a.dim], Complex64::new(a.l1, 0.0));
    let g = LatticeField::zeros(a.dim, a.side);
    let opts = NonlinearOptions { k: Some(a.k), dt: a.dt, t_end: a.t_end, observe_every: a.observe_every, cap: a.cap };
    let mut rows: Vec<(f64, f64)> = Vec::new();
    nonlinear_solve(&p, &g, &f, &opts, |s| rows.push((s.t, s.u.lp_norm(f64::INFINITY))))?;
    let mut out = csv_header(
        "nonlinear",
        &[("d", a.dim.to_string()), ("L", a.side.to_string()), ("k", a.k.to_string()), ("l1", a.l1.to_string())],
        &["t", "sup_nonlinear", "sup_linear", "ratio"],
    );
    let mut worst: f64 = 1.0;
    for &(t, nl) in &rows {
        let lin = p.propagate(&g, &f, t)?.u.lp_norm(f64::INFINITY);
        let ratio = if lin > 0.0 { nl / lin } else if nl == 0.0 { 1.0 } else { f64::INFINITY };
        if t > 0.0 {
            worst = worst.max(ratio.max(1.0 / ratio));
        }
        out.push_str(&format!("{t},{},{},{}\n", fmt(nl), fmt(lin), fmt(ratio)));
    }
    let summary = format!("nonlinear: k={} ||f||_1={} worst sup ratio vs linear = {:.6} over {} observations", a.k, a.l1, worst, rows.len());
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(Outcome::new(out, summary, json!({ "worst_ratio": worst, "observed": join(&times, " ") })))
}
