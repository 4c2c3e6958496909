use serde_json::json;

use latticewave::decayfit::{run_conj_suite, RaySuiteOptions};
use latticewave::dispersion::DispersionRelation;
use latticewave::oscquad::QuadOptions;
use latticewave::polynewton::{
    build_conj_phase, check_r_nondegenerate, newton_data, parse_poly, rat_string, NewtonDataJson, SamplerOptions,
};

use super::{json, Outcome};
use crate::args::{B0Args, ConjArgs, CriticalArgs, NewtonArgs, Table2Args};
use crate::error::CliError;

pub fn critical(a: &CriticalArgs) -> Result<Outcome, CliError> {
    match (&a.velocity, &a.xi) {
        (Some(v), None) => {
            let rel = DispersionRelation::wave(v.len());
            let pts = rel.find_critical_points(v, a.tol)?;
            let labels: Vec<String> = pts.iter().map(|p| p.label.to_string()).collect();
            let summary = format!("critical: {} point(s) for v = {:?} [{}]", pts.len(), v, labels.join(" "));
            Ok(Outcome::new(json(&pts)?, summary, json!({ "count": pts.len(), "labels": labels })))
        }
        (None, Some(xi)) => {
            let rel = DispersionRelation::wave(xi.len());
            let cp = rel.classify(xi, a.tol)?;
            let summary = format!("critical: corank {} label {}", cp.corank, cp.label);
            Ok(Outcome::new(json(&cp)?, summary, json!({ "corank": cp.corank, "label": cp.label.to_string() })))
        }
        _ => Err(CliError::Validation("give exactly one of --velocity or --xi".into())),
    }
}

pub fn b0(a: &B0Args) -> Result<Outcome, CliError> {
    let rel = DispersionRelation::wave(a.dim);
    let est = rel.estimate_b0(a.grid_density)?;
    let summary = format!("b0: d={} sup |grad omega| on strata = {:.8}, delta = {:.8}, converged = {}", a.dim, est.sup, est.delta, est.converged);
    let mut o = Outcome::new(json(&est)?, summary, json!({ "sup": est.sup, "delta": est.delta, "converged": est.converged }));
    if !est.converged {
        o.failed = Some(format!("sup moved by {:.3e} under grid doubling", est.refinement_change));
    }
    Ok(o)
}

pub fn newton(a: &NewtonArgs) -> Result<Outcome, CliError> {
    let poly = parse_poly(&a.poly)?;
    let nd = newton_data(&poly)?;
    let view = NewtonDataJson::from(&nd);
    let verdicts = if a.nondegeneracy { Some(check_r_nondegenerate(&poly, &SamplerOptions::default())?) } else { None };
    let doc = json!({ "poly": a.poly, "newton": view, "nondegeneracy": verdicts });
    let summary = format!("newton: d_S = {}, k_S = {}", view.d_s, view.k_s);
    Ok(Outcome::new(json(&doc)?, summary, json!({ "d_s": view.d_s, "k_s": view.k_s })))
}

pub fn conj(a: &ConjArgs) -> Result<Outcome, CliError> {
    let cp = build_conj_phase(a.dim, a.degree)?;
    let d_s = rat_string(&cp.newton.d_s);
    let containments: Vec<_> = cp
        .containments
        .iter()
        .map(|c| json!({"label": c.label, "relative_interior": c.relative_interior, "avoids_compact_faces": c.avoids_compact_faces, "offenders": c.offenders}))
        .collect();
    let fit = if a.no_fit {
        None
    } else {
        let opts = RaySuiteOptions { quad: QuadOptions { rtol: a.rtol, ..QuadOptions::default() }, ..RaySuiteOptions::default() };
        Some(run_conj_suite(a.dim, a.t_max, 0.1, &opts)?)
    };
    let doc = json!({
        "d": a.dim,
        "d_s": d_s,
        "k_s": cp.newton.k_s,
        "lambda0": rat_string(&cp.lambda0),
        "principal": cp.principal.to_string(),
        "principal_identity": cp.principal_identity,
        "combination_verified": cp.combination_verified,
        "containments": containments,
        "fit": fit.as_ref().map(|r| json!({"beta": r.fit.beta, "p": r.fit.p, "target_beta": r.target_beta, "pass": r.pass, "t": r.samples.t, "magnitude": r.samples.m})),
    });
    let mut summary = format!("d_S = {d_s}, k_S = {}", cp.newton.k_s);
    if let Some(r) = &fit {
        summary.push_str(&format!(", fit β = {:.2}", r.fit.beta));
    }
    let results = json!({"d_s": d_s, "k_s": cp.newton.k_s, "beta": fit.as_ref().map(|r| r.fit.beta)});
    Ok(Outcome::new(json(&doc)?, summary, results))
}

/// Reference polynomials with their exact Newton distance and multiplicity.
pub const TABLE2: [(&str, &str, usize); 4] = [("x1^3", "3", 1), ("x1^2 + x1*x2^2", "4/3", 1), ("x1^2*x2 - x2^3", "3/2", 1), ("x1*x2*x3", "1", 3)];

pub fn table2(_: &Table2Args) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut all = true;
    for (expr, d_s, k_s) in TABLE2 {
        let nd = newton_data(&parse_poly(expr)?)?;
        let got = rat_string(&nd.d_s);
        let ok = got == d_s && nd.k_s == k_s;
        all &= ok;
        rows.push(json!({
            "poly": expr,
            "expected": {"d_s": d_s, "k_s": k_s},
            "computed": {"d_s": got, "k_s": nd.k_s},
            "status": if ok { "exact match" } else { "mismatch" },
        }));
    }
    let matches = rows.iter().filter(|r| r["status"] == "exact match").count();
    let summary = format!("table2: {matches}/4 exact matches");
    let mut o = Outcome::new(json(&rows)?, summary, json!(rows));
    if !all {
        o.failed = Some("Newton distances differ from the reference values".into());
    }
    Ok(o)
}
