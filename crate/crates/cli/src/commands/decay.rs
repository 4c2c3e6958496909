use serde_json::json;

use latticewave::decayfit::{fit_decay, read_samples_csv, run_table1_suite, write_samples_csv, FitOptions, RaySuiteOptions};
use latticewave::oscquad::QuadOptions;

use super::{csv_header, json, Outcome};
use crate::args::{DecayFitArgs, Table1Args};
use crate::error::CliError;

pub fn decay_fit(a: &DecayFitArgs) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", a.input.display())))?;
    let samples = read_samples_csv(&text)?;
    let opts = FitOptions { p_candidates: a.p.clone(), t_min: a.t_min, envelope_window: a.envelope, target_p: a.target_p, dominance: a.dominance };
    let fit = fit_decay(&samples, &opts)?;
    let summary = format!("decay-fit: beta = {:.6}, p = {} ({}), {} samples", fit.beta, fit.p, fit.note, fit.samples_used);
    Ok(Outcome::new(json(&fit)?, summary, json!({ "beta": fit.beta, "p": fit.p, "resolved": fit.resolved })))
}

pub fn table1(a: &Table1Args) -> Result<Outcome, CliError> {
    let opts = RaySuiteOptions { quad: QuadOptions { rtol: a.rtol, ..QuadOptions::default() }, ..RaySuiteOptions::default() };
    let names = a.names.clone().unwrap_or_default();
    let rows = match a.t_max {
        None => run_table1_suite(a.dim, &names, &opts)?,
        Some(t_max) => {
            let mut cases = latticewave::decayfit::table1_cases(a.dim);
            if cases.is_empty() {
                return Err(CliError::Validation(format!("no cases for d={}", a.dim)));
            }
            cases.retain(|c| names.is_empty() || names.contains(&c.name));
            cases
                .iter_mut()
                .map(|c| {
                    c.t_max = t_max;
                    latticewave::decayfit::run_case(c, &opts, false)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    if rows.is_empty() {
        return Err(CliError::Validation("no matching strata".into()));
    }
    let mut out = csv_header("table1", &[("d", a.dim.to_string())], &["stratum", "beta", "p", "target_beta", "target_p", "tol", "resolved", "pass", "t_min", "t_max", "samples"]);
    for r in &rows {
        out.push_str(&format!(
            "{},{:.6},{},{:.6},{},{},{},{},{},{},{}\n",
            r.name, r.fit.beta, r.fit.p, r.target_beta, r.target_p, r.beta_tol, r.fit.resolved, r.pass, r.fit.t_range.0, r.fit.t_range.1, r.fit.samples_used
        ));
    }
    let mut o = Outcome::new(
        out,
        format!("table1: d={} {}", a.dim, rows.iter().map(|r| format!("{} beta={:.4} p={} {}", r.name, r.fit.beta, r.fit.p, if r.pass { "PASS" } else { "FAIL" })).collect::<Vec<_>>().join("; ")),
        json!(rows.iter().map(|r| json!({"stratum": r.name, "beta": r.fit.beta, "p": r.fit.p, "pass": r.pass})).collect::<Vec<_>>()),
    );
    if let Some(path) = &a.samples {
        let mut buf = Vec::new();
        for r in &rows {
            write_samples_csv(&mut buf, &r.samples)?;
        }
        std::fs::write(path, buf)?;
        o.files.push(path.clone());
    }
    Ok(o)
}
