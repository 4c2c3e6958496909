mod algebra;
mod decay;
mod quad;
mod space;

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::Value;

use crate::args::Command;
use crate::error::CliError;

/// What a subcommand produced.
pub struct Outcome {
    /// Primary CSV or JSON document.
    pub content: String,
    /// One-line summary.
    pub summary: String,
    /// Compact JSON view for the manifest.
    pub results: Value,
    /// Additional files written by the command.
    pub files: Vec<PathBuf>,
    /// Set when a built-in check did not hold (exit 3 after writing outputs).
    pub failed: Option<String>,
}

impl Outcome {
    pub fn new(content: String, summary: String, results: Value) -> Self {
        Outcome { content, summary, results, files: Vec::new(), failed: None }
    }
}

pub fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Green(a) => quad::green(a),
        Command::Oscint(a) => quad::oscint(a),
        Command::Jphase(a) => quad::jphase(a),
        Command::Probe(a) => quad::probe(a),
        Command::Critical(a) => algebra::critical(a),
        Command::B0(a) => algebra::b0(a),
        Command::Newton(a) => algebra::newton(a),
        Command::Conj(a) => algebra::conj(a),
        Command::Table2(a) => algebra::table2(a),
        Command::Evolve(a) => space::evolve(a),
        Command::Lplq(a) => space::lplq(a),
        Command::Strichartz(a) => space::strichartz(a),
        Command::Nonlinear(a) => space::nonlinear(a),
        Command::DecayFit(a) => decay::decay_fit(a),
        Command::Table1(a) => decay::table1(a),
    }
}

/// `# latticewave v1, <name>, k=v, …` followed by the column line.
pub fn csv_header(name: &str, params: &[(&str, String)], columns: &[&str]) -> String {
    let mut s = format!("# latticewave v1, {name}");
    for (k, v) in params {
        let _ = write!(s, ", {k}={v}");
    }
    s.push('\n');
    s.push_str(&columns.join(","));
    s.push('\n');
    s
}

pub fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn schedule(explicit: &Option<Vec<f64>>, t_min: f64, t_max: f64, ratio: f64) -> Result<Vec<f64>, CliError> {
    if let Some(t) = explicit {
        if t.is_empty() || t.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Validation("--t needs finite values".into()));
        }
        return Ok(t.clone());
    }
    if !(t_min > 0.0 && t_max >= t_min && ratio > 1.0) {
        return Err(CliError::Validation(format!("need 0 < t-min <= t-max and ratio > 1, got {t_min}, {t_max}, {ratio}")));
    }
    Ok(latticewave::decayfit::geometric_schedule(t_min, t_max, ratio))
}

pub fn json(v: &impl serde::Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
