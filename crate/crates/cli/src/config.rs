//! Flat `key = value` config files mirroring the command-line flags.
//!
//! Keys are flag names without the leading dashes (`t-max` and `t_max` are
//! equivalent); lists are comma separated; `#` starts a comment line.
//! Flags given on the command line win over file values.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SUBCOMMAND_KEY: &str = "subcommand";

/// Parsed config file, in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlatConfig {
    pub entries: Vec<(String, String)>,
}

impl FlatConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Validation(format!("config line {}: expected key = value", no + 1)));
            };
            let key = normalize_key(k.trim());
            if key.is_empty() {
                return Err(CliError::Validation(format!("config line {}: empty key", no + 1)));
            }
            let value = v.trim().to_string();
            match entries.iter_mut().find(|(ek, _)| *ek == key) {
                Some(e) => e.1 = value,
                None => entries.push((key, value)),
            }
        }
        Ok(FlatConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Flag tokens for every key not already present in `given`.
    pub fn to_args(&self, given: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        for (k, v) in &self.entries {
            if k == SUBCOMMAND_KEY || given.iter().any(|g| g == k) {
                continue;
            }
            match v.as_str() {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                _ => out.push(format!("--{k}={v}")),
            }
        }
        out
    }
}

pub fn normalize_key(k: &str) -> String {
    k.trim_start_matches('-').replace('_', "-")
}

/// Long flag names (normalized) appearing in an argument list.
pub fn given_flags(args: &[String]) -> Vec<String> {
    args.iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| normalize_key(a.split('=').next().unwrap_or(a)))
        .collect()
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => None,
        Value::Bool(b) => b.then(|| "true".to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if n.is_f64() => format_f64(f),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().filter_map(scalar).collect();
            (!parts.is_empty()).then(|| parts.join(","))
        }
        Value::Object(_) => None,
    }
}

/// Shortest representation that parses back to the same f64.
pub fn format_f64(f: f64) -> String {
    if f.is_infinite() {
        if f > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{f}")
    }
}

/// Renders a serializable argument struct as `key = value` lines.
pub fn dump<T: Serialize>(subcommand: &str, sections: &[&T]) -> String
where
    T: ?Sized,
{
    let mut map = BTreeMap::new();
    for s in sections {
        if let Ok(Value::Object(obj)) = serde_json::to_value(s) {
            for (k, v) in obj {
                if let Some(text) = scalar(&v) {
                    map.insert(normalize_key(&k), text);
                }
            }
        }
    }
    let mut out = format!("{SUBCOMMAND_KEY} = {subcommand}\n");
    for (k, v) in map {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}
