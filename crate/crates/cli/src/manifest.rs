use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::Cli;
use crate::config::FlatConfig;
use crate::error::CliError;

#[derive(Debug, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// The resolved configuration, as the `--dump-config` key/value pairs.
    pub config: serde_json::Map<String, Value>,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputEntry>,
    pub results: Value,
}

pub fn sha256_file(path: &PathBuf) -> Result<(u64, String), CliError> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok((bytes.len() as u64, digest.iter().map(|b| format!("{b:02x}")).collect()))
}

pub fn emit_manifest(cli: &Cli, outputs: &[PathBuf], wall_time_s: f64, results: Value) -> Result<Manifest, CliError> {
    let flat = FlatConfig::parse(&cli.dump_config())?;
    let config = flat.entries.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let outputs = outputs
        .iter()
        .map(|p| {
            let (bytes, sha256) = sha256_file(p)?;
            Ok(OutputEntry { path: p.display().to_string(), bytes, sha256 })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Manifest {
        tool: "latticewave",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        config,
        wall_time_s,
        outputs,
        results,
    })
}
