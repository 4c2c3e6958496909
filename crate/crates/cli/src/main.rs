// Negated float comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;
mod manifest;

use std::io::Write;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use config::FlatConfig;
use error::CliError;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(run(argv));
}

/// Runs the driver and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Splices `--config FILE` entries into argv just after the subcommand,
/// skipping keys that are also given as flags.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Validation(format!("cannot read config {path}: {e}")))?;
    let cfg = FlatConfig::parse(&text)?;
    let given = config::given_flags(&argv);
    let extra = cfg.to_args(&given);
    let names = args::subcommand_names();
    let mut out = argv;
    let pos = out.iter().skip(1).position(|a| names.contains(&a.as_str())).map(|p| p + 1);
    let insert_at = match pos {
        Some(p) => p + 1,
        None => {
            let Some(sub) = cfg.get(config::SUBCOMMAND_KEY) else {
                return Err(CliError::Validation("no subcommand given on the command line or in the config".into()));
            };
            out.push(sub.to_string());
            out.len()
        }
    };
    out.splice(insert_at..insert_at, extra);
    Ok(out)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if cli.global.dump_config {
        print!("{}", cli.dump_config());
        return Ok(());
    }
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Validation(e.to_string()))?;
    }
    let start = Instant::now();
    let outcome = commands::dispatch(&cli.command)?;
    let mut outputs = outcome.files.clone();
    match &cli.global.out {
        Some(path) => {
            std::fs::write(path, &outcome.content)?;
            outputs.insert(0, path.clone());
            println!("{}", outcome.summary);
        }
        None => {
            std::io::stdout().write_all(outcome.content.as_bytes())?;
            eprintln!("{}", outcome.summary);
        }
    }
    if let Some(path) = &cli.global.manifest {
        let doc = manifest::emit_manifest(cli, &outputs, start.elapsed().as_secs_f64(), outcome.results.clone())?;
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    }
    if let Some(msg) = outcome.failed {
        return Err(CliError::Failure(msg));
    }
    Ok(())
}
