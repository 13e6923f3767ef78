//! `ldgeom`: run volume, rate, sampling, spectral, projection and verification
//! experiments from flags or a JSON config, writing `<command>.csv` and
//! `<command>.json` into the output directory.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use commands::{Failure, Output};
use config::{Command, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "ldgeom", version, about = "Large deviations experiments for high-dimensional convex bodies")]
struct Cli {
    /// Subcommand; may instead come from the config file
    command: Option<Command>,
    /// JSON config, or a previous run summary to replay
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ExperimentConfig,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_FLAGGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(EXIT_CONFIG, &e),
        },
        None => ExperimentConfig::default(),
    };
    let mut cfg = base.overlay(&cli.flags);
    if cli.command.is_some() {
        cfg.command = cli.command;
    }
    cfg.seed = Some(cfg.seed.unwrap_or(0));
    let Some(cmd) = cfg.command else {
        return fail(EXIT_CONFIG, "no command given (volume, rate, sample, spectral, project or verify)");
    };
    let out_dir = cfg
        .output
        .clone()
        .or_else(|| std::env::var_os("LDGEOM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let result = match cfg.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::run(cmd, &cfg)),
            Err(e) => return fail(1, &format!("cannot start {t} threads: {e}")),
        },
        None => commands::run(cmd, &cfg),
    };
    let out = match result {
        Ok(o) => o,
        Err(Failure::Config(e)) => return fail(EXIT_CONFIG, &e),
        Err(Failure::Runtime(e)) => return fail(1, &e),
    };

    let summary = summary(cmd, &cfg, &out);
    if let Err(e) = write_outputs(&out_dir, cmd, &out, &summary) {
        return fail(1, &e);
    }
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    if cfg.strict.unwrap_or(false) && out.flags.iter().any(|f| f.is_failure()) {
        eprintln!("error: result carries failure flags");
        return ExitCode::from(EXIT_FLAGGED);
    }
    ExitCode::SUCCESS
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn summary(cmd: Command, cfg: &ExperimentConfig, out: &Output) -> Value {
    json!({
        "ldgeom_summary": true,
        "command": cmd.to_string(),
        "inputs": cfg,
        "flags": out.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "results": out.results,
    })
}

fn write_outputs(dir: &Path, cmd: Command, out: &Output, summary: &Value) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let csv_path = dir.join(format!("{cmd}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    w.write_record(&out.header).map_err(|e| e.to_string())?;
    for row in &out.rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    let json_path = dir.join(format!("{cmd}.json"));
    let text = serde_json::to_string_pretty(summary).expect("summary serializes");
    std::fs::write(&json_path, text + "\n").map_err(|e| format!("{}: {e}", json_path.display()))
}
