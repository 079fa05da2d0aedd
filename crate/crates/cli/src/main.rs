//! `unrect`: run configurations against the exact engine and write
//! JSON-lines records (exact `"p/q"` fields plus `*_f64` companions).
//!
//! Exit codes: 0 success, 1 malformed configuration, 2 a validation or
//! diagnostic check failed, 3 a piece / cell budget was exceeded.

mod cache;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use cache::Cache;
use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "unrect", version, about = "Exact experiments on sawtooth-series sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the parameter constraints
    Validate(RunArgs),
    /// Truncated points at the listed parameter values
    Evaluate(RunArgs),
    /// Exact image measures and the certified bracket for one functional
    Measure(RunArgs),
    /// Brackets for a list of planar directions
    Scan(RunArgs),
    /// Polygonal curve and its length ledger (l1 model)
    Curve(RunArgs),
    /// Run one diagnostic check
    Diagnose(RunArgs),
    /// Run the command named in the config
    Run(RunArgs),
    /// Convert a record file to CSV or a JSON array
    Emit(EmitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; omitted keys take their defaults
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Truncation level
    #[arg(short = 'n', long)]
    level: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Diagnostic check name
    #[arg(long)]
    check: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EmitArgs {
    /// JSON-lines record file
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn load_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(e, path))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    if args.level.is_some() {
        cfg.options.level = args.level;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.check.is_some() {
        cfg.options.check = args.check.clone();
    }
    Ok(cfg)
}

fn execute(command: &str, cfg: &RunConfig) -> Result<Vec<Value>, CliError> {
    let start = Instant::now();
    // CSV side outputs and timings are not cached.
    let cache = cfg
        .cache_dir
        .as_deref()
        .filter(|_| !cfg.record_timing && cfg.options.csv.is_none())
        .map(Cache::new);
    let material = cfg.cache_key_material(command)?;
    let mut records = match cache.as_ref().and_then(|c| c.load(&material)) {
        Some(hit) => hit,
        None => {
            let outcome = commands::run(command, cfg)?;
            if let Some((path, bytes)) = &outcome.csv {
                output::write_bytes(Some(path), bytes)?;
            }
            if let Some(c) = &cache {
                c.store(&material, &outcome.records)?;
            }
            outcome.records
        }
    };
    let elapsed = cfg.record_timing.then(|| Value::from(start.elapsed().as_millis() as u64));
    for r in &mut records {
        if let Value::Object(map) = r {
            map.insert("wall_time_ms".into(), elapsed.clone().unwrap_or(Value::Null));
        }
    }
    Ok(records)
}

fn run_command(command: &str, args: &RunArgs) -> Result<(), CliError> {
    let cfg = load_config(args)?;
    let command = match command {
        "run" => cfg
            .command
            .clone()
            .ok_or_else(|| CliError::config("config has no command"))?,
        c => c.to_string(),
    };
    if !commands::COMMANDS.contains(&command.as_str()) {
        return Err(CliError::config(format!("unknown command {command:?}")));
    }
    let records = execute(&command, &cfg)?;
    output::write_bytes(cfg.out.as_deref(), output::to_jsonl(&records).as_bytes())?;
    let failed: Vec<String> = records
        .iter()
        .filter(|r| r.get("passed") == Some(&Value::Bool(false)))
        .map(|r| r.get("record").and_then(Value::as_str).unwrap_or("record").to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::failed(format!("failed: {}", failed.join(", "))))
    }
}

fn emit(args: &EmitArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| CliError::io(e, &args.input))?;
    let records = output::parse_jsonl(&text)?;
    let bytes = match args.format {
        Format::Csv => output::records_to_csv(&records)?,
        Format::Json => output::records_to_json(&records),
    };
    output::write_bytes(args.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(err.exit_code);
        }
    };
    let result = match &cli.command {
        Command::Validate(a) => run_command("validate", a),
        Command::Evaluate(a) => run_command("evaluate", a),
        Command::Measure(a) => run_command("measure", a),
        Command::Scan(a) => run_command("scan", a),
        Command::Curve(a) => run_command("curve", a),
        Command::Diagnose(a) => run_command("diagnose", a),
        Command::Run(a) => run_command("run", a),
        Command::Emit(a) => emit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code)
        }
    }
}
