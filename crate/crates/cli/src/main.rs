use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sgen2_cli::{run, CliError, Command, InstanceConfig, NSetting};

/// Three-generator SL2 construction over S-integers of a number field.
#[derive(Parser)]
#[command(name = "sgen2", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Instance configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's h.
    #[arg(long)]
    h: Option<u64>,
    /// Overrides the config's N: a positive integer or "search".
    #[arg(long = "N", value_name = "INT|search")]
    n: Option<NSetting>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    timings: bool,
}

fn load(args: &Args) -> Result<Option<InstanceConfig>, CliError> {
    let Some(path) = &args.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = InstanceConfig::from_json(&text)?;
    if let Some(h) = args.h {
        if h == 0 {
            return Err(CliError::Config("h must be positive".into()));
        }
        cfg.h = h;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    Ok(Some(cfg))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|cfg| run(args.command, cfg.as_ref(), args.timings));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sgen2: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = outcome.report.to_json();
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                eprintln!("sgen2: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{json}"),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("sgen2: verification failed");
        ExitCode::from(3)
    }
}
