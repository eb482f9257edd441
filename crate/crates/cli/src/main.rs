use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use holocontact_cli::{run_with_env, InputError, RunConfig, Task, EXIT_INPUT};

const TOLERANCE_ENV: &str = "HOLOCONTACT_TOLERANCE";

/// Decide order-n contact between Hermitian holomorphic bundles given by Gram expressions.
#[derive(Debug, Parser)]
#[command(name = "holocontact", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the task named in the config.
    #[arg(long, value_enum)]
    task: Option<Task>,
    #[arg(long)]
    order: Option<usize>,
    /// Overrides the config; HOLOCONTACT_TOLERANCE is used when neither is set.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &Args) -> Result<(RunConfig, Option<f64>), InputError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| InputError::new(format!("{}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_toml(&text).map_err(|e| InputError::new(format!("{}: {e}", args.config.display())))?;
    if let Some(t) = args.task {
        cfg.task = t;
    }
    if let Some(n) = args.order {
        cfg.order = n;
    }
    if args.tolerance.is_some() {
        cfg.tolerance = args.tolerance;
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if args.out.is_some() {
        cfg.out.clone_from(&args.out);
    }
    let env_tol = match std::env::var(TOLERANCE_ENV) {
        Ok(v) => Some(v.trim().parse::<f64>().map_err(|e| InputError::new(format!("{TOLERANCE_ENV}='{v}': {e}")))?),
        Err(_) => None,
    };
    Ok((cfg, env_tol))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|(cfg, env_tol)| {
        let doc = run_with_env(&cfg, env_tol)?;
        let body = doc.to_json();
        match &doc.config.out {
            Some(path) => std::fs::write(path, body + "\n")
                .map_err(|e| InputError::new(format!("writing {}: {e}", path.display())))?,
            None => println!("{body}"),
        }
        Ok(doc.exit_code())
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
