//! `rswlab run|validate|render <config.json>`
//!
//! Exit status: 0 on success, 2 when an inequality check is flagged as
//! violated, 1 on any error. `RSWLAB_THREADS` caps the worker pool.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rswlab_core::runner::{self, RunConfig};

#[derive(Parser)]
#[command(name = "rswlab", version, about = "Crossing-probability experiments for planar sign fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in the config (an object or an array of objects).
    Run { config: PathBuf },
    /// Print diagnostics; exits 0 iff the config would run.
    Validate { config: PathBuf },
    /// Sample the model once and write a PPM image.
    Render { config: PathBuf },
}

fn load(path: &Path) -> Result<Vec<RunConfig>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    runner::parse_configs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("RSWLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().with_context(|| format!("RSWLAB_THREADS={v:?} is not a number"))?;
    if n == 0 {
        bail!("RSWLAB_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    init_threads()?;
    match cmd {
        Command::Run { config } => {
            let configs = load(&config)?;
            let mut bad = false;
            for c in &configs {
                for d in runner::validate(c) {
                    eprintln!("{}: {}: {}", c.experiment, d.field, d.message);
                    bad = true;
                }
            }
            if bad {
                bail!("invalid config; see `rswlab validate`");
            }
            let out = runner::run(&configs)?;
            for r in &out.records {
                match (r.value, r.stderr) {
                    (Some(v), Some(se)) => println!("{} [{}] {v:.6} ± {se:.6}", r.experiment, r.task),
                    _ => println!("{} [{}] done", r.experiment, r.task),
                }
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if out.violations > 0 {
                eprintln!("{} inequality violation(s) flagged", out.violations);
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let configs = match runner::parse_configs(&text) {
                Ok(c) => c,
                Err(e) => {
                    println!("config: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let mut n = 0;
            for c in &configs {
                for d in runner::validate(c) {
                    println!("{}: {}: {}", c.experiment, d.field, d.message);
                    n += 1;
                }
            }
            Ok(if n == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Render { config } => {
            for c in load(&config)? {
                let path = runner::render(&c)?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
