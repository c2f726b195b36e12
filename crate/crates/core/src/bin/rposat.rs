use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use rposat::experiment::{compare, run_batch, ExperimentConfig, Overrides};
use rposat::{Error, Result};

#[derive(Parser)]
#[command(name = "rposat", version, about = "Run and compare tabular policy-optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (agent, seed) pair of a config and write CSVs, summaries and an index.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        episodes: Option<usize>,
        /// Comma-separated seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        bonus_scale: Option<f64>,
        /// Log every m-th episode.
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Tabulate per-agent medians and IQRs across run directories.
    Compare {
        #[arg(required = true)]
        run_dirs: Vec<PathBuf>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and validate a config without running it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            episodes,
            seeds,
            output_dir,
            bonus_scale,
            stride,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            cfg.apply(&Overrides {
                episodes,
                seeds,
                output_dir,
                bonus_scale,
                log_stride: stride,
            });
            let index = run_batch(&cfg)?;
            let out = json!({
                "output_dir": cfg.output_dir,
                "config_hash": index.config_hash,
                "runs": index.runs.len(),
                "agents": index.agents,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Compare { run_dirs, output } => {
            let table = compare(&run_dirs)?;
            match output {
                Some(path) => {
                    let f = fs::File::create(&path).map_err(|e| Error::Io {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    table.write_csv(BufWriter::new(f))?;
                }
                None => table.write_csv(io::stdout().lock())?,
            }
        }
        Command::ValidateConfig { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            cfg.validate()?;
            println!("{}", json!({ "valid": true, "config_hash": cfg.config_hash() }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let field = match &e {
                Error::Config { field, .. } => json!(field),
                _ => json!(null),
            };
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string(), "field": field }));
            ExitCode::from(2)
        }
    }
}
