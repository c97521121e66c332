use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pollinate_cli::{cmd_oracle, cmd_run, cmd_sweep, cmd_validate, oracle_summary, summary, CliError, Common, SweepArgs};

/// Farmer-beekeeper pollination equilibria under policy scenarios.
#[derive(Parser)]
#[command(name = "pollinate", version)]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration and report every violation.
    Validate,
    /// Solve BAU and every selected scenario; write results.json, cells.csv, marginals.csv.
    Run,
    /// Re-run the suite over a range of one parameter; write sweep.csv.
    Sweep {
        #[arg(long, default_value = "p_osr")]
        param: String,
        #[arg(long, default_value_t = 300.0)]
        min: f64,
        #[arg(long, default_value_t = 400.0)]
        max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Compare the optimiser with an exhaustive lattice search; write oracle.csv.
    Oracle {
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = Common {
        config: cli.config,
        out: cli.out,
        threads: cli.threads,
    };
    let result: Result<(), CliError> = match &cli.command {
        Command::Validate => cmd_validate(&common).map(|_| println!("configuration is valid")),
        Command::Run => cmd_run(&common).map(|suite| print!("{}", summary(&suite))),
        Command::Sweep { param, min, max, steps } => {
            let args = SweepArgs {
                param: param.clone(),
                min: *min,
                max: *max,
                steps: *steps,
            };
            cmd_sweep(&common, &args).map(|points| println!("{} sweep points written", points.len()))
        }
        Command::Oracle { resolution } => cmd_oracle(&common, *resolution).map(|rows| print!("{}", oracle_summary(&rows))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
