use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use risbf::harness::{self, load_config_with_overrides};
use risbf::{upper_bound, Error, ImpairmentParams};

#[derive(Parser)]
#[command(name = "risbf", version, about = "RIS beamforming under hardware impairments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write summary, records and config sidecar.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the summary output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Set any config key, e.g. `--set solver.penalty_mu=20`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Suppress the summary table on stdout.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Parse and validate a config file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Print the high-SNR capacity bound in bits/s/Hz.
    Bound {
        /// Number of base-station antennas.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        rho_b: f64,
        #[arg(long)]
        rho_u: f64,
    },
}

fn exit_code(err: &Error) -> ExitCode {
    match err {
        Error::Validation { .. } | Error::Parse { .. } | Error::Parameter(_) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}

fn run(
    config: PathBuf,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    set: Vec<String>,
    quiet: bool,
) -> Result<(), Error> {
    let mut cfg = load_config_with_overrides(&config, &set)?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    if let Some(o) = out {
        cfg.output_path = o;
    }
    cfg.validate()?;
    let (summary, paths) = harness::run_and_emit(&cfg)?;
    if !quiet {
        println!("{:>10}  {:<12} {:>9} {:>9} {:>6} {:>6}", cfg.sweep_axis.as_str(), "method", "mean_se", "stderr", "ok", "failed");
        for r in &summary {
            println!(
                "{:>10}  {:<12} {:>9.4} {:>9.4} {:>6} {:>6}",
                r.sweep_value,
                r.method.as_str(),
                r.mean_se,
                r.stderr_se,
                r.trials_ok,
                r.trials_failed
            );
        }
    }
    eprintln!("summary: {}", paths.summary.display());
    eprintln!("records: {}", paths.records.display());
    eprintln!("config:  {}", paths.config.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            trials,
            seed,
            out,
            set,
            quiet,
        } => run(config, trials, seed, out, set, quiet),
        Command::Validate { config, set } => load_config_with_overrides(&config, &set).map(|cfg| {
            println!(
                "ok: {} sweep over {} values, {} trials, methods [{}]",
                cfg.sweep_axis.as_str(),
                cfg.sweep_values.len(),
                cfg.trials,
                cfg.methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", ")
            )
        }),
        Command::Bound { m, rho_b, rho_u } => ImpairmentParams::new(rho_b, rho_u, 1.0)
            .and_then(|imp| upper_bound(m, &imp))
            .map(|b| println!("{b:.6}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
