use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use invgen_core::driver::{self, Algorithm, BenchConfig, RunConfig, RunError, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "invgen", version, about = "Polynomial invariant ideals of multi-path loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the invariant ideal of one loop.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "fixpoint")]
        algorithm: Algorithm,
        #[arg(long)]
        json: bool,
        /// Random executions checked against the result.
        #[arg(long, default_value_t = 0)]
        oracle: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Maximum number of critical pairs per Groebner basis.
        #[arg(long)]
        pair_budget: Option<usize>,
        /// Seconds before the computation is abandoned.
        #[arg(long)]
        timeout: Option<f64>,
        /// Report all timings as zero so output is reproducible byte for byte.
        #[arg(long)]
        no_timings: bool,
    },
    /// Run every `.loop` file of a directory under both algorithms.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        json: bool,
        /// Seconds per benchmark and algorithm.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long)]
        no_timings: bool,
    },
}

fn seconds(t: f64) -> Result<Duration, String> {
    Duration::try_from_secs_f64(t).map_err(|e| format!("invalid timeout {t}: {e}"))
}

fn fail(e: &RunError) -> ExitCode {
    eprintln!("invgen: {e}");
    if let RunError::OracleFailure(report) = e {
        for v in &report.oracle.violations {
            eprintln!("  {} violated by trace {:?} from {:?}", v.generator, v.trace, v.initial);
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, algorithm, json, oracle, seed, pair_budget, timeout, no_timings } => {
            let timeout = match timeout.map(seconds).transpose() {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("invgen: {e}");
                    return ExitCode::from(2);
                }
            };
            let mut cfg = RunConfig {
                algorithm,
                oracle_trials: oracle,
                seed,
                timeout,
                timings: !no_timings,
                ..RunConfig::default()
            };
            if let Some(b) = pair_budget {
                cfg.pair_budget = b;
            }
            match driver::run_file(&file, &cfg) {
                Ok(report) => {
                    if json {
                        println!("{}", report.to_json());
                    } else {
                        print!("{}", report.to_text());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Bench { dir, json, timeout, no_timings } => {
            let timeout = match seconds(timeout) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("invgen: {e}");
                    return ExitCode::from(2);
                }
            };
            let cfg = BenchConfig { run: RunConfig { timings: !no_timings, ..RunConfig::default() }, timeout };
            match driver::bench(&dir, &cfg) {
                Ok(rows) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
                    } else {
                        print!("{}", driver::bench_table(&rows));
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
