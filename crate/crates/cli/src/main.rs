use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greenwalk_cli::{classify_inline, run_config, RunOptions};

#[derive(Parser)]
#[command(name = "greenwalk", version, about = "Recurrence and transience of random walks on the integers")]
struct Cli {
    /// Worker threads for parallel sections. Results do not depend on it.
    #[arg(long, global = true, env = "GREENWALK_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a configuration file.
    Run {
        config: PathBuf,
        /// Exit with status 2 when any verdict is undetermined.
        #[arg(long)]
        strict: bool,
        /// Leave the generation time out of reports.
        #[arg(long)]
        no_timestamp: bool,
        #[arg(long, default_value = "reports")]
        out: PathBuf,
    },
    /// Classify one step law, or an oscillating pair with --nu.
    Classify {
        /// Measure in the config sub-format, e.g. '{"kind":"points","points":[[-1,0.5],[1,0.5]]}'.
        #[arg(long)]
        measure: String,
        /// Law used from positions >= 1; `--measure` is then used from <= 0.
        #[arg(long)]
        nu: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        strict: bool,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match cli.command {
        Command::Run {
            config,
            strict,
            no_timestamp,
            out,
        } => {
            let opts = RunOptions {
                out,
                timestamp: !no_timestamp,
            };
            match run_config(&config, &opts) {
                Ok(summary) => {
                    let lines: String = summary
                        .tasks
                        .iter()
                        .enumerate()
                        .map(|(i, t)| format!("[{:02}] {} ({}): {}\n", i + 1, t.name, t.kind, t.summary))
                        .collect();
                    emit(&lines);
                    if strict && summary.any_undetermined() {
                        eprintln!("undetermined verdicts present (--strict)");
                        return ExitCode::from(2);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Classify { measure, nu, tol, strict } => match classify_inline(&measure, nu.as_deref(), tol) {
            Ok((text, undetermined)) => {
                emit(&text);
                if strict && undetermined {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        },
    }
}
