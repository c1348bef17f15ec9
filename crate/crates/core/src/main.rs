use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use foclite::driver::{format_source, read_sources, Diagnostic, Options, Session, Source};
use foclite::eval::EvalBudget;
use foclite::prover::SearchBudget;

#[derive(Parser)]
#[command(name = "foclite", version, about = "Check, run and format species files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print diagnostics as one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Elaborate every species and check every proof.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Worker threads for discharging obligations.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Print elapsed milliseconds in report lines.
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate an expression inside a collection.
    Eval {
        /// Source file or directory (a directory is read through its index.txt).
        path: PathBuf,
        collection: String,
        expression: String,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
    /// Print the definition and declaration dependencies of every proof.
    Deps {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Pretty-print source files.
    Fmt {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = SearchBudget::default().gamma_depth)]
    gamma_depth: u32,
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    max_nodes: usize,
    #[arg(long, default_value_t = SearchBudget::default().timeout.as_millis() as u64)]
    timeout_ms: u64,
}

fn emit(d: &Diagnostic, json: bool) {
    if json {
        eprintln!("{}", d.to_json());
    } else {
        eprintln!("{d}");
    }
}

fn sources(paths: &[PathBuf]) -> Result<Vec<Source>, ExitCode> {
    read_sources(paths).map_err(|e| {
        eprintln!("foclite: {e}");
        ExitCode::from(2)
    })
}

fn finish(s: &Session, json: bool) -> ExitCode {
    for d in &s.diagnostics {
        emit(d, json);
    }
    ExitCode::from(u8::from(s.has_errors()))
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let json = cli.json;
    Ok(match cli.command {
        Command::Check { paths, budget, jobs, timings } => {
            if jobs == 0 || budget.gamma_depth == 0 {
                eprintln!("foclite: --jobs and --gamma-depth must be positive");
                return Err(ExitCode::from(2));
            }
            let opts = Options {
                budget: SearchBudget {
                    gamma_depth: budget.gamma_depth,
                    max_nodes: budget.max_nodes,
                    timeout: Duration::from_millis(budget.timeout_ms),
                },
                jobs,
                prove: true,
            };
            let s = Session::run(&sources(&paths)?, &opts);
            for l in s.report_lines(timings) {
                println!("{l}");
            }
            finish(&s, json)
        }
        Command::Eval { path, collection, expression, fuel } => {
            if fuel == 0 {
                eprintln!("foclite: --fuel must be positive");
                return Err(ExitCode::from(2));
            }
            let opts = Options { prove: false, ..Options::default() };
            let s = Session::run(&sources(&[path])?, &opts);
            if s.has_errors() {
                return Ok(finish(&s, json));
            }
            match s.eval(&collection, &expression, EvalBudget { fuel }) {
                Ok(v) => {
                    println!("{v}");
                    ExitCode::SUCCESS
                }
                Err(d) => {
                    emit(&d, json);
                    ExitCode::from(1)
                }
            }
        }
        Command::Deps { paths } => {
            let opts = Options { prove: false, ..Options::default() };
            let s = Session::run(&sources(&paths)?, &opts);
            for e in s.dependency_edges() {
                println!("{e}");
            }
            finish(&s, json)
        }
        Command::Fmt { paths } => {
            let mut failed = false;
            for src in sources(&paths)? {
                match format_source(&src) {
                    Ok(text) => print!("{text}"),
                    Err(d) => {
                        emit(&d, json);
                        failed = true;
                    }
                }
            }
            ExitCode::from(u8::from(failed))
        }
    })
}

fn main() -> ExitCode {
    run(Cli::parse()).unwrap_or_else(|code| code)
}
