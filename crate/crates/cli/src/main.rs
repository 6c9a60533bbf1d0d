//! `symdyn-info`: batch front end for the symdyn-info library.
//!
//! ```text
//! symdyn-info run JOB.json [--base 2] [--seed 7] [--out result.json] [--table sweep.csv]
//! ```
//!
//! A job is a JSON document `{"schema_version": 1, "command": ..., "input":
//! {...}, "options": {...}}`; flags override the matching options. The result
//! document goes to stdout (or `--out`). Exit status is 0 on success, 2 for
//! schema and validation errors, 1 for computation failures and 3 for I/O
//! errors; in every failing case a structured error document is still
//! written.

mod job;
mod output;
mod run;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use job::{JobSpec, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Library(#[from] symdyn_info::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("table: {0}")]
    Table(#[from] csv::Error),
}

impl CliError {
    /// Error kind reported in the error document. Library validation errors
    /// count as schema errors: the job described an invalid object.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema(_) => "SchemaError",
            CliError::Library(e) if e.is_validation() => "SchemaError",
            CliError::Library(e) => e.name(),
            CliError::Io(_) | CliError::Table(_) => "IoError",
        }
    }

    /// Name of the library error behind a schema error, if any.
    pub fn source_name(&self) -> Option<&'static str> {
        match self {
            CliError::Library(e) if e.is_validation() => Some(e.name()),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "SchemaError" => 2,
            "IoError" => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "symdyn-info",
    version,
    about = "Information gain and entropy production for symbolic dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a job document.
    Run(RunArgs),
    /// List the supported job commands.
    Commands,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Job document (JSON); `-` reads stdin.
    job: PathBuf,
    /// Output base for information quantities.
    #[arg(long, value_parser = ["e", "2", "10"])]
    base: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Orbit-estimator trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Cylinder or orbit lengths (comma separated for a sweep).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Depth for potential tables that do not state one.
    #[arg(long)]
    depth: Option<usize>,
    /// Quadrature node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Quadrature rule: midpoint, gauss-legendre or custom.
    #[arg(long)]
    rule: Option<String>,
    /// Eigen-solver relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Mode for specgain (formula, cylinder, orbit) and ep (markov, potential).
    #[arg(long)]
    mode: Option<String>,
    /// Result document path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat CSV table of all results.
    #[arg(long)]
    table: Option<PathBuf>,
}

fn read_job(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn execute(args: &RunArgs, command: &mut Option<String>) -> Result<String, CliError> {
    let mut job = JobSpec::parse(&read_job(&args.job)?)?;
    *command = Some(job.command.clone());
    job.apply(Overrides {
        base: args.base.clone(),
        seed: args.seed,
        trials: args.trials,
        n: args.n.clone(),
        depth: args.depth,
        nodes: args.nodes,
        rule: args.rule.clone(),
        tol: args.tol,
        mode: args.mode.clone(),
    });
    let base = job.options.base()?;
    let entries = run::run(&job)?;
    if let Some(path) = &args.table {
        output::write_table(fs::File::create(path)?, base, &entries)?;
    }
    Ok(output::render_results(
        &job.command,
        job.options.seed(),
        base,
        &entries,
    ))
}

fn emit(args: &RunArgs, text: &str) -> std::io::Result<()> {
    match &args.out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match cli.command {
        Command::Commands => {
            for c in run::COMMANDS {
                println!("{c}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run(args) => args,
    };
    let mut command = None;
    let (text, code) = match execute(&args, &mut command) {
        Ok(text) => (text, 0),
        Err(e) => {
            eprintln!("symdyn-info: {}: {e}", e.kind());
            (output::render_error(command.as_deref(), &e), e.exit_code())
        }
    };
    if let Err(e) = emit(&args, &text) {
        eprintln!("symdyn-info: cannot write result: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(code)
}
