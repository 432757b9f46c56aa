//! `nextact` — learn next-action belief networks from interaction logs
//! and serve adaptive help predictions.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a data or parse
//! error, so scripts can tell bad invocations from bad inputs.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "nextact",
    version,
    about = "Next-action prediction from user interaction logs",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse interaction logs and append their transitions to a database
    Ingest(IngestArgs),
    /// Learn a network from a transition database and write its file
    Learn(LearnArgs),
    /// Print the most probable next actions for a current action
    Predict(PredictArgs),
    /// Run an evaluation protocol over recorded data
    Evaluate(EvaluateArgs),
    /// Interactive loop: feed actions on stdin, ask for help with `?`
    Assist(AssistArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Transition database to create or append to
    #[arg(long)]
    db: PathBuf,
    /// Log files, one session each
    #[arg(required = true)]
    logs: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LearnMode {
    /// Fixed chain over the selected fields (the default model)
    FixedChain,
    /// Score every structure (at most 4 variables)
    Exhaustive,
    /// Hill-climbing search
    Greedy,
}

#[derive(Args)]
struct LearnArgs {
    /// Transition database to learn from
    #[arg(long)]
    db: PathBuf,
    /// Where to write the network file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = LearnMode::FixedChain)]
    mode: LearnMode,
    /// Equivalent sample size of the parameter prior
    #[arg(long, default_value_t = 1.0)]
    ess: f64,
    /// Comma-separated record fields to model
    #[arg(long, default_value = "paction,caction,naction")]
    fields: String,
    /// Parent bound for the search modes
    #[arg(long, default_value_t = 2)]
    max_parents: usize,
}

#[derive(Args)]
struct PredictArgs {
    /// Network file
    #[arg(long)]
    net: PathBuf,
    /// Topic map file (tab-separated; built-in default topic if omitted)
    #[arg(long)]
    topics: Option<PathBuf>,
    /// How many suggestions to print
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// The current action token
    action: String,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(subcommand)]
    protocol: EvalProtocol,
}

#[derive(Subcommand)]
enum EvalProtocol {
    /// K-fold cross-validation of next-action accuracy on a database
    Cv(CvArgs),
    /// Replay a raw log through the help module, ranking every step
    Replay(ReplayArgs),
}

#[derive(Args)]
struct CvArgs {
    /// Transition database with the evaluation records
    #[arg(long)]
    db: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1.0)]
    ess: f64,
    /// Hit level; defaults to top-1 for cross-validation
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReplayArgs {
    /// Raw session log to replay
    #[arg(long)]
    log: PathBuf,
    /// Network file
    #[arg(long)]
    net: PathBuf,
    /// Topic map file
    #[arg(long)]
    topics: Option<PathBuf>,
    /// Suggestions per query; defaults to the three presented topics
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct AssistArgs {
    /// Network file
    #[arg(long)]
    net: PathBuf,
    /// Topic map file
    #[arg(long)]
    topics: Option<PathBuf>,
    /// Database that collects the streamed transitions
    #[arg(long)]
    db: Option<PathBuf>,
    /// Suggestions per help request
    #[arg(long, default_value_t = 3)]
    top_k: usize,
}

/// Failures split by exit class.
pub enum CliError {
    /// Bad invocation: exits 1.
    Usage(String),
    /// Bad input data: exits 2.
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(&args),
        Command::Learn(args) => commands::learn::run(&args),
        Command::Predict(args) => commands::predict::run(&args),
        Command::Evaluate(args) => match args.protocol {
            EvalProtocol::Cv(cv) => commands::evaluate::run_cv(&cv),
            EvalProtocol::Replay(replay) => commands::evaluate::run_replay(&replay),
        },
        Command::Assist(args) => commands::assist::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
