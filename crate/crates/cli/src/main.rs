//! `diffinv`: invariants of forms, transvectants, operator models and
//! equivalence checks, with deterministic JSON and CSV output.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diffinv_core::Error;
use serde::Serialize;

/// Usage error (EX_USAGE).
pub const EXIT_USAGE: u8 = 64;
/// Malformed input data (EX_DATAERR).
pub const EXIT_DATA: u8 = 65;
pub const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    /// The computation ran but could not decide, e.g. a degenerate frame.
    Inconclusive(String),
}

impl Failure {
    pub fn data(msg: impl Into<String>) -> Self {
        Failure::Data(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Inconclusive(_) => EXIT_INCONCLUSIVE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Inconclusive(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Degenerate { .. } => Failure::Inconclusive(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "diffinv", version, about = "Exact invariants of forms and differential operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Computations on a single form.
    #[command(subcommand)]
    Form(FormCommand),
    /// Transvectant of n forms in n variables.
    Transvect(TransvectArgs),
    /// Sampled model of an operator in an invariant frame.
    Model(ModelArgs),
    /// Equivalence check of two linear operators.
    Equiv(EquivArgs),
    /// Equivalence check of two adjusted triples of u-dependent operators.
    Fequiv(FequivArgs),
}

#[derive(Subcommand, Debug)]
enum FormCommand {
    /// Catalog invariants of a form.
    Invariants(InvariantsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sampling; results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// quartic, quintic or ternary-cubic
    #[arg(long)]
    pub catalog: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TransvectArgs {
    /// First form; repeat for further slots.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Second form, appended after every `--input`.
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// Transvectant order l.
    #[arg(long, short = 'l')]
    pub order: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Frame such as `Jq(sym), free`; defaults to the file's `frame`.
    #[arg(long)]
    pub frame: Option<String>,
    /// Box such as `x1:1:2,x2:0:1`; defaults to the file's `box`.
    #[arg(long = "box")]
    pub domain: Option<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ToleranceArgs {
    /// Relative residual a preimage root must reach.
    #[arg(long, default_value_t = 1e-12)]
    pub tol_root: f64,
    /// Relative agreement required of model values.
    #[arg(long, default_value_t = 1e-9)]
    pub tol_match: f64,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long)]
    pub frame: Option<String>,
    /// Box of the first operator; defaults to its file's `box`.
    #[arg(long = "box")]
    pub domain: Option<String>,
    /// Box of the second operator; defaults to its file's `box`.
    #[arg(long = "box2")]
    pub domain2: Option<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct FequivArgs {
    /// First triple: operator file with `frame` and `box`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: PathBuf,
    /// Overrides the frame of both triples.
    #[arg(long)]
    pub frame: Option<String>,
    #[arg(long = "box")]
    pub domain: Option<String>,
    #[arg(long = "box2")]
    pub domain2: Option<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let jobs = match &cli.command {
        Command::Form(FormCommand::Invariants(a)) => a.out.jobs,
        Command::Transvect(a) => a.out.jobs,
        Command::Model(a) => a.out.jobs,
        Command::Equiv(a) => a.out.jobs,
        Command::Fequiv(a) => a.out.jobs,
    };
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Form(FormCommand::Invariants(a)) => commands::form_invariants(&a),
        Command::Transvect(a) => commands::transvect(&a),
        Command::Model(a) => commands::model(&a),
        Command::Equiv(a) => commands::equiv(&a),
        Command::Fequiv(a) => commands::fequiv(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("diffinv: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
