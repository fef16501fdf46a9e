//! `niltri`: command-line front end for nil graded algebras codified by
//! strictly lower triangular matrices.
//!
//! Exit status: 0 on success or a positive verdict, 1 on a negative verdict
//! (not a homomorphism, not isomorphic, not in the zero class), 2 on usage or
//! parse errors, 3 when a search ran out of budget before deciding.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use niltri_core::FieldSpec;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "niltri", version, about = "Nil graded algebras from strictly lower triangular matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
pub struct Output {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
}

/// A single input matrix.
#[derive(Args, Clone)]
pub struct One {
    /// Matrix file (text or JSON).
    #[arg(long = "in", value_name = "PATH")]
    pub path: Option<PathBuf>,
    /// Inline matrix, e.g. "n=3;q3;rows:1|2 0".
    #[arg(long)]
    pub matrix: Option<String>,
    /// Expected field; a mismatch with the matrix is an error.
    #[arg(long)]
    pub field: Option<FieldSpec>,
}

/// A source `T` and target `S`.
#[derive(Args, Clone)]
pub struct Pair {
    #[arg(long, value_name = "PATH")]
    pub t: Option<PathBuf>,
    /// Inline source matrix.
    #[arg(long, value_name = "LITERAL")]
    pub t_matrix: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub s: Option<PathBuf>,
    /// Inline target matrix.
    #[arg(long, value_name = "LITERAL")]
    pub s_matrix: Option<String>,
    #[arg(long)]
    pub field: Option<FieldSpec>,
}

#[derive(Args, Clone)]
pub struct Search {
    /// Node budget for exhaustive searches.
    #[arg(long, default_value_t = niltri_core::hom::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two elements of A(T).
    Mul {
        #[command(flatten)]
        input: One,
        /// Left factor, e.g. "X1 + 2*X2X3".
        #[arg(long)]
        a: String,
        /// Right factor.
        #[arg(long)]
        b: String,
        #[command(flatten)]
        out: Output,
    },
    /// Check whether Γ defines a homomorphism A(T) -> A(S).
    CheckHom {
        #[command(flatten)]
        pair: Pair,
        /// Γ as text rows, a JSON matrix, or a report containing `gamma`.
        #[arg(long, value_name = "PATH")]
        gamma: Option<PathBuf>,
        /// Inline Γ with rows separated by ';'.
        #[arg(long, value_name = "LITERAL")]
        gamma_matrix: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustively search for an isomorphism A(T) -> A(S) over a prime field.
    IsoSearch {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        out: Output,
    },
    /// Elementary triangular operations.
    Eto {
        #[command(subcommand)]
        action: EtoAction,
    },
    /// Decide membership in the class of the zero matrix, with certificates.
    ZeroClass {
        #[command(flatten)]
        input: One,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-form classification for sizes 2 and 3; zero-class test beyond.
    Classify {
        #[command(flatten)]
        input: One,
        #[command(flatten)]
        out: Output,
    },
    /// Partition all matrices of a given size over a prime field into classes.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        field: FieldSpec,
        #[command(flatten)]
        search: Search,
        /// Members listed per class.
        #[arg(long, default_value_t = 8)]
        sample: usize,
        /// Also write the JSON report here.
        #[arg(long, value_name = "PATH")]
        out_file: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Leaders and the leader graph of a matrix.
    Leaders {
        #[command(flatten)]
        input: One,
        /// Print one "k -> j" line per arrow instead of a report.
        #[arg(long)]
        edges: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Certify B_(n,1), ..., B_(n,n-1) pairwise non-isomorphic.
    LowerBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        field: FieldSpec,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum EtoAction {
    /// Apply a step list, e.g. "P 3 1/2; F 2 5; Q 3 1 -2".
    Apply {
        #[command(flatten)]
        input: One,
        /// Step list file (text or JSON).
        #[arg(long, value_name = "PATH")]
        steps_file: Option<PathBuf>,
        /// Inline step list.
        #[arg(long)]
        steps: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Shortest step path from T to S (breadth-first, prime fields only).
    Search {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[command(flatten)]
        out: Output,
    },
    /// A random admissible step sequence, reproducible from its seed.
    Random {
        #[command(flatten)]
        input: One,
        #[arg(long, default_value_t = 4)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(niltri_core::Error),
}

impl From<niltri_core::Error> for CliError {
    fn from(e: niltri_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Negative,
    Undecided,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Positive
        } else {
            Verdict::Negative
        }
    }

    fn code(self) -> u8 {
        match self {
            Verdict::Positive => 0,
            Verdict::Negative => 1,
            Verdict::Undecided => 3,
        }
    }
}

/// What a command produced: the JSON contract and its text rendering.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub verdict: Verdict,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format) = commands::run(cli.command);
    match result {
        Ok(report) => {
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("serializable")
                ),
                Format::Text => print!("{}", report.text),
            }
            ExitCode::from(report.verdict.code())
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
