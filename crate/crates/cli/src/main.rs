//! `kv`: command-line front end for exact truncated KV computations.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use kv_core::json::FormatError;
use kv_core::{AlgebraError, PivotOrder, Strategy};

#[derive(Parser, Debug)]
#[command(
    name = "kv",
    version,
    about = "Exact truncated Kashiwara-Vergne computations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    /// Genus.
    #[arg(long, global = true)]
    pub g: Option<usize>,
    /// Number of boundary generators `z_j`.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Truncation cut in weighted degree.
    #[arg(long, global = true)]
    pub deg: Option<u32>,
    /// Input JSON file; repeat for verbs taking several inputs.
    #[arg(long = "in", global = true)]
    pub inputs: Vec<PathBuf>,
    /// Output JSON file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Solver strategy: `joint` or `kv1-then-correct`.
    #[arg(long, global = true, default_value = "joint")]
    pub strategy: Strategy,
    /// Column order for exact elimination: `natural` or `reversed`.
    #[arg(long, global = true, default_value = "natural")]
    pub pivot: PivotOrder,
    /// Seed for the randomized property checks of `bch`, `exp`, `log`, `div`, `jcocycle`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write a run manifest with input and output hashes.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Verb {
    /// BCH product of two Lie series.
    Bch,
    /// Exponential of a Lie series or of a tangential derivation.
    Exp,
    /// Logarithm of a group-like series or of an automorphism.
    Log,
    /// Divergence of a tangential derivation.
    Div,
    /// The cocycle `j` of an automorphism.
    Jcocycle,
    /// The elements `φ` and `ξ` of an instance.
    Instance,
    /// Solve KVI and KVII degree by degree.
    Solve,
    /// Recompute the residuals of a solution file.
    Check,
    /// Membership of a tangential derivation in `krv`.
    KrvCheck {
        /// Check `δ_k` (even `k`) on `(1,1)` instead of an input file.
        #[arg(long)]
        delta: Option<u32>,
    },
    /// Basis of the degree-`m` part of `krv`.
    KrvBasis {
        /// Degree `m` of the basis elements.
        #[arg(long)]
        weight: u32,
    },
    /// Glue two solutions with a genus-zero solution: `--in left --in right --in pants`.
    Glue,
    /// Genus-one solution from a genus-zero solution.
    Elliptic,
    /// `θ^exp` of a loop word, the boundary word by default.
    Expand {
        /// Space-separated letters such as `a1 b1 a1^-1 b1^-1 c1`.
        #[arg(long)]
        word: Option<String>,
        /// Emit the logarithm instead of the group-like series.
        #[arg(long)]
        log: bool,
    },
    /// Act on a solution by a stabilizer element: `--in solution --in element`.
    Torsor,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Bch => "bch",
            Verb::Exp => "exp",
            Verb::Log => "log",
            Verb::Div => "div",
            Verb::Jcocycle => "jcocycle",
            Verb::Instance => "instance",
            Verb::Solve => "solve",
            Verb::Check => "check",
            Verb::KrvCheck { .. } => "krv-check",
            Verb::KrvBasis { .. } => "krv-basis",
            Verb::Glue => "glue",
            Verb::Elliptic => "elliptic",
            Verb::Expand { .. } => "expand",
            Verb::Torsor => "torsor",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input: exit 2.
    Usage(String),
    /// The mathematics failed: exit 1.
    Math(String),
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Algebra(a) => a.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::InvalidParameters(_) | AlgebraError::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = commands::run(&cli).and_then(|outcome| {
        let bytes = kv_core::json::to_canonical_string(&outcome.value);
        match &cli.out {
            Some(path) => std::fs::write(path, &bytes)?,
            None => print!("{bytes}"),
        }
        if let Some(path) = &cli.manifest {
            manifest::write(path, &cli, &bytes, start.elapsed())?;
        }
        Ok(outcome.failure)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("kv {}: {msg}", cli.verb.name());
            ExitCode::from(1)
        }
        Err(CliError::Math(msg)) => {
            eprintln!("kv {}: {msg}", cli.verb.name());
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("kv {}: {msg}", cli.verb.name());
            ExitCode::from(2)
        }
    }
}
