//! `cycles`: command-line front end for the exact verifications.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 inconclusive within caps,
//! 3 a finding that contradicts a proven statement, 4 a violated condition
//! on user-supplied input.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use report::{Outcome, RunReport};

#[derive(Parser, Debug)]
#[command(name = "cycles", version, about = "Exact checks for Pontryagin-product relations among zero-cycles")]
struct Cli {
    /// Write the JSON run report to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of alternating binomial kernels, cross-checked by derivatives.
    Identities {
        #[arg(long, default_value_t = 12)]
        kmax: u32,
        /// Largest degree shown (defaults to kmax).
        #[arg(long)]
        dmax: Option<u32>,
    },
    /// Search for and verify a membership certificate for u_1^{*k}.
    VerifyRelation {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        jmax: Option<u32>,
        #[arg(long)]
        cap: Option<u32>,
        /// Certificate file (default: relation-k<K>-g<G>.json).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Coefficients alpha_{l,i} and the power-basis coefficients of the top row.
    Alpha {
        #[arg(long)]
        k: u32,
    },
    /// Newton-type recursion among the gamma_l in the free group ring.
    RecursionCheck {
        #[arg(long)]
        k: u32,
        /// Single l to check (default: all 1..k-1).
        #[arg(long)]
        l: Option<u32>,
    },
    /// Condition (*) for a subspace of (Q^n)^k read from a file.
    CheckStar {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
    },
    /// Condition (**) for n subspaces of Q^k read from a file.
    CheckDoublestar {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
    },
    /// dim(A.B + A + B) >= dim A + dim B for a pair read from a file.
    PairLemma {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
    },
    /// Bounded search for (**)-configurations of large total dimension.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Where to write a counterexample configuration, if one is found.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Generic rank of the differential of coordinatewise multiplication.
    MuRank {
        #[arg(long, value_name = "PATH")]
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Genus thresholds for a given k, or what is known at a given g.
    Thresholds {
        #[arg(long, conflicts_with = "g", required_unless_present = "g")]
        k: Option<u64>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// gamma(x) = -log{x}, exp(-gamma(x)) = {x} and the factorization of gamma(x)^{*k}.
    GammaCheck {
        #[arg(long)]
        g: u32,
        /// Point coordinates, comma separated; the count is the rank.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 5)]
        kmax: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Identities { .. } => "identities",
            Command::VerifyRelation { .. } => "verify-relation",
            Command::Alpha { .. } => "alpha",
            Command::RecursionCheck { .. } => "recursion-check",
            Command::CheckStar { .. } => "check-star",
            Command::CheckDoublestar { .. } => "check-doublestar",
            Command::PairLemma { .. } => "pair-lemma",
            Command::Search { .. } => "search",
            Command::MuRank { .. } => "mu-rank",
            Command::Thresholds { .. } => "thresholds",
            Command::GammaCheck { .. } => "gamma-check",
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let name = cli.command.name();
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(outcome.text.as_bytes());
    let report = RunReport::new(name, &outcome, start.elapsed().as_millis() as u64);
    let json = report.to_json();
    match &cli.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("error: cannot write report to {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => {
            let _ = writeln!(stdout, "{json}");
        }
    }
    ExitCode::from(outcome.exit_code())
}

pub type CmdResult = Result<Outcome, String>;
