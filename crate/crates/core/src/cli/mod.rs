//! Command-line front end. Every number in a report comes from the library;
//! this layer only parses flags, picks the field, and formats output.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::gf::{prime_power, FieldCtx, ModulusTable};
use crate::matfq::{EnumConfig, DEFAULT_ENUM_CAP};
use crate::oracle::DEFAULT_GRAPH_CAP;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "unitgraph",
    version,
    about = "Exact spectra of unit-graphs on Mat_n(F_q)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues and multiplicities, closed form for n = 1 and 3 and by
    /// character sums otherwise.
    Spectrum(Common),
    /// Cross-check closed forms, character sums, rank censuses and the
    /// explicit graph.
    Verify(VerifyArgs),
    /// Character sums over GL_n(F_q) for chosen labels.
    Charsum(CharsumArgs),
    /// Edge-existence checks between vertex subsets.
    Gap(GapArgs),
    /// Rank census and, for n = 3, the diagonal-entry counts over GL_3.
    Census(Common),
    /// Write the graph as an edge list `i j` (i < j) of enumeration indices.
    ExportGraph(ExportArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Field order (a prime power).
    #[arg(long, conflicts_with = "p")]
    pub q: Option<u64>,
    /// Field characteristic; use with --k.
    #[arg(long)]
    pub p: Option<u32>,
    /// Extension degree.
    #[arg(long, requires = "p", default_value_t = 1)]
    pub k: u32,
    /// Defining polynomial, coefficients constant term first, e.g. 1,1,1.
    #[arg(long)]
    pub modulus: Option<String>,
    /// Table of moduli, one `p k c0,c1,...,ck` per line.
    #[arg(long, env = "UNITGRAPH_MODULUS_FILE")]
    pub modulus_file: Option<PathBuf>,
    /// Matrix size.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Largest number of matrices an exhaustive enumeration may visit.
    #[arg(long, env = "UNITGRAPH_ENUM_CAP", default_value_t = DEFAULT_ENUM_CAP)]
    pub enum_cap: u64,
    /// Largest vertex count for an explicitly stored graph.
    #[arg(long, env = "UNITGRAPH_GRAPH_CAP", default_value_t = DEFAULT_GRAPH_CAP)]
    pub graph_cap: u64,
    /// Worker threads for enumerations; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also check graphs over the graph cap, streaming rows on demand.
    #[arg(long)]
    pub extended: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CharsumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Use the diagonal rank representative of this rank as the label.
    #[arg(long, conflicts_with = "label_index")]
    pub rank: Option<usize>,
    /// Use the matrix at this enumeration index as the label.
    #[arg(long)]
    pub label_index: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct GapArgs {
    #[command(flatten)]
    pub common: Common,
    /// Subset X as enumeration indices, one per line.
    #[arg(long, conflicts_with = "random_size")]
    pub subset_file: Option<PathBuf>,
    /// Subset Y; defaults to X.
    #[arg(long, requires = "subset_file")]
    pub subset_file_y: Option<PathBuf>,
    /// Check one set for two distinct members with invertible difference.
    #[arg(long, requires = "subset_file", conflicts_with = "subset_file_y")]
    pub single: bool,
    /// Size of each random subset.
    #[arg(long)]
    pub random_size: Option<usize>,
    /// Number of random trials; trial t uses seed + t.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Destination file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Allow graphs over the graph cap, generating rows on demand.
    #[arg(long)]
    pub extended: bool,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_CHECK_FAILED,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SizeTooLarge { .. } => EXIT_CAP,
            Error::NonPrime(_)
            | Error::NotPrimePower(_)
            | Error::ReducibleModulus { .. }
            | Error::BadModulus { .. }
            | Error::UnsupportedField { .. }
            | Error::FieldTooLarge(_)
            | Error::BadCoefficient { .. }
            | Error::BadRank { .. }
            | Error::BadOrder(_)
            | Error::UnsupportedDimension { .. }
            | Error::DimensionMismatch(..)
            | Error::Parse(_) => EXIT_USAGE,
            _ => EXIT_CHECK_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl Common {
    pub fn field(&self) -> Result<Arc<FieldCtx>, Failure> {
        let (p, k) = match (self.q, self.p) {
            (Some(q), _) => prime_power(q)?,
            (None, Some(p)) => (p, self.k),
            (None, None) => return Err(Failure::usage("one of --q or --p is required")),
        };
        let modulus = self
            .modulus
            .as_deref()
            .map(|m| {
                m.split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| Failure::usage(format!("bad modulus `{m}`")))
            })
            .transpose()?;
        let table = match &self.modulus_file {
            Some(path) => ModulusTable::load(path)?,
            None => ModulusTable::builtin(),
        };
        Ok(FieldCtx::with_table(p, k, modulus.as_deref(), &table)?)
    }

    pub fn enum_config(&self) -> EnumConfig {
        EnumConfig {
            cap: self.enum_cap,
            workers: self.workers.max(1),
        }
    }
}

/// Runs one parsed invocation, writing the report to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Spectrum(c) => commands::spectrum(c),
        Command::Verify(v) => commands::verify(v),
        Command::Charsum(c) => commands::charsum(c),
        Command::Gap(g) => commands::gap(g),
        Command::Census(c) => commands::census(c),
        Command::ExportGraph(e) => commands::export_graph(e, out),
    };
    match result {
        Ok(report) => {
            if out.write_all(report.text.as_bytes()).is_err() {
                return EXIT_CHECK_FAILED;
            }
            if let Some(msg) = report.failure {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_CHECK_FAILED;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// A rendered report, plus a failure message when the report records a
/// failed check.
pub struct Report {
    pub text: String,
    pub failure: Option<String>,
}

impl Report {
    fn ok(text: String) -> Report {
        Report {
            text,
            failure: None,
        }
    }
}
