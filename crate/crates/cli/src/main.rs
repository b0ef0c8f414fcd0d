//! `qfold` — identity catalog verification, Cartan folding, relation
//! certificates, and partition oracles, all over exact integer arithmetic.
//!
//! Exit codes: 0 every requested check passed, 1 a comparison failed,
//! 2 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfold_cli::commands::{self, data_dir, Outcome};

#[derive(Parser)]
#[command(
    name = "qfold",
    version,
    about = "Exact q-series identity verification",
    propagate_version = true
)]
struct Cli {
    /// Truncation order: checks compare series coefficients of q^e for e < ORDER
    #[arg(long, global = true, default_value_t = 100)]
    order: i64,

    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Catalog directory (default: ./catalog, falling back to the bundled copy)
    #[arg(long, global = true, value_name = "DIR")]
    catalog: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check catalog identities: both sides expanded and compared exactly
    Verify {
        /// Identity id (see `verify --all` output for the full list)
        id: Option<String>,
        /// Check every catalog identity
        #[arg(long)]
        all: bool,
    },
    /// Print a folded Cartan matrix and its minimal integral scaled inverse
    Fold {
        /// Folding label: A2n^2(n), A2n-1^2(n), Dn^2(n), D4^3, E6^2
        label: String,
        /// Size parameter appended to the label, e.g. `fold A2n^2 --n 3`
        #[arg(long)]
        n: Option<usize>,
        /// Print c*A^(-1) for this scale instead of the minimal one
        #[arg(long)]
        scale: Option<i64>,
    },
    /// Expand a relation certificate file and check it
    Certify {
        /// Certificate file (bare names resolve against the bundled certs/)
        file: PathBuf,
        /// Expected expansion: a relation instance like `n1(0,0,0,0)` or a
        /// combination literal like `R(0,0,0,0)-R(0,2,1,1)-x*q*R(0,4,2,2)`
        #[arg(long)]
        target: Option<String>,
        /// Also substitute truncated series for every symbol and test that
        /// the expansion vanishes through this order
        #[arg(long, value_name = "N")]
        numeric_order: Option<i64>,
        /// Certificate directory for bare names (default: ./certs or bundled)
        #[arg(long, value_name = "DIR")]
        certs: Option<PathBuf>,
    },
    /// Partition-set oracles for the difference-condition families
    Partitions {
        #[command(subcommand)]
        action: PartitionsAction,
    },
}

#[derive(Subcommand)]
enum PartitionsAction {
    /// Count members by weight, up to the global --order (as max weight)
    Count {
        /// Set name: N, N1, N2, N3, NF1, NF5
        set: String,
        /// Restrict to partitions with exactly this many parts
        #[arg(long)]
        x_degree: Option<i64>,
    },
    /// List the members at one exact weight
    Witness {
        /// Set name: N, N1, N2, N3, NF1, NF5
        set: String,
        /// Exact weight to enumerate
        weight: i64,
        /// Restrict to partitions with exactly this many parts
        #[arg(long)]
        x_degree: Option<i64>,
    },
}

fn run(cli: &Cli) -> qfold::Result<(Outcome, String)> {
    match &cli.command {
        Command::Verify { id, all } => {
            let dir = data_dir(cli.catalog.as_deref(), "catalog");
            commands::cmd_verify(&dir, id.as_deref(), *all, cli.order, cli.json)
        }
        Command::Fold { label, n, scale } => commands::cmd_fold(label, *n, *scale, cli.json),
        Command::Certify { file, target, numeric_order, certs } => {
            let dir = data_dir(certs.as_deref(), "certs");
            commands::cmd_certify(file, &dir, target.as_deref(), *numeric_order, cli.json)
        }
        Command::Partitions { action } => match action {
            PartitionsAction::Count { set, x_degree } => {
                commands::cmd_partitions_count(set, cli.order, *x_degree, cli.json)
            }
            PartitionsAction::Witness { set, weight, x_degree } => {
                commands::cmd_partitions_witness(set, *weight, *x_degree, cli.json)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((outcome, text)) => {
            print!("{text}");
            match outcome {
                Outcome::Pass => ExitCode::SUCCESS,
                Outcome::Mismatch => ExitCode::from(1),
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
