use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};

use orcalc::cli::{cmd_check, cmd_lab, cmd_order, cmd_schur, CheckProperty, OrderArg, SchurRoute};
use orcalc::io::{MatrixFile, Report};
use orcalc::lab::LabModel;

/// Batch calculator for operator-range algebra: complementability checks,
/// Schur complements of selfadjoint matrices, matrix partial orders, and the
/// truncation lab. Reports are emitted as JSON on stdout.
#[derive(Parser)]
#[command(name = "orcalc", version)]
struct Cli {
    /// Decision tolerance in (0, 1); also read from ORCALC_TOL.
    #[arg(long, global = true, env = "ORCALC_TOL")]
    tol: Option<f64>,

    /// Exit with code 2 when any verdict in the report is false.
    #[arg(long, global = true)]
    strict: bool,

    /// Write the report to this file as well as stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a complementability predicate for a pair (B, S).
    Check {
        /// Predicate to decide.
        #[arg(long, value_enum)]
        property: CheckProperty,
        /// Hermitian matrix B (JSON with rows/cols/real[/imag]).
        #[arg(long)]
        matrix: PathBuf,
        /// Spanning set of S, one column per vector.
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Schur complement B_{/S} and compression B_S.
    Schur {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// Computation route; `both` adds the cross-route residual.
        #[arg(long, value_enum, default_value = "both")]
        route: SchurRoute,
    },
    /// Decide a matrix partial order A <= B.
    Order {
        /// minus, left-minus or prec.
        #[arg(long, value_enum)]
        kind: OrderArg,
        /// File holding A.
        a: PathBuf,
        /// File holding B.
        b: PathBuf,
    },
    /// Run the truncation ladder of a built-in model (ex1 or ex214).
    Lab {
        #[arg(long)]
        model: String,
        /// Largest truncation size; the ladder doubles from 4 up to it.
        #[arg(long)]
        n: usize,
    },
}

fn run(cli: &Cli) -> orcalc::Result<Report> {
    match &cli.command {
        Cmd::Check {
            property,
            matrix,
            subspace,
        } => {
            let b = MatrixFile::load(matrix)?;
            let s = MatrixFile::load(subspace)?;
            cmd_check(*property, &b, &s, cli.tol)
        }
        Cmd::Schur {
            matrix,
            subspace,
            route,
        } => {
            let b = MatrixFile::load(matrix)?;
            let s = MatrixFile::load(subspace)?;
            cmd_schur(&b, &s, *route, cli.tol)
        }
        Cmd::Order { kind, a, b } => {
            let af = MatrixFile::load(a)?;
            let bf = MatrixFile::load(b)?;
            cmd_order(*kind, &af, &bf, cli.tol)
        }
        Cmd::Lab { model, n } => cmd_lab(LabModel::parse(model)?, *n, cli.tol),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match report.to_json() {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    exit(1);
                }
            }
            if let Some(path) = &cli.out {
                if let Err(e) = report.save(path) {
                    eprintln!("error: {e}");
                    exit(e.exit_code());
                }
            }
            if cli.strict && !report.all_verdicts_hold() {
                exit(2);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.exit_code());
        }
    }
}
