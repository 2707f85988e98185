//! `liesym` command-line front end.
//!
//! Exit codes: 0 success, 1 a requested verification failed, 2 parse or
//! format error, 3 unsupported mathematics.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Debug, Parser)]
#[command(name = "liesym", version, about = "Symmetry analysis of geodesic equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive geodesic equations and solve for Noether and/or Lie point symmetries.
    Analyze {
        metric: PathBuf,
        #[arg(long)]
        noether: bool,
        #[arg(long)]
        liepoint: bool,
        #[arg(long, default_value_t = 1)]
        ansatz_degree: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check each generator in a file against the metric.
    Verify {
        metric: PathBuf,
        gens: PathBuf,
        #[arg(long, conflicts_with = "liepoint")]
        noether: bool,
        #[arg(long)]
        liepoint: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Structure of the Lie algebra spanned by a generator file.
    Algebra {
        gens: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// One-dimensional optimal system: coverage report or a single reduction.
    Optimal {
        gens: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Reduce one coefficient vector (comma separated rationals) instead.
        #[arg(long, allow_hyphen_values = true)]
        reduce: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// RK4 integration of the geodesic equations with first-integral drift.
    Integrate {
        metric: PathBuf,
        /// Function binding such as M=1 or Q=t^2.
        #[arg(long = "bind")]
        binds: Vec<String>,
        /// Positions then velocities, comma or space separated.
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, required = true)]
        init: Vec<f64>,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        span: f64,
        /// Generators whose Noether charges are tracked (default: coordinate fields).
        #[arg(long)]
        gens: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
