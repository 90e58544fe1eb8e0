use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Compute, enumerate and assess subset-minimal explanations of linear and
/// naive Bayes classifiers.
#[derive(Parser, Debug)]
#[command(name = "xlc-explain", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a naive Bayes classifier from a labelled CSV file.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Additive smoothing for the class-conditional estimates.
        #[arg(long, default_value_t = 1.0)]
        smoothing: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict the class of every row.
    Predict(RowArgs),
    /// One smallest explanation per row.
    Explain(RowArgs),
    /// Stream all explanations per row, up to --limit each.
    Enumerate {
        #[command(flatten)]
        rows: RowArgs,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
    },
    /// Score heuristic explanations against enumerated explanations.
    Assess {
        #[command(flatten)]
        rows: RowArgs,
        /// JSON lines {"instance_id": …, "features": […]}, 1-based features.
        #[arg(long)]
        heuristic: PathBuf,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        /// Number of common features; defaults to the heuristic's size.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Cross-check enumeration against the brute-force oracle.
    Verify(RowArgs),
    /// Enumerate a synthetic equal-delta instance and report delay statistics.
    Bench {
        #[arg(long, default_value_t = 40)]
        features: usize,
        #[arg(long, default_value_t = 20)]
        picks: usize,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RowArgs {
    /// Model JSON (XLC or NBC).
    #[arg(long)]
    pub model: PathBuf,
    /// Instances, one per line, as CSV rows or JSON arrays.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also check each row's explanations against the brute-force oracle.
    #[arg(long)]
    pub verify: bool,
    /// Only explain rows predicted as this class ("+" or "-").
    #[arg(long = "class")]
    pub class: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train {
            data,
            smoothing,
            out,
        } => commands::train(&data, smoothing, out.as_deref()),
        Command::Predict(rows) => commands::predict(&rows),
        Command::Explain(rows) => commands::explain(&rows),
        Command::Enumerate { rows, limit } => commands::enumerate_rows(&rows, limit as usize),
        Command::Assess {
            rows,
            heuristic,
            limit,
            k,
        } => commands::assess(&rows, &heuristic, limit as usize, k),
        Command::Verify(rows) => commands::verify(&rows),
        Command::Bench {
            features,
            picks,
            limit,
            seed,
            out,
        } => commands::bench(features, picks, limit as usize, seed, out.as_deref()),
    };
    match result {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::RowFailures(n)) => {
            eprintln!("{n} row(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
