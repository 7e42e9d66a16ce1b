//! `tropma`: command-line front end for tropma-core.

mod commands;
mod io;
mod plot;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "tropma", version, about = "Exact non-archimedean Monge–Ampère computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Input JSON file.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an input file and report its checks.
    Validate {
        #[command(flatten)]
        io: Common,
        /// Evaluate a function (and its periodic part) at a point such as `1/2,1/3`.
        #[arg(long)]
        at: Option<String>,
    },
    /// Strictly convex, periodic, Σ-transversal approximation.
    Approximate {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_retries: Option<usize>,
        /// JSON array of polytopes, overriding the request's `sigma`.
        #[arg(long, value_name = "FILE")]
        sigma: Option<PathBuf>,
        /// Include wall-clock seconds per stage in the certificate.
        #[arg(long)]
        timings: bool,
    },
    /// Monge–Ampère measure of a function or, for a cocycle, of its canonical function.
    Ma {
        #[command(flatten)]
        io: Common,
        /// Use the tangent approximation of level k of the input cocycle.
        #[arg(long)]
        k: Option<usize>,
        /// Restrict to a polytope given as JSON.
        #[arg(long, value_name = "FILE", conflicts_with = "fundamental")]
        region: Option<PathBuf>,
        /// Restrict to the half-open fundamental domain (the default).
        #[arg(long)]
        fundamental: bool,
    },
    /// Assembled skeleton measure of a metric.
    SkeletonMeasure {
        #[command(flatten)]
        io: Common,
        /// `canonical`, `k=N` or a function file.
        #[arg(long, default_value = "canonical")]
        metric: String,
        /// Push the canonical measure to the glued canonical subset instead.
        #[arg(long)]
        glued: bool,
    },
    /// Vertex degrees of a face for a PL metric.
    Degree {
        #[command(flatten)]
        io: Common,
        /// `k=N` or a function file.
        #[arg(long)]
        metric: String,
        #[arg(long)]
        face: String,
        /// Chart point; all vertices of the face when absent.
        #[arg(long)]
        at: Option<String>,
    },
    /// Compare total masses across metrics and measure files.
    MassCheck {
        #[command(flatten)]
        io: Common,
        /// `canonical`, `k=N` or a function file; repeatable.
        #[arg(long)]
        metric: Vec<String>,
        /// Precomputed measure file; repeatable.
        #[arg(long)]
        measure: Vec<PathBuf>,
    },
    /// SVG of a 2-D decomposition with Σ and a measure overlaid.
    Plot {
        #[command(flatten)]
        io: Common,
        #[arg(long, value_name = "FILE")]
        sigma: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        measure: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("TROPMA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
