//! `fjc`: conflict measures, link-addition deltas and recommender evaluation
//! for Friedkin-Johnsen opinion dynamics.
//!
//! Exit status is 0 on success, 1 when a checked property fails and 2 on
//! usage, input or output errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "fjc", version, about = "Conflict calculus for Friedkin-Johnsen opinion dynamics")]
struct Cli {
    /// Worker threads (defaults to every available core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// A graph given either as a file or as a builtin name.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge list: `u v [weight]` per line, 0-based ids, `#` comments.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Builtin graph: karate, er100, path100, grid10x10, sbm200.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Opinion,
    Expected,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Disagreement, polarization, conflict and friends as JSON.
    Metrics {
        #[arg(long)]
        graph: PathBuf,
        /// One opinion per line; its length sets the node count.
        #[arg(long)]
        opinions: PathBuf,
    },
    /// Conflict change of every missing link as CSV.
    DeltaScan {
        #[command(flatten)]
        source: GraphSource,
        /// Opinion file; Gaussian opinions from --seed when absent.
        #[arg(long)]
        opinions: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks that no missing link raises conflict on builtin graphs.
    VerifyDelta {
        #[arg(long, value_delimiter = ',', default_values_t = ["karate".to_string(), "path100".into(), "grid10x10".into(), "er100".into()])]
        datasets: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        /// CSV of every delta (dataset,u,v,delta_c,delta_ec).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for one delta histogram per dataset.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
    },
    /// Adds random edges one at a time and checks the contraction bounds.
    VerifyContraction {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Compares forest-count identities with the matrix quantities.
    ForestCheck {
        #[arg(long, conflicts_with = "dataset")]
        graph: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
    },
    /// Expected conflict change of three link groups on the barbell SBM.
    SbmExample {
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, default_value_t = 20)]
        links_per_group: usize,
        /// First graph seed; graphs use seed, seed + 1, ...
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Budgeted conflict minimization over missing links.
    Solve {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        opinions: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolveMode::Opinion)]
        mode: SolveMode,
        #[arg(long)]
        budget: f64,
        /// Candidate pairs, `u v` per line; all missing links when absent.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a recommender evaluation described by a key = value config.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
