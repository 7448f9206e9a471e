//! Command-line front end: surface-spec files in, curvature reports,
//! certification tables and meshes out.

// `!(x <= tol)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod commands;
pub mod error;
pub mod mesh;
pub mod report;
pub mod specfile;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use error::{exit, CliError};

/// Environment variable holding the default constancy tolerance.
pub const TOL_ENV: &str = "SEPCURV_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "sepcurv",
    version,
    about = "Sectional curvature of separable hypersurfaces"
)]
pub struct Cli {
    /// Overrides the seed in the spec file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Constancy tolerance; beats the spec file and $SEPCURV_TOL.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format for records and tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature of coordinate planes at one point.
    Eval {
        spec: PathBuf,
        /// All n coordinates, or the n-1 non-height ones (height is solved for).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        point: Vec<f64>,
        /// 1-based coordinate pair; default is every pair.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        pair: Option<Vec<usize>>,
        /// Also report the constant-curvature residual for this K.
        #[arg(long, allow_hyphen_values = true)]
        target_k: Option<f64>,
    },
    /// Seeded constancy scan over random points.
    Scan {
        spec: PathBuf,
        /// Report file; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a built-in certification suite.
    Certify {
        #[arg(value_enum)]
        suite: certify::Suite,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6])]
        dims: Vec<usize>,
        /// Random points per case.
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Export an OBJ mesh of an n = 3 surface with a curvature sidecar CSV.
    Mesh {
        spec: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Grid nodes per axis; overrides [mesh].resolution.
        #[arg(long)]
        resolution: Option<usize>,
    },
}

/// Runs a parsed command line, honouring `--threads`.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {t} threads: {e}")))?
            .install(|| commands::dispatch(cli)),
        None => commands::dispatch(cli),
    }
}
