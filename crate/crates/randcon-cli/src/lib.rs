//! Experiment harness for the `randcon` library: scenario generation,
//! fixed-radius baselines, the two numerical studies, and the file
//! formats (config JSON, edge-map JSON, CSV tables) behind the
//! `randcon` command-line tool.

pub mod cli;
pub mod config;
pub mod formats;
pub mod scenario;
pub mod studies;

pub use config::ScenarioConfig;
pub use formats::{EdgeMapEntry, EdgeMapFile};
pub use scenario::{frc_topology, grid_placement, random_realizable_set, Scenario};
pub use studies::{run_arccc_vs_frc, run_er_study, spearman, ComparisonRow, ErRow};

use thiserror::Error;

/// Process-level failure classes; each maps to a documented exit code.
///
/// `Usage` covers bad invocations (unknown flags, missing required
/// arguments), `Config` covers unreadable or invalid input files and
/// output paths that cannot be written, and `Numerical` covers failures
/// reported by the computation itself.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Config(_) => 2,
            AppError::Numerical(_) => 3,
        }
    }
}

impl From<randcon::Error> for AppError {
    fn from(err: randcon::Error) -> Self {
        AppError::Numerical(err.to_string())
    }
}
