//! Experiment configuration, Monte Carlo runner, tables, figures and the
//! verification routines behind the command-line tool.

pub mod config;
pub mod experiment;
pub mod plot;
pub mod sweep;
pub mod tables;
pub mod verify;

pub use config::{ExperimentConfig, FadingConfig, GainSpec, PartitionSpec, SchemeKind};
pub use experiment::{round_rng, run_experiment, ExperimentResult};
pub use plot::plot_results;
pub use sweep::{fading_sweep, SweepRow};
pub use tables::{gap_grid, gap_scan, logspace, rates_table, write_csv, RateRow};
pub use verify::{run_identity_suite, IdentitySuiteReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration field `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Protocol(#[from] crate::Error),

    #[error("serialization failed: {0}")]
    Serialization(String),

    #[error("plotting failed: {0}")]
    Plot(String),
}
