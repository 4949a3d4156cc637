//! Seeded trial batteries, exact expectations and separation reports.

mod equivalence;
mod exact;
mod experiments;
mod registry;
mod report;
mod stats;
mod trials;
mod verify;

use thiserror::Error;

use crate::gen::GenError;
use crate::oracle::Model;

pub use equivalence::{
    adversary_equivalence, chi_square_two_sample, chi_square_uniform, claw_contacts, ChiSquare,
    EquivalenceReport, CONTACT_BINS,
};
pub use exact::{
    closed_form_expectation, enumerate_attempts, exact_cert_expectation, tail_and_cycle,
    AttemptExpectation,
};
pub use experiments::{
    separation_experiment, slope_experiment, Battery, RatioPoint, SeparationConfig,
    SeparationReport, SeparationRow, Skipped, SlopeConfig, SlopeReport, SlopeRow, SlopeSeries,
    ASSUMPTIONS,
};
pub use registry::{corrupt_certificate, DetectorSpec, GeneratorSpec};
pub use report::{
    config_hash, parse_chart_points, read_results_csv, separation_chart, slope_chart,
    write_results_csv, LineChart, ResultRow, Series,
};
pub use stats::{
    linear_fit, slope_fit, wilson, CiMethod, FitError, Interval, LinearFit, MeanSummary,
    TrialStats, NORMAL_APPROX_MIN,
};
pub use verify::{brute_target, first_failure, verify_instance, Check};
pub use trials::{run_once, run_trials, run_trials_on, trial_seed, TrialConfig, TrialRecord, TrialRun};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{detector} cannot run on a {model:?} instance")]
    ModelMismatch { detector: String, model: Model },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("metadata: {0}")]
    Meta(String),
    #[error("i/o: {0}")]
    Io(String),
}
