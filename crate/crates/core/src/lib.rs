//! Annealing-based estimation of partition-function ratios for Gibbs
//! distributions, with brute-force and Glauber-dynamics sampling oracles.

pub mod beta;
pub mod bounds;
pub mod error;
pub mod io;
pub mod model;
pub mod models;
pub mod numeric;
pub mod oracle;
pub mod pipeline;
pub mod ppe;
pub mod schedule;
pub mod schedules;

pub use beta::Beta;
pub use bounds::Bounds;
pub use error::{Error, Result};
pub use model::{GrossGibbsModel, SupportPoint};
pub use oracle::{make_exact_oracle, ExactOracle, GibbsOracle, RecordingOracle};
pub use pipeline::{
    estimate, estimate_nonadaptive, estimate_three_round, estimate_tpa, median_boost, Algorithm,
    EstimateReport, EstimatorOptions,
};
pub use ppe::{ppe_estimate, required_k, PpeOutcome};
pub use schedule::{Schedule, ScheduleDiagnostics};
pub use schedules::{pseudo_tpa, static_schedule, static_schedule_closed_form, tpa_run, tpa_union};
