//! Simulation studies: replicated fits, MSE tables, GNZ and limit checks.

pub mod gnz;
pub mod mse;
pub mod scenarios;
pub mod study;

pub use gnz::{gnz_check, GnzSummary, GNZ_DUMMY, GNZ_MIN_REPS};
pub use mse::{mse_decompose, MseDecomposition};
pub use scenarios::Scenario;
pub use study::{
    aggregate, run_replication, run_study, run_study_with_progress, GridChoice, Method, ReplicationEstimates,
    ReplicationStatus, StudyConfig, StudyResult, StudyRow, ADAPTIVE_GRID_SIZE, CSV_HEADER, MAX_FAILURE_SHARE,
};
