//! Grid-search estimators: point process learning (PPL) by cross-validated
//! prediction errors, and the Takacs-Fiksel (TF) innovation fit.

pub(crate) mod engine;
pub mod fit;
pub mod grid;
pub mod limit;
pub mod loss;
pub mod prediction;
pub mod quadrature;
pub mod test_function;
pub mod weights;

pub use fit::{default_test_function, fit_ppl, fit_ppl_multi, fit_tf, hardcore_adaptive_grid, FitOutcome, PplOptions};
pub use grid::{argmin_first, grid_search, ParamGrid};
pub use limit::{check_k_list, tf_limit_experiment, LimitMode, LimitRow};
pub use loss::{loss, LossId, LossSpec};
pub use prediction::{innovation, prediction_error, prediction_error_terms, PredictionTerms};
pub use quadrature::{build_quadrature, QuadratureScheme, DEFAULT_DUMMY};
pub use test_function::{test_function, TestFunctionSpec, HARD_CORE_TRUNCATION};
pub use weights::{ppl_weight, WeightScheme, DEFAULT_K_PRIME};
