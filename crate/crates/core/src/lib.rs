//! Simulation and cross-validation based estimation for Gibbs spatial point
//! processes.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conventions;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod geometry;
pub mod models;
pub mod pattern;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{distance, Point, Window};
pub use models::{cond_intensity, local_stability_bound, neighbor_count, phi2, Family, ModelSpec, ParamVector};
pub use pattern::{thin_independent, PointPattern};
pub use rng::RngStream;
