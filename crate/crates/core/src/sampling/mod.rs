//! Samplers for Poisson and Gibbs models, and cross-validation splitters.

pub mod cv;
pub mod mcmc;
pub mod poisson;

pub use cv::{
    block_partition, cv_block, cv_generalized_multinomial, cv_monte_carlo, cv_multinomial_kfold, CvConfig, CvPair,
    CvRound, CvScheme,
};
pub use mcmc::{sample_gibbs, sample_gibbs_series, InitialState, McmcConfig};
pub use poisson::sample_poisson;

use crate::error::Result;
use crate::geometry::Window;
use crate::models::{Family, ModelSpec};
use crate::pattern::PointPattern;
use crate::rng::RngStream;

/// One realisation of `spec`: exact thinning for Poisson models, MCMC for
/// the others.
pub fn simulate(spec: &ModelSpec, window: &Window, mcmc: &McmcConfig, rng: &RngStream) -> Result<PointPattern> {
    match spec.family() {
        Family::Poisson => sample_poisson(|u| spec.base_intensity(u), spec.window_bound(window), window, rng),
        _ => sample_gibbs(spec, window, mcmc, rng),
    }
}
