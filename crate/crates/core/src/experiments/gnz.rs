use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{build_quadrature, innovation, TestFunctionSpec};
use crate::geometry::Window;
use crate::models::ModelSpec;
use crate::rng::RngStream;
use crate::sampling::{simulate, McmcConfig};

/// Dummy resolution for the check. The compensator of an interacting model
/// varies on the scale of the interaction radius, so a coarse grid biases
/// the innovation by more than the Monte-Carlo error of a few hundred runs.
pub const GNZ_DUMMY: usize = 128;

pub const GNZ_MIN_REPS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnzSummary {
    pub mean: f64,
    pub se: f64,
    pub n_reps: usize,
}

/// Mean and standard error of the innovation at the true parameter over
/// `n_reps` simulated patterns on the unit square.
pub fn gnz_check(
    spec: &ModelSpec,
    tf: &TestFunctionSpec,
    n_reps: usize,
    mcmc: &McmcConfig,
    dummy: usize,
    rng: &RngStream,
) -> Result<GnzSummary> {
    if n_reps < GNZ_MIN_REPS {
        return Err(Error::InvalidParameter(format!("need at least {GNZ_MIN_REPS} replications, got {n_reps}")));
    }
    if dummy == 0 {
        return Err(Error::InvalidParameter("dummy resolution must be positive".into()));
    }
    tf.validate()?;
    mcmc.validate()?;
    let window = Window::unit();
    let values = (0..n_reps)
        .into_par_iter()
        .map(|r| {
            let x = simulate(spec, &window, mcmc, &rng.derive(r as u64))?;
            innovation(spec, tf, &x, &build_quadrature(&window, &x, dummy))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = n_reps as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(GnzSummary { mean, se: (var / n).sqrt(), n_reps })
}
