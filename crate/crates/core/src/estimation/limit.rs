//! Numerical check that scaled sums of CV prediction errors approach the
//! innovation as the CV regime tends to leave-one-out.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::models::ModelSpec;
use crate::rng::RngStream;
use crate::sampling::{block_partition, cv::block_contains, cv_block, cv_monte_carlo, simulate, McmcConfig};

use super::engine::Master;
use super::test_function::TestFunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitMode {
    /// Monte-Carlo CV with `p_k = 1 / sqrt(k)`, scaled by `p_k`.
    #[serde(rename = "mc")]
    MonteCarlo,
    /// Block CV on an `m` by `m` grid, `k = m^2`.
    Block,
}

impl FromStr for LimitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(LimitMode::MonteCarlo),
            "block" => Ok(LimitMode::Block),
            other => Err(Error::InvalidParameter(format!("unknown mode '{other}', expected mc or block"))),
        }
    }
}

impl fmt::Display for LimitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitMode::MonteCarlo => "mc",
            LimitMode::Block => "block",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub k: usize,
    pub median_abs_d: f64,
    pub n_reps: usize,
}

/// Checks a k list: every `k >= 2`, and in block mode square `k` whose grids
/// refine one another in order.
pub fn check_k_list(k_values: &[usize], mode: LimitMode) -> Result<()> {
    if k_values.is_empty() {
        return Err(Error::InvalidParameter("k list is empty".into()));
    }
    let mut prev_m: Option<usize> = None;
    for &k in k_values {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k = {k}: p_k = 1/sqrt(k) must lie in (0, 1), so k >= 2")));
        }
        if mode == LimitMode::Block {
            let m = (k as f64).sqrt().round() as usize;
            if m * m != k {
                return Err(Error::InvalidParameter(format!("block mode needs square k, got {k}")));
            }
            if let Some(pm) = prev_m {
                if !m.is_multiple_of(pm) {
                    return Err(Error::InvalidParameter(format!(
                        "block grids must refine: {pm}x{pm} is not refined by {m}x{m}"
                    )));
                }
            }
            prev_m = Some(m);
        }
    }
    Ok(())
}

/// `D` values for one pattern, one per entry of `k_values`.
fn one_replication(
    spec: &ModelSpec,
    tf: &TestFunctionSpec,
    k_values: &[usize],
    mode: LimitMode,
    x: &crate::pattern::PointPattern,
    dummy: usize,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let family = spec.family();
    let master = Master::new(x, dummy, spec.interaction_radius());
    let n = x.len();
    let all: Vec<usize> = (0..n).collect();
    let quad = master.quadrature(&all);
    let auto = master.fold(&vec![true; n], &all, quad.clone(), family, None).error(spec, tf, 1.0);
    let window: Window = x.window();
    k_values
        .iter()
        .map(|&k| {
            let mut total = 0.0;
            match mode {
                LimitMode::MonteCarlo => {
                    let p = 1.0 / (k as f64).sqrt();
                    let round = cv_monte_carlo(x, p, k, &rng.derive(k as u64))?;
                    for pair in &round.pairs {
                        let val: Vec<usize> = all.iter().copied().filter(|&j| pair.validation_mask[j]).collect();
                        let train: Vec<bool> = pair.validation_mask.iter().map(|v| !v).collect();
                        total += master.fold(&train, &val, quad.clone(), family, None).error(spec, tf, p);
                    }
                    Ok(p * total - auto)
                }
                LimitMode::Block => {
                    let m = (k as f64).sqrt().round() as usize;
                    let cells = block_partition(&window, m);
                    let round = cv_block(x, &cells)?;
                    let nodes: Vec<_> = quad.0.iter().map(|&i| master.node(i)).collect();
                    for (pair, cell) in round.pairs.iter().zip(&cells) {
                        let val: Vec<usize> = all.iter().copied().filter(|&j| pair.validation_mask[j]).collect();
                        let train: Vec<bool> = pair.validation_mask.iter().map(|v| !v).collect();
                        let ind = nodes.iter().map(|&u| block_contains(&window, cell, u)).collect();
                        total += master.fold(&train, &val, quad.clone(), family, Some(ind)).error(spec, tf, 1.0);
                    }
                    Ok(total - auto)
                }
            }
        })
        .collect()
}

/// For each `k`, the median over replications of `|D|`, where
/// `D = p_k * sum_i I_i - I_auto` (Monte-Carlo) or `D = sum_i I_i - I_auto`
/// with `xi_i = 1{u in A_i} lambda(u | x_i^T)` (block). All prediction errors
/// of one pattern share a quadrature built from the whole pattern.
#[allow(clippy::too_many_arguments)]
pub fn tf_limit_experiment(
    spec: &ModelSpec,
    tf: &TestFunctionSpec,
    k_values: &[usize],
    n_reps: usize,
    mode: LimitMode,
    mcmc: &McmcConfig,
    dummy: usize,
    rng: &RngStream,
) -> Result<Vec<LimitRow>> {
    check_k_list(k_values, mode)?;
    tf.validate()?;
    mcmc.validate()?;
    if n_reps == 0 || dummy == 0 {
        return Err(Error::InvalidParameter("n_reps and dummy resolution must be positive".into()));
    }
    let window = Window::unit();
    let per_rep = (0..n_reps)
        .into_par_iter()
        .map(|r| {
            let stream = rng.derive(r as u64);
            let x = simulate(spec, &window, mcmc, &stream.derive(0))?;
            one_replication(spec, tf, k_values, mode, &x, dummy, &stream.derive(1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(k_values
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mut d: Vec<f64> = per_rep.iter().map(|v| v[j].abs()).collect();
            LimitRow { k, median_abs_d: median(&mut d), n_reps }
        })
        .collect())
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
