use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseDecomposition {
    pub mse: f64,
    pub bias_sq: f64,
    pub variance: f64,
}

/// Mean squared error of `estimates` around `theta0`, with its split into
/// squared bias and population variance (divisor `n`).
pub fn mse_decompose(estimates: &[f64], theta0: f64) -> Result<MseDecomposition> {
    if estimates.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 estimates, got {}", estimates.len())));
    }
    let n = estimates.len() as f64;
    // Working with deviations from theta0 keeps the three sums on one scale.
    let d: Vec<f64> = estimates.iter().map(|e| e - theta0).collect();
    let bias = d.iter().sum::<f64>() / n;
    let variance = d.iter().map(|v| (v - bias).powi(2)).sum::<f64>() / n;
    let mse = d.iter().map(|v| v * v).sum::<f64>() / n;
    Ok(MseDecomposition { mse, bias_sq: bias * bias, variance })
}
