use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::models::ModelSpec;
use crate::pattern::PointPattern;

use super::engine::FoldEval;
use super::quadrature::QuadratureScheme;
use super::test_function::TestFunctionSpec;

/// The two parts of a prediction error: the test function summed over
/// validation points, and the compensator integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionTerms {
    pub sum: f64,
    pub integral: f64,
}

impl PredictionTerms {
    pub fn value(&self) -> f64 {
        self.sum - self.integral
    }
}

fn locate(points: &[Point], quad: &QuadratureScheme) -> Result<Vec<usize>> {
    let index: HashMap<(u64, u64), usize> = quad.nodes().iter().enumerate().map(|(i, p)| (p.key(), i)).collect();
    points
        .iter()
        .map(|p| index.get(&p.key()).copied().ok_or(Error::InconsistentQuadrature { x: p.x, y: p.y }))
        .collect()
}

pub fn prediction_error_terms(
    spec: &ModelSpec,
    tf: &TestFunctionSpec,
    weight: f64,
    training: &PointPattern,
    validation: &PointPattern,
    quad: &QuadratureScheme,
) -> Result<PredictionTerms> {
    tf.validate()?;
    if !(weight >= 0.0 && weight.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight must be finite and nonnegative, got {weight}")));
    }
    let val = locate(validation.points(), quad)?;
    let fold = FoldEval::direct(training, &val, quad, spec);
    let (sum, integral) = fold.terms(spec, tf, weight);
    Ok(PredictionTerms { sum, integral })
}

/// `sum_{v in validation} h(xi(v)) - sum_v q_v h(xi(v)) xi(v)` with
/// `xi = weight * lambda(. | training)`.
pub fn prediction_error(
    spec: &ModelSpec,
    tf: &TestFunctionSpec,
    weight: f64,
    training: &PointPattern,
    validation: &PointPattern,
    quad: &QuadratureScheme,
) -> Result<f64> {
    prediction_error_terms(spec, tf, weight, training, validation, quad).map(|t| t.value())
}

/// Auto-prediction of `x` from itself with unit weight; each data point is
/// evaluated against the rest of the pattern.
pub fn innovation(spec: &ModelSpec, tf: &TestFunctionSpec, x: &PointPattern, quad: &QuadratureScheme) -> Result<f64> {
    prediction_error(spec, tf, 1.0, x, x, quad)
}
