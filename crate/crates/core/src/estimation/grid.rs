use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec, ParamVector};

/// Cartesian grid of candidate parameter vectors. Axes follow the family's
/// parameter order; enumeration runs with the first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ParamGrid {
    axes: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for ParamGrid {
    type Error = Error;
    fn try_from(axes: Vec<Vec<f64>>) -> Result<Self> {
        ParamGrid::new(axes)
    }
}

impl From<ParamGrid> for Vec<Vec<f64>> {
    fn from(g: ParamGrid) -> Self {
        g.axes
    }
}

impl ParamGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidParameter(format!("grid axis {i} is empty")));
            }
            if a.iter().any(|v| !v.is_finite()) || a.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidParameter(format!("grid axis {i} must be finite and strictly increasing")));
            }
        }
        Ok(Self { axes })
    }

    /// `n` evenly spaced values from `lo` to `hi`, both endpoints exact.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        let mut v: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        v[n - 1] = hi;
        v
    }

    /// `lo, lo + step, ..., hi`, rounded to 10 decimals so that grids written
    /// in decimal land on their decimal values.
    pub fn arange(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| round10(lo + step * i as f64)).collect()
    }

    /// A one-point grid at `spec`.
    pub fn single(spec: &ModelSpec) -> Self {
        Self { axes: spec.params().0.into_iter().map(|v| vec![v]).collect() }
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point number `i` in enumeration order.
    pub fn point(&self, mut i: usize) -> ParamVector {
        let mut v = vec![0.0; self.axes.len()];
        for (d, a) in self.axes.iter().enumerate().rev() {
            v[d] = a[i % a.len()];
            i /= a.len();
        }
        ParamVector(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = ParamVector> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn check_family(&self, family: Family) -> Result<()> {
        if self.axes.len() != family.arity() {
            return Err(Error::InvalidParameter(format!(
                "{family} grid needs {} axes ({}), got {}",
                family.arity(),
                family.param_names().join(", "),
                self.axes.len()
            )));
        }
        Ok(())
    }
}

fn round10(v: f64) -> f64 {
    let r = (v * 1e10).round() / 1e10;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Exhaustive minimisation; ties go to the first grid point in order.
pub fn grid_search<F>(objective: F, grid: &ParamGrid) -> Result<(ParamVector, f64)>
where
    F: FnMut(&ParamVector) -> f64,
{
    let points: Vec<ParamVector> = grid.iter().collect();
    let values: Vec<f64> = points.iter().map(objective).collect();
    let i = argmin_first(&values).ok_or(Error::NoFeasiblePoint)?;
    Ok((points[i].clone(), values[i]))
}

/// Index of the smallest finite value, first occurrence on ties.
pub fn argmin_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best
}
