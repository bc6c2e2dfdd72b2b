use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};
use crate::pattern::PointPattern;
use crate::rng::RngStream;
use crate::sampling::CvConfig;

use super::engine::{FoldEval, Master};
use super::grid::{argmin_first, ParamGrid};
use super::loss::{loss, LossSpec};
use super::quadrature::QuadratureScheme;
use super::test_function::{TestFunctionSpec, HARD_CORE_TRUNCATION};
use super::weights::{WeightEstimator, WeightScheme};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutcome {
    pub spec: ModelSpec,
    pub objective: f64,
}

/// Settings shared by every PPL fit of one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PplOptions {
    pub cv: CvConfig,
    pub weights: Vec<WeightScheme>,
    pub losses: Vec<LossSpec>,
    pub tf: TestFunctionSpec,
    pub dummy: usize,
}

/// Stoyan-Grabarnik, truncated at `1e6` for the hard-core family.
pub fn default_test_function(family: Family) -> TestFunctionSpec {
    TestFunctionSpec { alpha: 1.0, truncation: (family == Family::HardCore).then_some(HARD_CORE_TRUNCATION) }
}

fn grid_radius(family: Family, grid: &ParamGrid) -> Option<f64> {
    (family != Family::Poisson).then(|| *grid.axes()[1].last().expect("non-empty axis"))
}

fn specs(family: Family, grid: &ParamGrid) -> Result<Vec<ModelSpec>> {
    grid.check_family(family)?;
    grid.iter().map(|p| ModelSpec::from_params(family, &p.0)).collect()
}

fn pick(specs: &[ModelSpec], values: &[f64]) -> Result<FitOutcome> {
    let i = argmin_first(values).ok_or(Error::NoFeasiblePoint)?;
    Ok(FitOutcome { spec: specs[i], objective: values[i] })
}

/// PPL fits for every combination of weight scheme and loss, sharing one CV
/// round. Indexed `[weight][loss]`.
pub fn fit_ppl_multi(
    x: &PointPattern,
    family: Family,
    grid: &ParamGrid,
    opts: &PplOptions,
    rng: &RngStream,
) -> Result<Vec<Vec<Result<FitOutcome>>>> {
    opts.tf.validate()?;
    for w in &opts.weights {
        w.validate()?;
    }
    if opts.dummy == 0 {
        return Err(Error::InvalidParameter("dummy resolution must be positive".into()));
    }
    let specs = specs(family, grid)?;
    let r_max = grid_radius(family, grid);
    let master = Master::new(x, opts.dummy, r_max);
    let round = opts.cv.draw(x, &rng.derive(0))?;
    let folds: Vec<FoldEval> = round
        .pairs
        .iter()
        .map(|pair| {
            let val: Vec<usize> = (0..x.len()).filter(|&j| pair.validation_mask[j]).collect();
            let train: Vec<bool> = pair.validation_mask.iter().map(|v| !v).collect();
            master.fold(&train, &val, master.quadrature(&val), family, None)
        })
        .collect();
    let nonempty: Vec<bool> = folds.iter().map(|f| f.nonempty).collect();
    let p = opts.cv.retention();
    let mut estimators = opts
        .weights
        .iter()
        .map(|w| match *w {
            WeightScheme::Estimated { k_prime } => {
                WeightEstimator::new(&master, family, r_max, p, k_prime, &rng.derive(1)).map(Some)
            }
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;

    let (nw, nl) = (opts.weights.len(), opts.losses.len());
    let mut values = vec![vec![Vec::with_capacity(specs.len()); nl]; nw];
    let mut errors = vec![0.0; folds.len()];
    for spec in &specs {
        for (wi, ws) in opts.weights.iter().enumerate() {
            let w = match (ws.fixed(p), &mut estimators[wi]) {
                (Some(w), _) => w,
                (None, Some(est)) => est.weight(spec),
                (None, None) => unreachable!("estimator built for every estimated scheme"),
            };
            for (e, f) in errors.iter_mut().zip(&folds) {
                *e = f.error(spec, &opts.tf, w);
            }
            for (li, ls) in opts.losses.iter().enumerate() {
                values[wi][li].push(loss(ls, &errors, &nonempty));
            }
        }
    }
    Ok(values.iter().map(|per_loss| per_loss.iter().map(|v| pick(&specs, v)).collect()).collect())
}

/// Point Process Learning: minimise the loss of CV prediction errors over
/// the grid. One CV round is drawn from `rng.derive(0)` and reused for every
/// grid point; the estimated weight draws its thinnings from `rng.derive(1)`.
#[allow(clippy::too_many_arguments)]
pub fn fit_ppl(
    x: &PointPattern,
    family: Family,
    grid: &ParamGrid,
    cv: &CvConfig,
    ws: &WeightScheme,
    tf: &TestFunctionSpec,
    ls: &LossSpec,
    dummy: usize,
    rng: &RngStream,
) -> Result<FitOutcome> {
    let opts = PplOptions { cv: *cv, weights: vec![*ws], losses: vec![*ls], tf: *tf, dummy };
    fit_ppl_multi(x, family, grid, &opts, rng)?.remove(0).remove(0)
}

/// Takacs-Fiksel: minimise `|innovation|` over the grid.
pub fn fit_tf(
    x: &PointPattern,
    family: Family,
    grid: &ParamGrid,
    tf: &TestFunctionSpec,
    dummy: usize,
) -> Result<FitOutcome> {
    tf.validate()?;
    if dummy == 0 {
        return Err(Error::InvalidParameter("dummy resolution must be positive".into()));
    }
    let specs = specs(family, grid)?;
    let master = Master::new(x, dummy, grid_radius(family, grid));
    let all: Vec<usize> = (0..x.len()).collect();
    let auto = master.fold(&vec![true; x.len()], &all, master.quadrature(&all), family, None);
    let values: Vec<f64> = specs.iter().map(|s| auto.error(s, tf, 1.0).abs()).collect();
    pick(&specs, &values)
}

/// Grid for `(beta, R)` adapted to a hard-core pattern: `R` spans
/// `[R0 / 2, R0]` with `R0` the smallest interpoint distance, and `beta`
/// spans `[n / |S|, n / |S_free|]`, where `|S_free|` sums the quadrature
/// weights of nodes outside every ball `b(x_i, R0)`.
pub fn hardcore_adaptive_grid(x: &PointPattern, n_values: usize, quad: &QuadratureScheme) -> Result<ParamGrid> {
    let r0 = x
        .min_pairwise_distance()
        .ok_or_else(|| Error::DegeneratePattern(format!("adaptive grid needs at least 2 points, got {}", x.len())))?;
    if n_values < 2 {
        return Err(Error::InvalidParameter("adaptive grid needs at least 2 values per axis".into()));
    }
    let free: f64 = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .filter(|(u, _)| x.points().iter().all(|p| crate::geometry::distance(**u, *p) > r0))
        .map(|(_, w)| w)
        .sum();
    if free <= 0.0 {
        return Err(Error::DegeneratePattern("hard-core balls cover every quadrature node".into()));
    }
    let n = x.len() as f64;
    let area = x.window().area();
    ParamGrid::new(vec![ParamGrid::linspace(n / area, n / free, n_values), ParamGrid::linspace(r0 / 2.0, r0, n_values)])
}
