//! Cross-validation rounds built from independent thinnings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::pattern::{thinning_mask, PointPattern};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub enum CvScheme {
    MonteCarlo { p: f64 },
    MultinomialKFold { k: usize },
    Block { partition: Vec<Window> },
    GeneralizedMultinomial { k: usize },
}

/// One training/validation split. `validation_mask[i]` tells whether point
/// `i` of the source pattern is in the validation set.
#[derive(Debug, Clone, PartialEq)]
pub struct CvPair {
    pub training: PointPattern,
    pub validation: PointPattern,
    pub validation_mask: Vec<bool>,
}

impl CvPair {
    fn from_mask(x: &PointPattern, mask: Vec<bool>) -> Self {
        let (validation, training) = x.split_mask(&mask);
        Self { training, validation, validation_mask: mask }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRound {
    pub pairs: Vec<CvPair>,
    pub scheme: CvScheme,
}

impl CvRound {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    fn from_labels(x: &PointPattern, labels: &[usize], k: usize, scheme: CvScheme) -> Self {
        let pairs = (0..k).map(|i| CvPair::from_mask(x, labels.iter().map(|&l| l == i).collect())).collect();
        Self { pairs, scheme }
    }
}

/// `k` independent p-thinnings; validation sets may overlap.
pub fn cv_monte_carlo(x: &PointPattern, p: f64, k: usize, rng: &RngStream) -> Result<CvRound> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let pairs = (0..k)
        .map(|i| Ok(CvPair::from_mask(x, thinning_mask(x, |_| p, &rng.derive(i as u64))?)))
        .collect::<Result<_>>()?;
    Ok(CvRound { pairs, scheme: CvScheme::MonteCarlo { p } })
}

/// Each point gets a fold label uniform on `0..k`.
pub fn cv_multinomial_kfold(x: &PointPattern, k: usize, rng: &RngStream) -> Result<CvRound> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k-fold needs k >= 2, got {k}")));
    }
    let mut r = rng.rng();
    let labels: Vec<usize> = (0..x.len()).map(|_| r.random_range(0..k)).collect();
    Ok(CvRound::from_labels(x, &labels, k, CvScheme::MultinomialKFold { k }))
}

/// Deterministic block CV. Cells are half-open `[min, max)` on both axes,
/// except that an edge lying on the window's far boundary is closed.
pub fn cv_block(x: &PointPattern, partition: &[Window]) -> Result<CvRound> {
    check_partition(&x.window(), partition)?;
    let w = x.window();
    let labels = x
        .points()
        .iter()
        .map(|&u| {
            let hits: Vec<usize> = (0..partition.len()).filter(|&i| block_contains(&w, &partition[i], u)).collect();
            match hits[..] {
                [i] => Ok(i),
                _ => Err(Error::InvalidPartition(format!("point ({}, {}) falls in {} cells", u.x, u.y, hits.len()))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvRound::from_labels(x, &labels, partition.len(), CvScheme::Block { partition: partition.to_vec() }))
}

/// The `m` by `m` grid of equal blocks.
pub fn block_partition(window: &Window, m: usize) -> Vec<Window> {
    window.grid(m, m)
}

pub(crate) fn block_contains(window: &Window, cell: &Window, u: Point) -> bool {
    let ok = |v: f64, lo: f64, hi: f64, outer: f64| v >= lo && (v < hi || (v == hi && hi == outer));
    ok(u.x, cell.x_min(), cell.x_max(), window.x_max()) && ok(u.y, cell.y_min(), cell.y_max(), window.y_max())
}

fn check_partition(window: &Window, cells: &[Window]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::InvalidPartition("empty partition".into()));
    }
    let tol = 1e-9 * window.area();
    for (i, c) in cells.iter().enumerate() {
        let inside = c.x_min() >= window.x_min()
            && c.x_max() <= window.x_max()
            && c.y_min() >= window.y_min()
            && c.y_max() <= window.y_max();
        if !inside {
            return Err(Error::InvalidPartition(format!("cell {i} extends beyond the window")));
        }
        for (j, d) in cells.iter().enumerate().skip(i + 1) {
            let ox = (c.x_max().min(d.x_max()) - c.x_min().max(d.x_min())).max(0.0);
            let oy = (c.y_max().min(d.y_max()) - c.y_min().max(d.y_min())).max(0.0);
            if ox * oy > tol {
                return Err(Error::InvalidPartition(format!("cells {i} and {j} overlap")));
            }
        }
    }
    let covered: f64 = cells.iter().map(|c| c.area()).sum();
    if (covered - window.area()).abs() > tol {
        return Err(Error::InvalidPartition(format!("cells cover area {covered}, window area is {}", window.area())));
    }
    Ok(())
}

/// Labels drawn independently per point from `probs[i](point)`.
pub fn cv_generalized_multinomial(
    x: &PointPattern,
    probs: &[&dyn Fn(Point) -> f64],
    rng: &RngStream,
) -> Result<CvRound> {
    let k = probs.len();
    if k == 0 {
        return Err(Error::InvalidParameter("at least one probability function is required".into()));
    }
    let table = x
        .points()
        .iter()
        .map(|&u| {
            let row: Vec<f64> = probs.iter().map(|f| f(u)).collect();
            let sum: f64 = row.iter().sum();
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) || !((sum - 1.0).abs() <= 1e-9) {
                return Err(Error::InvalidProbabilities { sum, x: u.x, y: u.y });
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = rng.rng();
    let labels: Vec<usize> = table
        .iter()
        .map(|row| {
            let t: f64 = r.random();
            let mut acc = 0.0;
            for (i, &v) in row.iter().enumerate() {
                acc += v;
                if t < acc {
                    return i;
                }
            }
            // rounding left t beyond the cumulative sum; take the last positive entry
            row.iter().rposition(|&v| v > 0.0).unwrap_or(k - 1)
        })
        .collect();
    Ok(CvRound::from_labels(x, &labels, k, CvScheme::GeneralizedMultinomial { k }))
}

/// A CV scheme to be drawn from data, as used by the fitting routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum CvConfig {
    MonteCarlo {
        p: f64,
        k: usize,
    },
    MultinomialKFold {
        k: usize,
    },
    /// `m` by `m` equal blocks.
    Block {
        m: usize,
    },
}

impl CvConfig {
    pub fn draw(&self, x: &PointPattern, rng: &RngStream) -> Result<CvRound> {
        match *self {
            CvConfig::MonteCarlo { p, k } => cv_monte_carlo(x, p, k, rng),
            CvConfig::MultinomialKFold { k } => cv_multinomial_kfold(x, k, rng),
            CvConfig::Block { m } => {
                if m == 0 {
                    return Err(Error::InvalidParameter("block grid size must be positive".into()));
                }
                cv_block(x, &block_partition(&x.window(), m))
            }
        }
    }

    /// Retention probability of a single validation set, used by the
    /// fixed weight schemes.
    pub fn retention(&self) -> f64 {
        match *self {
            CvConfig::MonteCarlo { p, .. } => p,
            CvConfig::MultinomialKFold { k } => 1.0 / k as f64,
            CvConfig::Block { m } => 1.0 / (m * m) as f64,
        }
    }
}
