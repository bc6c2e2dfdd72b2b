//! Point patterns: finite sets of distinct points in a window.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::rng::RngStream;

/// A finite, simple point configuration observed in a rectangular window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    points: Vec<Point>,
    window: Window,
}

impl PointPattern {
    /// Builds a pattern, rejecting points outside the (closed) window and
    /// duplicated locations.
    pub fn new(points: Vec<Point>, window: Window) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::InvalidPoint(format!("non-finite coordinates ({}, {})", p.x, p.y)));
            }
            if !window.contains(*p) {
                return Err(Error::OutOfWindow { x: p.x, y: p.y });
            }
            if !seen.insert(p.key()) {
                return Err(Error::DuplicatePoint { x: p.x, y: p.y });
            }
        }
        Ok(Self { points, window })
    }

    pub fn empty(window: Window) -> Self {
        Self { points: Vec::new(), window }
    }

    pub fn from_xy(coords: &[(f64, f64)], window: Window) -> Result<Self> {
        let pts = coords.iter().map(|&(x, y)| Point::new(x, y)).collect::<Result<Vec<_>>>()?;
        Self::new(pts, window)
    }

    /// Splits by a boolean mask into `(selected, rest)`.
    pub(crate) fn split_mask(&self, mask: &[bool]) -> (Self, Self) {
        debug_assert_eq!(mask.len(), self.points.len());
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (p, &m) in self.points.iter().zip(mask) {
            if m {
                a.push(*p);
            } else {
                b.push(*p);
            }
        }
        (Self { points: a, window: self.window }, Self { points: b, window: self.window })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
    pub fn window(&self) -> Window {
        self.window
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        let k = p.key();
        self.points.iter().any(|q| q.key() == k)
    }

    /// Smallest pairwise distance, `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let n = self.points.len();
        if n < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(crate::geometry::distance(self.points[i], self.points[j]));
            }
        }
        Some(best)
    }

    /// Writes the points as CSV with header `x,y`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y"])?;
        for p in &self.points {
            wr.write_record([p.x.to_string(), p.y.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, window: Window) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rd.headers()?.clone();
        let xi = headers.iter().position(|h| h == "x");
        let yi = headers.iter().position(|h| h == "y");
        let (Some(xi), Some(yi)) = (xi, yi) else {
            return Err(Error::InvalidPoint("CSV header must contain columns x and y".into()));
        };
        let mut pts = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidPoint(format!("unparseable row {:?}", rec)))
            };
            pts.push(Point::new(parse(xi)?, parse(yi)?)?);
        }
        Self::new(pts, window)
    }

    /// Reads `<path>` as CSV and the window from the JSON sidecar
    /// `<path>.window.json`, falling back to the unit square when absent.
    pub fn load(path: &Path) -> Result<Self> {
        let sidecar = window_sidecar(path);
        let window =
            if sidecar.exists() { serde_json::from_reader(std::fs::File::open(&sidecar)?)? } else { Window::unit() };
        Self::read_csv(std::fs::File::open(path)?, window)
    }

    /// Writes `<path>` as CSV plus the `<path>.window.json` sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)?;
        let mut f = std::fs::File::create(window_sidecar(path))?;
        serde_json::to_writer(&mut f, &self.window)?;
        Ok(())
    }
}

pub fn window_sidecar(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".window.json");
    s.into()
}

/// Independent thinning mask: entry `i` is `true` when point `i` goes to the
/// validation set, which happens with probability `retention(point)`.
pub fn thinning_mask<F>(x: &PointPattern, retention: F, rng: &RngStream) -> Result<Vec<bool>>
where
    F: Fn(Point) -> f64,
{
    let probs = x
        .points
        .iter()
        .map(|&p| {
            let v = retention(p);
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(Error::InvalidRetention { value: v, x: p.x, y: p.y })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = rng.rng();
    Ok(probs.into_iter().map(|p| r.random::<f64>() < p).collect())
}

/// Independent thinning of `x`: returns `(validation, training)` where each
/// point enters the validation set independently with probability
/// `retention(point)` and the training set is the complement.
pub fn thin_independent<F>(x: &PointPattern, retention: F, rng: &RngStream) -> Result<(PointPattern, PointPattern)>
where
    F: Fn(Point) -> f64,
{
    let mask = thinning_mask(x, retention, rng)?;
    Ok(x.split_mask(&mask))
}
