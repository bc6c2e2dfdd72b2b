//! Planar points and axis-aligned rectangular windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidPoint(format!("non-finite coordinates ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// Bit-level key used for exact set membership.
    pub(crate) fn key(&self) -> (u64, u64) {
        // +0.0 and -0.0 compare equal, so normalise before taking bits.
        let norm = |v: f64| if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() };
        (norm(self.x), norm(self.y))
    }
}

/// Euclidean distance.
pub fn distance(a: Point, b: Point) -> f64 {
    distance_sq(a, b).sqrt()
}

/// Squared Euclidean distance.
#[inline]
pub(crate) fn distance_sq(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

/// An axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct Window {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl TryFrom<RawWindow> for Window {
    type Error = Error;
    fn try_from(r: RawWindow) -> Result<Self> {
        Window::new(r.x_min, r.x_max, r.y_min, r.y_max)
    }
}

impl From<Window> for RawWindow {
    fn from(w: Window) -> Self {
        RawWindow { x_min: w.x_min, x_max: w.x_max, y_min: w.y_min, y_max: w.y_max }
    }
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || !(x_min < x_max) || !(y_min < y_max) {
            return Err(Error::InvalidWindow(format!(
                "[{x_min}, {x_max}] x [{y_min}, {y_max}] must be finite with min < max"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    /// The unit square `[0, 1]^2`.
    pub fn unit() -> Self {
        Self { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn y_min(&self) -> f64 {
        self.y_min
    }
    pub fn y_max(&self) -> f64 {
        self.y_max
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }
    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// Splits the window into an `nx` by `ny` grid of equal rectangles,
    /// ordered row-major from the bottom-left corner.
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<Window> {
        let xs = self.cuts(self.x_min, self.x_max, nx);
        let ys = self.cuts(self.y_min, self.y_max, ny);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(Window { x_min: xs[i], x_max: xs[i + 1], y_min: ys[j], y_max: ys[j + 1] });
            }
        }
        out
    }

    fn cuts(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        // pin the far edge so the cells cover the window exactly
        v[n] = hi;
        v
    }
}
