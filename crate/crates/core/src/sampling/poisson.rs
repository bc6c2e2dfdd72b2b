use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{Point, Window};
use crate::pattern::PointPattern;
use crate::rng::RngStream;

/// Inhomogeneous Poisson process by thinning a homogeneous one at rate
/// `intensity_max`.
pub fn sample_poisson<F>(intensity: F, intensity_max: f64, window: &Window, rng: &RngStream) -> Result<PointPattern>
where
    F: Fn(Point) -> f64,
{
    if !(intensity_max.is_finite() && intensity_max > 0.0) {
        return Err(Error::InvalidParameter(format!("intensity_max must be positive and finite, got {intensity_max}")));
    }
    let mut r = rng.rng();
    let n = poisson_count(intensity_max * window.area(), &mut r);
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let u = uniform_point(window, &mut r);
        let v = intensity(u);
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "intensity {v} at ({}, {}) is not a nonnegative number",
                u.x, u.y
            )));
        }
        if v > intensity_max {
            return Err(Error::EnvelopeViolation { value: v, max: intensity_max, x: u.x, y: u.y });
        }
        if r.random::<f64>() * intensity_max < v {
            pts.push(u);
        }
    }
    PointPattern::new(pts, *window)
}

pub(crate) fn poisson_count<R: Rng>(mean: f64, r: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(r) as usize
}

pub(crate) fn uniform_point<R: Rng>(w: &Window, r: &mut R) -> Point {
    Point { x: r.random_range(w.x_min()..w.x_max()), y: r.random_range(w.y_min()..w.y_max()) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_intensity_gives_empty_pattern() {
        for s in 0..20 {
            let x = sample_poisson(|_| 0.0, 50.0, &Window::unit(), &RngStream::new(s, 0)).unwrap();
            assert!(x.is_empty());
        }
    }

    #[test]
    fn envelope_violation_is_reported() {
        let err = sample_poisson(|_| 20.0, 10.0, &Window::unit(), &RngStream::new(3, 0)).unwrap_err();
        assert!(matches!(err, Error::EnvelopeViolation { .. }));
        assert!(sample_poisson(|_| 1.0, 0.0, &Window::unit(), &RngStream::new(3, 0)).is_err());
    }

    #[test]
    fn deterministic_per_stream() {
        let w = Window::unit();
        let a = sample_poisson(|u| 100.0 * u.y, 100.0, &w, &RngStream::new(9, 2)).unwrap();
        let b = sample_poisson(|u| 100.0 * u.y, 100.0, &w, &RngStream::new(9, 2)).unwrap();
        assert_eq!(a, b);
    }
}
