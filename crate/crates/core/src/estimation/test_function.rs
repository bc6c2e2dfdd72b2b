use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `h(xi) = min(xi^-alpha, C)`; `alpha = 1` is the Stoyan-Grabarnik choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    pub alpha: f64,
    #[serde(default)]
    pub truncation: Option<f64>,
}

/// Truncation applied to hard-core objectives by default.
pub const HARD_CORE_TRUNCATION: f64 = 1e6;

impl TestFunctionSpec {
    pub fn new(alpha: f64, truncation: Option<f64>) -> Result<Self> {
        let tf = Self { alpha, truncation };
        tf.validate()?;
        Ok(tf)
    }

    pub fn stoyan_grabarnik() -> Self {
        Self { alpha: 1.0, truncation: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("test function alpha must be >= 0, got {}", self.alpha)));
        }
        if let Some(c) = self.truncation {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("truncation must be positive, got {c}")));
            }
        }
        Ok(())
    }

    fn cap(&self) -> f64 {
        self.truncation.unwrap_or(f64::INFINITY)
    }

    /// `h(xi)`.
    pub fn h(&self, xi: f64) -> f64 {
        let raw = if self.alpha == 0.0 {
            1.0
        } else if xi == 0.0 {
            f64::INFINITY
        } else if self.alpha == 1.0 {
            1.0 / xi
        } else {
            xi.powf(-self.alpha)
        };
        raw.min(self.cap())
    }

    /// `h(xi) * xi` for the compensator. At `xi = 0` the untruncated
    /// `alpha = 1` product is taken as `1` (`0/0 = 1`); a truncated `h` gives `0`.
    pub fn h_times_xi(&self, xi: f64) -> f64 {
        if xi == 0.0 {
            return match self.truncation {
                Some(_) => 0.0,
                None if self.alpha < 1.0 => 0.0,
                None if self.alpha == 1.0 => 1.0,
                None => f64::INFINITY,
            };
        }
        let raw = if self.alpha == 0.0 {
            xi
        } else if self.alpha == 1.0 {
            1.0
        } else {
            xi.powf(1.0 - self.alpha)
        };
        raw.min(self.cap() * xi)
    }

    /// True when `h * xi == 1` for every `xi > 0`.
    pub(crate) fn is_exact_sg(&self) -> bool {
        self.alpha == 1.0 && self.truncation.is_none()
    }
}

/// `h(xi)` as a free function.
pub fn test_function(tf: &TestFunctionSpec, xi: f64) -> f64 {
    tf.h(xi)
}
