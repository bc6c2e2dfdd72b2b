//! Arithmetic conventions for degenerate ratios and powers.
//!
//! Two different `0/0` conventions are in play: weight ratios treat `0/0` as
//! `0`, while the Stoyan-Grabarnik product `h * xi` treats it as `1`. Every
//! call site states which one it uses.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroOverZero {
    Zero,
    One,
}

/// `num / den` with `0/0` resolved by `conv`. A positive numerator over zero
/// gives `+inf`.
pub fn ratio(num: f64, den: f64, conv: ZeroOverZero) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            match conv {
                ZeroOverZero::Zero => 0.0,
                ZeroOverZero::One => 1.0,
            }
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `count * ln(base)`, the log of `base^count`, with `0^0 = 1`.
///
/// `base == 0` and `count > 0` yields `-inf`.
pub fn log_pow(base: f64, count: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else {
        count * base.ln()
    }
}

/// `exp` of a difference of log-values that may be `-inf`; the ratio
/// `exp(a) / exp(b)` with `0/0 = 0`.
pub fn exp_diff_zero(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        0.0
    } else if b == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (a - b).exp()
    }
}
