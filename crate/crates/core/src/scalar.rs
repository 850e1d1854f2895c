use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar used throughout the numeric core: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from a count.
    #[inline]
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).unwrap_or_else(Self::infinity)
    }

    /// Lossy conversion from `f64`, used for constants and configuration.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `n ln n` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlogx<F: Real>(n: u64) -> F {
    if n == 0 {
        F::zero()
    } else {
        let x = F::from_count(n);
        x * x.ln()
    }
}

/// Linear-interpolation quantile of an ascending slice (type 7).
pub fn quantile_sorted<F: Real>(sorted: &[F], p: f64) -> F {
    let n = sorted.len();
    if n == 0 {
        return F::nan();
    }
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = F::lit(h - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Mean and sample standard deviation (`n - 1` denominator).
pub fn mean_sd<F: Real>(xs: &[F]) -> (F, F) {
    let n = xs.len();
    if n == 0 {
        return (F::nan(), F::nan());
    }
    let mean = xs.iter().copied().sum::<F>() / F::from_count(n as u64);
    if n == 1 {
        return (mean, F::zero());
    }
    let ss: F = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, (ss / F::from_count(n as u64 - 1)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let xs: Vec<f64> = (0..100).map(f64::from).collect();
        assert!((quantile_sorted(&xs, 0.05) - 4.95).abs() < 1e-12);
        assert!((quantile_sorted(&xs, 0.95) - 94.05).abs() < 1e-12);
        assert_eq!(quantile_sorted(&xs, 0.0), 0.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 99.0);
    }

    #[test]
    fn sample_sd() {
        let (m, s) = mean_sd(&[1.0f64, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
