use nalgebra::DMatrix;

use crate::error::{CedaError, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `d x d` matrix with unit diagonal and `rho` elsewhere.
pub fn compound_symmetry(d: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { rho })
}

/// Differential entropy of `N(μ, Σ)` in nats: `½ ln det Σ + d/2 (1 + ln 2π)`.
pub fn gaussian_entropy(cov: &DMatrix<f64>) -> Result<f64> {
    if cov.nrows() != cov.ncols() || cov.nrows() == 0 {
        return Err(CedaError::invalid(
            "covariance must be a non-empty square matrix",
        ));
    }
    let d = cov.nrows() as f64;
    let chol = cov
        .clone()
        .cholesky()
        .ok_or(CedaError::NotPositiveDefinite)?;
    let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    Ok(0.5 * log_det + 0.5 * d * (1.0 + LN_2PI))
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x - 0.5 * LN_2PI).exp()
}

/// Entropy of the equal-weight mixture `½ N(0,1) + ½ N(gap,1)` by composite
/// Simpson quadrature.
pub fn two_normal_mixture_entropy(gap: f64) -> f64 {
    let (lo, hi) = (gap.min(0.0) - 12.0, gap.max(0.0) + 12.0);
    let steps = (((hi - lo) / 1e-3).ceil() as usize).next_multiple_of(2);
    let h = (hi - lo) / steps as f64;
    let integrand = |y: f64| {
        let f = 0.5 * phi(y) + 0.5 * phi(y - gap);
        if f > 0.0 {
            -f * f.ln()
        } else {
            0.0
        }
    };
    let mut acc = integrand(lo) + integrand(hi);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(lo + i as f64 * h);
    }
    acc * h / 3.0
}

/// `(H[Y], H[Y|V1], I[Y;V1])` for two equal halves `N(0,1)` and `N(gap,1)`.
pub fn theoretical_two_normal(gap: f64) -> (f64, f64, f64) {
    let h_y = two_normal_mixture_entropy(gap);
    let h_cond = 0.5 * (1.0 + LN_2PI);
    (h_y, h_cond, (h_y - h_cond).max(0.0))
}

/// Analytic values for the standard two-population example (`gap = 1`).
pub fn theoretical_ex1() -> (f64, f64, f64) {
    theoretical_two_normal(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_entropies() {
        assert!((gaussian_entropy(&DMatrix::identity(1, 1)).unwrap() - 1.418_938_5).abs() < 1e-6);
        assert!((gaussian_entropy(&compound_symmetry(4, 0.5)).unwrap() - 5.0942).abs() < 5e-4);
        assert!((gaussian_entropy(&compound_symmetry(4, 0.7)).unwrap() - 4.4355).abs() < 5e-4);
        assert_eq!(
            gaussian_entropy(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])),
            Err(CedaError::NotPositiveDefinite)
        );
    }

    #[test]
    fn mixture_limits() {
        // Trapezoid rule on a 1e-4 grid over [-12, 13].
        let (h, c, i) = theoretical_ex1();
        assert!((h - 1.530_360_015).abs() < 1e-7);
        assert!((c - 1.418_938_533).abs() < 1e-7);
        assert!((i - (h - c)).abs() < 1e-15);
        assert!(theoretical_two_normal(0.0).2.abs() < 1e-9);
        assert!((theoretical_two_normal(40.0).2 - 2f64.ln()).abs() < 1e-6);
    }
}
