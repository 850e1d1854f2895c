use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};
use crate::scalar::{quantile_sorted, Real};
use crate::tabulate::CategoricalSeries;

/// `1+K+1` histogram: `K` equal-width bins across the `[low_q, high_q]`
/// quantile range plus two unbounded tail bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct BinningScheme<F> {
    pub edges: Vec<F>,
    pub low_q: F,
    pub high_q: F,
    pub k_interior: usize,
}

impl<F: Real> BinningScheme<F> {
    /// Number of bins, `edges.len() + 1`.
    pub fn bins(&self) -> usize {
        self.edges.len() + 1
    }

    /// Label of one value: the number of edges strictly below it.
    pub fn label(&self, v: F) -> Option<u32> {
        if v.is_nan() {
            return None;
        }
        Some(self.edges.partition_point(|&e| e < v) as u32)
    }

    /// Population mass of each bin implied by the quantile anchors.
    pub fn nominal_masses(&self) -> Vec<f64> {
        let lo = self.low_q.as_f64();
        let hi = self.high_q.as_f64();
        let k = self.k_interior.max(1);
        let mut m = vec![lo];
        m.extend(std::iter::repeat((hi - lo) / k as f64).take(k));
        m.push(1.0 - hi);
        m
    }
}

/// Fits a `1+K+1` scheme with type-7 quantile anchors.
pub fn quantile_bins<F: Real>(
    values: &[F],
    k_interior: usize,
    low_q: f64,
    high_q: f64,
) -> Result<BinningScheme<F>> {
    if k_interior < 1 {
        return Err(CedaError::invalid("k_interior must be at least 1"));
    }
    if !(0.0 < low_q && low_q < high_q && high_q < 1.0) {
        return Err(CedaError::invalid(
            "quantile anchors must satisfy 0 < low < high < 1",
        ));
    }
    if values.is_empty() {
        return Err(CedaError::EmptyInput);
    }
    if values.len() < k_interior + 2 {
        return Err(CedaError::invalid(format!(
            "need at least {} values for {} interior bins",
            k_interior + 2,
            k_interior
        )));
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(CedaError::NonFinite { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let lo = quantile_sorted(&sorted, low_q);
    let hi = quantile_sorted(&sorted, high_q);
    if hi <= lo {
        return Err(CedaError::DegenerateFeature);
    }
    let step = (hi - lo) / F::from_count(k_interior as u64);
    let mut edges: Vec<F> = (0..k_interior)
        .map(|i| lo + step * F::from_count(i as u64))
        .collect();
    edges.push(hi);
    edges.dedup_by(|a, b| a <= b);
    Ok(BinningScheme {
        edges,
        low_q: F::lit(low_q),
        high_q: F::lit(high_q),
        k_interior,
    })
}

/// Labels values with a fitted scheme; right-closed bins.
pub fn apply_bins<F: Real>(values: &[F], scheme: &BinningScheme<F>) -> Result<CategoricalSeries> {
    let labels = values
        .iter()
        .enumerate()
        .map(|(index, &v)| scheme.label(v).ok_or(CedaError::NonFinite { index }))
        .collect::<Result<Vec<_>>>()?;
    CategoricalSeries::new(labels, scheme.bins() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_on_a_ramp() {
        let v: Vec<f64> = (0..100).map(f64::from).collect();
        let s = quantile_bins(&v, 10, 0.05, 0.95).unwrap();
        assert_eq!(s.edges.len(), 11);
        assert!((s.edges[0] - 4.95).abs() < 1e-12);
        assert!((s.edges[10] - 94.05).abs() < 1e-12);
        for w in s.edges.windows(2) {
            assert!((w[1] - w[0] - 8.91).abs() < 1e-9);
        }
    }

    #[test]
    fn single_interior_bin() {
        let v: Vec<f64> = (0..20).map(f64::from).collect();
        let s = quantile_bins(&v, 1, 0.05, 0.95).unwrap();
        assert_eq!(s.bins(), 3);
        let l = apply_bins(&v, &s).unwrap();
        assert_eq!(l.labels()[0], 0);
        assert_eq!(l.labels()[10], 1);
        assert_eq!(l.labels()[19], 2);
    }

    #[test]
    fn constant_input_is_degenerate() {
        assert_eq!(
            quantile_bins(&[3.0f64; 50], 10, 0.05, 0.95),
            Err(CedaError::DegenerateFeature)
        );
        assert!(quantile_bins(&[1.0f64, 2.0, 3.0], 0, 0.05, 0.95).is_err());
    }

    #[test]
    fn edge_value_goes_to_lower_bin_and_nan_fails() {
        let s = BinningScheme {
            edges: vec![0.0f64, 1.0, 2.0],
            low_q: 0.05,
            high_q: 0.95,
            k_interior: 2,
        };
        assert_eq!(s.label(-5.0), Some(0));
        assert_eq!(s.label(0.0), Some(0));
        assert_eq!(s.label(1.0), Some(1));
        assert_eq!(s.label(1.5), Some(2));
        assert_eq!(s.label(9.0), Some(3));
        assert!(matches!(
            apply_bins(&[0.0, f64::NAN], &s),
            Err(CedaError::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn scheme_json_has_edges() {
        let v: Vec<f64> = (0..30).map(f64::from).collect();
        let s = quantile_bins(&v, 2, 0.05, 0.95).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert!(j["edges"].is_array());
        let back: BinningScheme<f64> = serde_json::from_value(j).unwrap();
        assert_eq!(back, s);
    }
}
