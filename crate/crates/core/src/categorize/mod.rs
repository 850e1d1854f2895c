//! Turning quantitative features into categorical series.

mod binning;
mod kmeans;
mod product;

pub use binning::{apply_bins, quantile_bins, BinningScheme};
pub use kmeans::{fuse_features, kmeans_fit, KMeansConfig, KMeansModel, PointMatrix};
pub use product::product_categories;

use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};
use crate::scalar::Real;
use crate::tabulate::CategoricalSeries;

/// How a single numeric feature is categorized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Categorizer {
    /// `1+k+1` quantile binning.
    Quantile { k: usize, low: f64, high: f64 },
    /// One-dimensional K-means with `k` clusters.
    #[serde(rename = "kmeans")]
    KMeans { k: usize },
    /// Values are already non-negative integer codes.
    Passthrough,
}

impl Categorizer {
    pub fn quantile(k: usize) -> Self {
        Categorizer::Quantile {
            k,
            low: 0.05,
            high: 0.95,
        }
    }

    /// Number of categories produced, when fixed in advance.
    pub fn cardinality(&self) -> Option<usize> {
        match *self {
            Categorizer::Quantile { k, .. } => Some(k + 2),
            Categorizer::KMeans { k } => Some(k),
            Categorizer::Passthrough => None,
        }
    }

    /// Population mass of each category for a continuous feature:
    /// the quantile anchors for `Quantile`, uniform otherwise.
    pub fn nominal_masses(&self) -> Option<Vec<f64>> {
        match *self {
            Categorizer::Quantile { k, low, high } => {
                let mut m = vec![low];
                m.extend(std::iter::repeat((high - low) / k as f64).take(k));
                m.push(1.0 - high);
                Some(m)
            }
            Categorizer::KMeans { k } => Some(vec![1.0 / k as f64; k]),
            Categorizer::Passthrough => None,
        }
    }

    pub fn categorize<F: Real>(&self, values: &[F], seed: u64) -> Result<CategoricalSeries> {
        match *self {
            Categorizer::Quantile { k, low, high } => {
                let scheme = quantile_bins(values, k, low, high)?;
                apply_bins(values, &scheme)
            }
            Categorizer::KMeans { k } => {
                let pts = PointMatrix::new(values.to_vec(), values.len(), 1)?;
                fuse_features(&pts, k, seed)
            }
            Categorizer::Passthrough => {
                let labels = values
                    .iter()
                    .enumerate()
                    .map(|(index, v)| {
                        let x = v.as_f64();
                        if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX)
                        {
                            Ok(x as u32)
                        } else {
                            Err(CedaError::NonFinite { index })
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                CategoricalSeries::from_labels(labels)
            }
        }
    }
}
