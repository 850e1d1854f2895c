use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::categorize::{fuse_features, PointMatrix};
use crate::error::{CedaError, Result};
use crate::nullsim::{c1_test, null_band, C1Verdict, Statistic};
use crate::rng::SeedStream;
use crate::scalar::Real;
use crate::tabulate::{crosstab, EntropyReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct GridCell<F> {
    pub k_y: usize,
    pub k_x: usize,
    pub report: EntropyReport<F>,
    pub verdict: C1Verdict<F>,
}

/// Mutual information of `y` and `x` over every pair of cluster counts, each
/// axis categorized by one-dimensional K-means, with a mimic band per cell.
pub fn mi_grid<F: Real>(
    y: &[F],
    x: &[F],
    y_ladder: &[usize],
    x_ladder: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<Vec<GridCell<F>>> {
    if y_ladder.is_empty() || x_ladder.is_empty() {
        return Err(CedaError::invalid("cluster ladders must be non-empty"));
    }
    if y.len() != x.len() {
        return Err(CedaError::LengthMismatch {
            expected: y.len(),
            actual: x.len(),
        });
    }
    let stream = SeedStream::new(seed);
    let fit = |v: &[F], k: usize, tag: &str| {
        let pts = PointMatrix::new(v.to_vec(), v.len(), 1)?;
        fuse_features(&pts, k, stream.child_str(tag).child(k as u64).key())
    };
    let ys = y_ladder
        .par_iter()
        .map(|&k| fit(y, k, "y"))
        .collect::<Result<Vec<_>>>()?;
    let xs = x_ladder
        .par_iter()
        .map(|&k| fit(x, k, "x"))
        .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(usize, usize)> = (0..ys.len())
        .flat_map(|i| (0..xs.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let table = crosstab(&[&xs[j]], &ys[i])?;
            let report = EntropyReport::<F>::from_table(&table);
            let cell_stream = stream
                .child_str("band")
                .child(y_ladder[i] as u64)
                .child(x_ladder[j] as u64);
            let band = null_band::<F>(
                &table,
                Statistic::MutualInformation,
                replicates,
                cell_stream,
            )?;
            Ok(GridCell {
                k_y: y_ladder[i],
                k_x: x_ladder[j],
                verdict: c1_test(report.mi, &band),
                report,
            })
        })
        .collect()
}
