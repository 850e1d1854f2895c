use serde::{Deserialize, Serialize};

use super::band::{NullBand, Statistic};
use super::mimic::{multinomial_into, suffix_sums};
use crate::error::Result;
use crate::rng::SeedStream;
use crate::scalar::Real;
use crate::tabulate::{entropy_of_counts_fast, per_column_row_entropy, ContingencyTable};

/// Observed row-mix entropy of one response column against its mimic band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct ColumnVerdict<F> {
    pub column: usize,
    pub observed: F,
    pub mean: F,
    pub q025: F,
    pub q975: F,
    pub flagged: bool,
}

/// Flags response columns whose row-label mix falls outside the band of
/// `Multinomial(n_c, row proportions)` draws.
pub fn localize_differences<F: Real>(
    table: &ContingencyTable,
    replicates: usize,
    stream: SeedStream,
) -> Result<Vec<ColumnVerdict<F>>> {
    let observed = per_column_row_entropy::<F>(table);
    let row_sums = table.row_sums();
    let tail = suffix_sums(&row_sums);
    let col_sums = table.col_sums();
    let single = table.cols() == 1;
    observed
        .into_iter()
        .map(|(c, obs)| {
            let n_c = col_sums[c];
            let band = NullBand::<F>::simulate(
                Statistic::Custom,
                replicates,
                stream.child(c as u64),
                |rng| {
                    let mut draw = vec![0u64; row_sums.len()];
                    multinomial_into(n_c, &row_sums, &tail, &mut draw, rng);
                    F::lit(entropy_of_counts_fast(&draw))
                },
            )?;
            let flagged = !single && n_c > 0 && (obs < band.q025 || obs > band.q975);
            Ok(ColumnVerdict {
                column: c,
                observed: obs,
                mean: band.mean,
                q025: band.q025,
                q975: band.q975,
                flagged,
            })
        })
        .collect()
}
