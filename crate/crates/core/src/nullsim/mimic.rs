use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::tabulate::ContingencyTable;

/// Allocates `n` records across rows with probabilities `row_sums / total`
/// by sequential conditional binomials. `tail[r]` is `Σ_{s≥r} row_sums[s]`.
pub(crate) fn multinomial_into<R: Rng + ?Sized>(
    n: u64,
    row_sums: &[u64],
    tail: &[u64],
    out: &mut [u64],
    rng: &mut R,
) {
    let mut left = n;
    let last = row_sums.len() - 1;
    for r in 0..row_sums.len() {
        if left == 0 {
            out[r] = 0;
            continue;
        }
        let draw = if r == last || row_sums[r] == tail[r] {
            left
        } else if row_sums[r] == 0 {
            0
        } else {
            let p = row_sums[r] as f64 / tail[r] as f64;
            Binomial::new(left, p).map_or(0, |b| b.sample(rng))
        };
        out[r] = draw;
        left -= draw;
    }
}

pub(crate) fn suffix_sums(xs: &[u64]) -> Vec<u64> {
    let mut tail = vec![0u64; xs.len()];
    let mut acc = 0u64;
    for (t, &x) in tail.iter_mut().zip(xs).rev() {
        acc += x;
        *t = acc;
    }
    tail
}

/// Fills `out` (row-major, same shape as `table`) with one mimic draw.
pub(crate) fn mimic_counts<R: Rng + ?Sized>(
    table: &ContingencyTable,
    row_sums: &[u64],
    tail: &[u64],
    col_sums: &[u64],
    out: &mut [u64],
    column: &mut [u64],
    rng: &mut R,
) {
    let cols = table.cols();
    for (c, &n_c) in col_sums.iter().enumerate() {
        multinomial_into(n_c, row_sums, tail, column, rng);
        for (r, &v) in column.iter().enumerate() {
            out[r * cols + c] = v;
        }
    }
}

/// A table with the observed column sums whose rows are filled independently
/// of the response: each column is a multinomial draw over rows with the
/// observed row-margin proportions.
pub fn mimic_table<R: Rng + ?Sized>(table: &ContingencyTable, rng: &mut R) -> ContingencyTable {
    let row_sums = table.row_sums();
    let tail = suffix_sums(&row_sums);
    let col_sums = table.col_sums();
    let mut out = vec![0u64; table.counts().len()];
    let mut column = vec![0u64; table.rows()];
    mimic_counts(
        table,
        &row_sums,
        &tail,
        &col_sums,
        &mut out,
        &mut column,
        rng,
    );
    table.with_counts(out)
}
