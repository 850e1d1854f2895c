use serde::{Deserialize, Serialize};

use super::table::ContingencyTable;
use crate::scalar::{xlogx, Real};

const CLAMP: f64 = 1e-12;

/// Entropy of a count vector, `ln N - (1/N) Σ n ln n`.
pub fn entropy_of_counts<F: Real>(counts: &[u64]) -> F {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return F::zero();
    }
    let s: F = counts.iter().map(|&c| xlogx::<F>(c)).sum();
    let h = (xlogx::<F>(n) - s) / F::from_count(n);
    h.max(F::zero())
}

#[inline]
fn xlx(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * x.ln()
    }
}

pub(crate) fn entropy_of_counts_fast(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let s: f64 = counts.iter().map(|&c| xlx(c)).sum();
    ((xlx(n) - s) / n as f64).max(0.0)
}

/// `H[Y|A]` straight from a row-major count slice with `cols` columns.
pub(crate) fn conditional_entropy_fast(counts: &[u64], cols: usize) -> f64 {
    let mut total = 0u64;
    let mut acc = 0.0;
    for row in counts.chunks_exact(cols) {
        let n_r: u64 = row.iter().sum();
        total += n_r;
        acc += xlx(n_r) - row.iter().map(|&c| xlx(c)).sum::<f64>();
    }
    if total == 0 {
        0.0
    } else {
        (acc / total as f64).max(0.0)
    }
}

/// `H[Y]` from the column margin.
pub fn column_margin_entropy<F: Real>(table: &ContingencyTable) -> F {
    entropy_of_counts(&table.col_sums())
}

/// `H[A]` from the row margin.
pub fn row_margin_entropy<F: Real>(table: &ContingencyTable) -> F {
    entropy_of_counts(&table.row_sums())
}

/// `H[A, Y]` over all cells.
pub fn joint_entropy<F: Real>(table: &ContingencyTable) -> F {
    entropy_of_counts(table.counts())
}

/// `H[Y|A] = Σ_r (n_r/N) H(row r)`.
pub fn conditional_entropy<F: Real>(table: &ContingencyTable) -> F {
    let n = table.total();
    if n == 0 {
        return F::zero();
    }
    let mut acc = F::zero();
    for r in 0..table.rows() {
        let row = table.row(r);
        let n_r: u64 = row.iter().sum();
        let inner: F = row.iter().map(|&c| xlogx::<F>(c)).sum();
        acc = acc + xlogx::<F>(n_r) - inner;
    }
    (acc / F::from_count(n)).max(F::zero())
}

/// `I[Y;A] = H[Y] - H[Y|A]`, tiny negatives clamped to zero.
pub fn mutual_information<F: Real>(table: &ContingencyTable) -> F {
    let mi = column_margin_entropy::<F>(table) - conditional_entropy::<F>(table);
    if mi < F::zero() && mi > -F::lit(CLAMP) {
        F::zero()
    } else {
        mi
    }
}

/// Entropy of the row-label mix inside each response column.
pub fn per_column_row_entropy<F: Real>(table: &ContingencyTable) -> Vec<(usize, F)> {
    let mut column = vec![0u64; table.rows()];
    (0..table.cols())
        .map(|c| {
            for (r, slot) in column.iter_mut().enumerate() {
                *slot = table.get(r, c);
            }
            (c, entropy_of_counts::<F>(&column))
        })
        .collect()
}

/// Summary of the entropy measurements on one table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct EntropyReport<F> {
    pub rows: usize,
    pub cols: usize,
    pub total: u64,
    pub h_y: F,
    pub h_y_given_a: F,
    pub mi: F,
    pub avg_cell_count: F,
}

impl<F: Real> EntropyReport<F> {
    pub fn from_table(table: &ContingencyTable) -> Self {
        let h_y = column_margin_entropy::<F>(table);
        let mut h_cond = conditional_entropy::<F>(table);
        if h_cond > h_y && h_cond - h_y < F::lit(CLAMP) {
            h_cond = h_y;
        }
        let mut mi = h_y - h_cond;
        if mi < F::zero() && mi > -F::lit(CLAMP) {
            mi = F::zero();
        }
        Self {
            rows: table.rows(),
            cols: table.cols(),
            total: table.total(),
            h_y,
            h_y_given_a: h_cond,
            mi,
            avg_cell_count: F::lit(table.avg_cell_count()),
        }
    }
}
