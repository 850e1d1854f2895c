use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::series::CategoricalSeries;
use crate::error::{CedaError, Result};

/// Mixed-radix codes above this size are ranked by sorting instead of a
/// direct lookup table.
const DENSE_CODE_LIMIT: u64 = 1 << 20;

/// `R x C` count matrix. Rows are the occupied categories (tuples) of a
/// covariate subset, columns are every response category, occupied or not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    rows: usize,
    cols: usize,
    row_keys: Vec<Vec<u32>>,
    total: u64,
    row_names: Vec<Vec<String>>,
    col_names: Vec<String>,
}

/// Occupied tuples of a list of equal-length series.
pub(crate) struct TupleIndex {
    /// Row index (rank of the tuple) for every record.
    pub row_of: Vec<u32>,
    /// Occupied tuples in ascending lexicographic order.
    pub keys: Vec<Vec<u32>>,
}

pub(crate) fn check_lengths(series: &[&CategoricalSeries]) -> Result<usize> {
    let first = series.first().ok_or(CedaError::EmptyInput)?;
    let n = first.len();
    if n == 0 {
        return Err(CedaError::EmptyInput);
    }
    for s in series {
        if s.len() != n {
            return Err(CedaError::LengthMismatch {
                expected: n,
                actual: s.len(),
            });
        }
    }
    Ok(n)
}

pub(crate) fn index_tuples(series: &[&CategoricalSeries]) -> Result<TupleIndex> {
    let n = check_lengths(series)?;
    let space = series
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(u64::from(s.cardinality())));

    let Some(space) = space else {
        return Ok(index_tuples_sorted(series, n));
    };

    // First feature is the most significant digit, so ascending codes are
    // ascending lexicographic tuples.
    let mut codes = vec![0u64; n];
    for s in series {
        let radix = u64::from(s.cardinality());
        for (code, &l) in codes.iter_mut().zip(s.labels()) {
            *code = *code * radix + u64::from(l);
        }
    }

    let decode = |mut code: u64| -> Vec<u32> {
        let mut key = vec![0u32; series.len()];
        for (slot, s) in key.iter_mut().zip(series.iter()).rev() {
            let radix = u64::from(s.cardinality());
            *slot = (code % radix) as u32;
            code /= radix;
        }
        key
    };

    if space <= DENSE_CODE_LIMIT {
        let mut rank = vec![u32::MAX; space as usize];
        for &c in &codes {
            rank[c as usize] = 0;
        }
        let mut keys = Vec::new();
        for (code, slot) in rank.iter_mut().enumerate() {
            if *slot == 0 {
                *slot = keys.len() as u32;
                keys.push(decode(code as u64));
            }
        }
        let row_of = codes.iter().map(|&c| rank[c as usize]).collect();
        Ok(TupleIndex { row_of, keys })
    } else {
        let mut uniq = codes.clone();
        uniq.sort_unstable();
        uniq.dedup();
        let row_of = codes
            .iter()
            .map(|c| uniq.binary_search(c).map(|i| i as u32).unwrap_or(0))
            .collect();
        let keys = uniq.iter().map(|&c| decode(c)).collect();
        Ok(TupleIndex { row_of, keys })
    }
}

fn index_tuples_sorted(series: &[&CategoricalSeries], n: usize) -> TupleIndex {
    let tuples: Vec<Vec<u32>> = (0..n)
        .map(|i| series.iter().map(|s| s.labels()[i]).collect())
        .collect();
    let mut keys = tuples.clone();
    keys.sort_unstable();
    keys.dedup();
    let row_of = tuples
        .iter()
        .map(|t| keys.binary_search(t).map(|i| i as u32).unwrap_or(0))
        .collect();
    TupleIndex { row_of, keys }
}

/// Cross-tabulates a covariate tuple (rows) against a response (columns).
///
/// Only occupied covariate tuples become rows, in ascending lexicographic
/// order. Every response category gets a column, so tables over different
/// subsets share the same column axis.
pub fn crosstab(
    covariates: &[&CategoricalSeries],
    response: &CategoricalSeries,
) -> Result<ContingencyTable> {
    let n = check_lengths(covariates)?;
    if response.len() != n {
        return Err(CedaError::LengthMismatch {
            expected: n,
            actual: response.len(),
        });
    }
    let index = index_tuples(covariates)?;
    let rows = index.keys.len();
    let cols = response.cardinality() as usize;
    let mut counts = vec![0u64; rows * cols];
    for (&r, &c) in index.row_of.iter().zip(response.labels()) {
        counts[r as usize * cols + c as usize] += 1;
    }
    let row_names = index
        .keys
        .iter()
        .map(|k| {
            k.iter()
                .zip(covariates)
                .map(|(&c, s)| s.category_name(c))
                .collect()
        })
        .collect();
    let col_names = (0..response.cardinality())
        .map(|c| response.category_name(c))
        .collect();
    Ok(ContingencyTable {
        counts,
        rows,
        cols,
        row_keys: index.keys,
        total: n as u64,
        row_names,
        col_names,
    })
}

impl ContingencyTable {
    /// Builds a table from a row-major count matrix. All-zero rows are dropped;
    /// the surviving rows keep their original index as key.
    pub fn from_counts(counts: Vec<u64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CedaError::EmptyInput);
        }
        if counts.len() != rows * cols {
            return Err(CedaError::LengthMismatch {
                expected: rows * cols,
                actual: counts.len(),
            });
        }
        let mut kept = Vec::with_capacity(counts.len());
        let mut row_keys = Vec::new();
        for r in 0..rows {
            let row = &counts[r * cols..(r + 1) * cols];
            if row.iter().any(|&c| c > 0) {
                kept.extend_from_slice(row);
                row_keys.push(vec![r as u32]);
            }
        }
        let total: u64 = kept.iter().sum();
        if total == 0 {
            return Err(CedaError::EmptyInput);
        }
        let row_names = row_keys.iter().map(|k| vec![k[0].to_string()]).collect();
        let col_names = (0..cols).map(|c| c.to_string()).collect();
        Ok(Self {
            rows: row_keys.len(),
            counts: kept,
            cols,
            row_keys,
            total,
            row_names,
            col_names,
        })
    }

    /// Convenience for small literal tables.
    pub fn from_rows(rows: &[&[u64]]) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).ok_or(CedaError::EmptyInput)?;
        let mut counts = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(CedaError::LengthMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            counts.extend_from_slice(r);
        }
        Self::from_counts(counts, rows.len(), cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.total
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.counts[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.counts[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_keys(&self) -> &[Vec<u32>] {
        &self.row_keys
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows).map(|r| self.row(r).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for r in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(r)) {
                *s += v;
            }
        }
        sums
    }

    /// Average cell count `total / (rows * cols)`.
    pub fn avg_cell_count(&self) -> f64 {
        self.total as f64 / (self.rows * self.cols) as f64
    }

    /// Swaps the roles of rows and columns. Empty response columns vanish
    /// (they would be all-zero rows).
    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = Vec::with_capacity(self.counts.len());
        let mut row_keys = Vec::new();
        let mut row_names = Vec::new();
        for c in 0..self.cols {
            let column: Vec<u64> = (0..self.rows).map(|r| self.get(r, c)).collect();
            if column.iter().any(|&v| v > 0) {
                counts.extend(column);
                row_keys.push(vec![c as u32]);
                row_names.push(vec![self.col_names[c].clone()]);
            }
        }
        ContingencyTable {
            rows: row_keys.len(),
            cols: self.rows,
            counts,
            row_keys,
            total: self.total,
            row_names,
            col_names: self.row_names.iter().map(|n| n.join("_")).collect(),
        }
    }

    /// Replaces the counts with another matrix of the same shape, keeping
    /// keys and names. Rows emptied by the replacement are dropped.
    pub(crate) fn with_counts(&self, counts: Vec<u64>) -> ContingencyTable {
        debug_assert_eq!(counts.len(), self.counts.len());
        let mut kept = Vec::with_capacity(counts.len());
        let mut row_keys = Vec::new();
        let mut row_names = Vec::new();
        for r in 0..self.rows {
            let row = &counts[r * self.cols..(r + 1) * self.cols];
            if row.iter().any(|&c| c > 0) {
                kept.extend_from_slice(row);
                row_keys.push(self.row_keys[r].clone());
                row_names.push(self.row_names[r].clone());
            }
        }
        ContingencyTable {
            rows: row_keys.len(),
            total: kept.iter().sum(),
            counts: kept,
            cols: self.cols,
            row_keys,
            row_names,
            col_names: self.col_names.clone(),
        }
    }

    /// Tab-separated rendering: one column per covariate feature holding the
    /// row key, then one count column per response category.
    pub fn to_tsv(&self, feature_names: &[&str]) -> String {
        let width = self.row_keys.first().map_or(1, |k| k.len());
        let mut out = String::new();
        for i in 0..width {
            if i > 0 {
                out.push('\t');
            }
            match feature_names.get(i) {
                Some(n) => out.push_str(n),
                None => {
                    let _ = write!(out, "A{}", i + 1);
                }
            }
        }
        for name in &self.col_names {
            out.push('\t');
            out.push_str(name);
        }
        out.push('\n');
        for r in 0..self.rows {
            out.push_str(&self.row_names[r].join("\t"));
            for v in self.row(r) {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }
}
