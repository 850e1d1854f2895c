//! Contingency tables and the Shannon entropies measured on them.
//!
//! All logarithms are natural (nats) and `0 ln 0` is taken as `0`.

mod entropy;
mod series;
mod table;

pub use entropy::{
    column_margin_entropy, conditional_entropy, entropy_of_counts, joint_entropy,
    mutual_information, per_column_row_entropy, row_margin_entropy, EntropyReport,
};
pub use series::CategoricalSeries;
pub use table::{crosstab, ContingencyTable};

pub(crate) use entropy::{conditional_entropy_fast, entropy_of_counts_fast};
pub(crate) use table::{check_lengths, index_tuples};
