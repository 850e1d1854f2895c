//! Subset ledgers, interaction classification and major-factor selection.

mod classify;
mod grid;
mod ledger;
mod select;
mod subsets;

pub use classify::{classify_subset, coexistence_ratio, interaction_ratio, Classification};
pub use grid::{mi_grid, GridCell};
pub use ledger::{build_ledger, sce_star_drop, Ledger, LedgerConfig, SoloDrop, SubsetLedgerEntry};
pub use select::{
    select_major_factors, ConfirmedFactor, ExcludedSubset, FactorCollection, MajorFactorReport,
    PairRelation, RankCriterion,
};
pub use subsets::{enumerate_subsets, subset_label};
