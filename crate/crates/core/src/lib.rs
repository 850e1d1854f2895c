//! Categorical exploratory data analysis (CEDA).
//!
//! Every measurement in this crate is taken on a contingency table: covariate
//! categories run along the rows, response categories along the columns.
//! Quantitative features are first turned into categories (`1+K+1` quantile
//! binning or K-means), then conditional entropy and mutual information are
//! evaluated on the table and judged against mimicry null bands, tables that
//! keep the observed margins but are independent of the response.
//!
//! Modules:
//!
//! - [`tabulate`]: categorical series, contingency tables and Shannon entropies.
//! - [`categorize`]: quantile binning, K-means fusion and product categories.
//! - [`nullsim`]: mimic tables, null bands, the confirmation test and noise references.
//! - [`protocol`]: subset ledgers, interaction classification and major-factor reports.
//! - [`genlab`]: seeded generators for the worked simulation studies and analytic oracles.
//!
//! The numeric core is generic over the floating-point type through [`Real`];
//! the `*64` aliases below fix it to `f64`, which is what the CLI uses.

pub mod categorize;
pub mod dataset;
pub mod error;
pub mod genlab;
pub mod nullsim;
pub mod protocol;
pub mod rng;
pub mod scalar;
pub mod tabulate;

pub use error::{CedaError, Result};
pub use scalar::Real;

pub use categorize::{
    apply_bins, fuse_features, kmeans_fit, product_categories, quantile_bins, BinningScheme,
    Categorizer, KMeansConfig, KMeansModel, PointMatrix,
};
pub use dataset::{Column, Dataset};
pub use nullsim::{
    c1_test, localize_differences, mimic_table, noise_padded_reference, null_band, C1Status,
    C1Verdict, ColumnVerdict, NoisePool, NullBand, ReferenceLevel, Statistic,
};
pub use protocol::{
    build_ledger, classify_subset, enumerate_subsets, mi_grid, sce_star_drop, select_major_factors,
    Classification, GridCell, Ledger, LedgerConfig, MajorFactorReport, SubsetLedgerEntry,
};
pub use rng::SeedStream;
pub use tabulate::{
    column_margin_entropy, conditional_entropy, crosstab, mutual_information,
    per_column_row_entropy, CategoricalSeries, ContingencyTable, EntropyReport,
};

pub type EntropyReport64 = EntropyReport<f64>;
pub type EntropyReport32 = EntropyReport<f32>;
pub type BinningScheme64 = BinningScheme<f64>;
pub type BinningScheme32 = BinningScheme<f32>;
pub type KMeansModel64 = KMeansModel<f64>;
pub type KMeansModel32 = KMeansModel<f32>;
pub type PointMatrix64 = PointMatrix<f64>;
pub type NullBand64 = NullBand<f64>;
pub type NullBand32 = NullBand<f32>;
pub type C1Verdict64 = C1Verdict<f64>;
pub type ReferenceLevel64 = ReferenceLevel<f64>;
pub type Dataset64 = Dataset<f64>;
pub type Ledger64 = Ledger<f64>;
pub type SubsetLedgerEntry64 = SubsetLedgerEntry<f64>;
pub type LedgerConfig64 = LedgerConfig<f64>;
pub type MajorFactorReport64 = MajorFactorReport<f64>;
pub type GridCell64 = GridCell<f64>;
