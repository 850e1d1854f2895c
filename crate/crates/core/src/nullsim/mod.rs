//! Mimicry null distributions and the confirmation test.
//!
//! A mimic of a table keeps the observed response margin and refills each
//! response column from the covariate row proportions, so the covariate is
//! independent of the response by construction while every margin keeps its
//! observed shape.

mod band;
mod localize;
mod mimic;
mod noise;

pub use band::{c1_test, null_band, C1Status, C1Verdict, NullBand, Statistic};
pub use localize::{localize_differences, ColumnVerdict};
pub use mimic::mimic_table;
pub use noise::{noise_padded_reference, NoisePool, ReferenceLevel, ReferenceSource};

pub(crate) use noise::conditional_entropy_of;
