use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mimic::{mimic_counts, suffix_sums};
use crate::error::{CedaError, Result};
use crate::rng::{SeedStream, StreamRng};
use crate::scalar::{mean_sd, quantile_sorted, Real};
use crate::tabulate::{conditional_entropy_fast, entropy_of_counts_fast, ContingencyTable};

/// Samples are kept on the band up to this many replicates.
const KEEP_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    MutualInformation,
    ConditionalEntropy,
    /// Anything computed by the caller (reference gains, per-bin entropies).
    Custom,
}

/// Summary of a simulated null distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct NullBand<F> {
    pub stat: Statistic,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub mean: F,
    pub sd: F,
    pub q025: F,
    pub q975: F,
    #[serde(skip)]
    pub samples: Option<Vec<F>>,
}

impl<F: Real> NullBand<F> {
    /// Summarizes replicate values with type-7 percentiles.
    pub fn from_samples(stat: Statistic, samples: Vec<F>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(CedaError::invalid(
                "a null band needs at least 2 replicates",
            ));
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(CedaError::NonFinite { index });
        }
        let (mean, sd) = mean_sd(&samples);
        let mut sorted = samples.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let replicates = samples.len();
        Ok(Self {
            stat,
            replicates,
            mean,
            sd,
            q025: quantile_sorted(&sorted, 0.025),
            q975: quantile_sorted(&sorted, 0.975),
            samples: (replicates <= KEEP_SAMPLES).then_some(samples),
        })
    }

    /// Evaluates `f` on `replicates` independent streams in parallel.
    pub fn simulate<G>(stat: Statistic, replicates: usize, stream: SeedStream, f: G) -> Result<Self>
    where
        G: Fn(&mut StreamRng) -> F + Sync,
    {
        if replicates < 2 {
            return Err(CedaError::invalid(
                "a null band needs at least 2 replicates",
            ));
        }
        let samples: Vec<F> = (0..replicates as u64)
            .into_par_iter()
            .map(|b| f(&mut stream.rng(b)))
            .collect();
        Self::from_samples(stat, samples)
    }
}

/// Null band of a statistic over `replicates` mimic tables. Replicate `b`
/// draws from `stream.rng(b)`, so the result does not depend on threading.
pub fn null_band<F: Real>(
    table: &ContingencyTable,
    stat: Statistic,
    replicates: usize,
    stream: SeedStream,
) -> Result<NullBand<F>> {
    if table.total() == 0 {
        return Err(CedaError::EmptyInput);
    }
    let row_sums = table.row_sums();
    let tail = suffix_sums(&row_sums);
    let col_sums = table.col_sums();
    let h_y = entropy_of_counts_fast(&col_sums);
    let cols = table.cols();
    NullBand::simulate(stat, replicates, stream, |rng| {
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
        let ce = conditional_entropy_fast(&out, cols);
        let v = match stat {
            Statistic::ConditionalEntropy => ce,
            _ => {
                let mi = h_y - ce;
                if mi < 0.0 && mi > -1e-12 {
                    0.0
                } else {
                    mi
                }
            }
        };
        F::lit(v)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Status {
    Confirmed,
    WithinBand,
    BelowBand,
}

impl C1Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            C1Status::Confirmed => "confirmed",
            C1Status::WithinBand => "within_band",
            C1Status::BelowBand => "below_band",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct C1Verdict<F> {
    pub observed: F,
    pub band: NullBand<F>,
    pub status: C1Status,
    pub excess_sd: F,
}

/// Confirmed iff `observed > q975`, below the band iff `observed < q025`.
pub fn c1_test<F: Real>(observed: F, band: &NullBand<F>) -> C1Verdict<F> {
    let status = if observed > band.q975 {
        C1Status::Confirmed
    } else if observed < band.q025 {
        C1Status::BelowBand
    } else {
        C1Status::WithinBand
    };
    C1Verdict {
        observed,
        band: band.clone(),
        status,
        excess_sd: excess_sd(observed, band.mean, band.sd),
    }
}

fn excess_sd<F: Real>(observed: F, mean: F, sd: F) -> F {
    if sd > F::zero() {
        (observed - mean) / sd
    } else if observed > mean {
        F::infinity()
    } else if observed < mean {
        F::neg_infinity()
    } else {
        F::zero()
    }
}
