use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::subsets::{canonical, enumerate_subsets, natural_cmp, subset_label};
use crate::error::{CedaError, Result};
use crate::nullsim::{
    c1_test, conditional_entropy_of, noise_padded_reference, null_band, C1Status, C1Verdict,
    NoisePool, NullBand, ReferenceLevel, ReferenceSource, Statistic,
};
use crate::rng::SeedStream;
use crate::scalar::Real;
use crate::tabulate::{check_lengths, crosstab, entropy_of_counts_fast, CategoricalSeries};

/// Thresholds and budgets for the subset ledger and its classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real", default)]
pub struct LedgerConfig<F> {
    pub max_order: usize,
    /// Mimic replicates per confirmation band.
    pub replicates: usize,
    pub seed: u64,
    /// Minimum `N / (rows * cols)` for a subset to support claims.
    pub reliability_floor: F,
    /// Subsets whose nominal table `Π cardinalities * cols` exceeds this are skipped.
    pub cell_budget: u64,
    /// Required ratio of the dimension-matched gain to the added feature's solo effect.
    pub r_int: F,
    /// Joint drop over summed solo drops below this means two factors cannot co-exist.
    pub coexist_floor: F,
    /// Smallest drop (nats) treated as an effect.
    pub min_effect: F,
    /// Columns known to be unrelated to the response.
    pub noise_features: Vec<String>,
    /// Clusters used when fusing a collection by K-means; defaults to the
    /// covariate cardinality.
    pub fuse_k: Option<usize>,
}

impl<F: Real> Default for LedgerConfig<F> {
    fn default() -> Self {
        Self {
            max_order: 2,
            replicates: 1000,
            seed: 0,
            reliability_floor: F::one(),
            cell_budget: 10_000_000,
            r_int: F::lit(3.0),
            coexist_floor: F::one(),
            min_effect: F::lit(0.01),
            noise_features: Vec::new(),
            fuse_k: None,
        }
    }
}

/// Effect of one member measured on a table of the subset's dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct SoloDrop<F> {
    pub feature: String,
    pub drop: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct SubsetLedgerEntry<F> {
    pub subset: Vec<String>,
    pub order: usize,
    pub ce: F,
    /// Reference `H^(k)[Y]` the drop is taken from.
    pub reference: F,
    pub ce_drop: F,
    pub sce_drop: F,
    pub sce_star_drop: Option<F>,
    /// Best `(k-1)`-subset and the member added to it.
    pub base: Option<Vec<String>>,
    pub added: Option<String>,
    /// Centered spread of the padded reference, the null band of `sce_star_drop`.
    pub gain_band: Option<NullBand<F>>,
    pub solo: Vec<SoloDrop<F>>,
    pub rows: usize,
    pub cols: usize,
    pub avg_cell: F,
    pub reliable: bool,
    pub contains_noise: bool,
    pub synthetic_noise: bool,
    pub c1: Option<C1Verdict<F>>,
}

impl<F: Real> SubsetLedgerEntry<F> {
    pub fn label(&self) -> String {
        subset_label(&self.subset)
    }

    pub fn c1_status(&self) -> &'static str {
        match &self.c1 {
            Some(v) => v.status.as_str(),
            None if !self.reliable => "unreliable",
            None => "untested",
        }
    }

    pub fn confirmed(&self) -> bool {
        matches!(&self.c1, Some(v) if v.status == C1Status::Confirmed)
    }

    /// Whether the dimension-matched gain clears its null band.
    pub fn gain_confirmed(&self) -> bool {
        match (&self.sce_star_drop, &self.gain_band) {
            (Some(g), Some(b)) => *g > b.q975,
            _ => false,
        }
    }

    pub fn solo_of(&self, feature: &str) -> Option<F> {
        self.solo
            .iter()
            .find(|s| s.feature == feature)
            .map(|s| s.drop)
    }
}

/// Every evaluated subset plus the references its drops are measured from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct Ledger<F> {
    pub entries: Vec<SubsetLedgerEntry<F>>,
    /// `H^(k)[Y]` for `k = 0..=max_order` with no exclusions.
    pub references: Vec<ReferenceLevel<F>>,
    pub skipped: Vec<Vec<String>>,
    pub config: LedgerConfig<F>,
    pub total: usize,
    #[serde(skip)]
    pub(crate) index: HashMap<Vec<String>, usize>,
    #[serde(skip)]
    pub(crate) response: Option<CategoricalSeries>,
    #[serde(skip)]
    pub(crate) covariates: BTreeMap<String, CategoricalSeries>,
    #[serde(skip)]
    pub(crate) pool: Option<NoisePool>,
}

impl<F: Real> Ledger<F> {
    pub fn get(&self, subset: &[String]) -> Option<&SubsetLedgerEntry<F>> {
        self.index
            .get(&canonical(subset))
            .map(|&i| &self.entries[i])
    }

    pub fn get_names(&self, subset: &[&str]) -> Option<&SubsetLedgerEntry<F>> {
        let owned: Vec<String> = subset.iter().map(|s| (*s).to_owned()).collect();
        self.get(&owned)
    }

    pub fn order(&self, k: usize) -> impl Iterator<Item = &SubsetLedgerEntry<F>> {
        self.entries.iter().filter(move |e| e.order == k)
    }

    pub fn response(&self) -> Option<&CategoricalSeries> {
        self.response.as_ref()
    }

    /// Noise pool the ledger was built with, including designated features.
    pub fn pool(&self) -> Option<&NoisePool> {
        self.pool.as_ref()
    }

    pub fn is_noise(&self, feature: &str) -> bool {
        self.config.noise_features.iter().any(|n| n == feature)
    }

    pub(crate) fn default_fuse_k(&self) -> usize {
        self.config
            .fuse_k
            .or_else(|| {
                self.covariates
                    .values()
                    .map(|s| s.cardinality() as usize)
                    .max()
            })
            .unwrap_or(2)
    }

    /// Tab-separated ledger, one row per subset.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "order\tsubset\tce\tce_drop\tsce_drop\tsce_star_drop\trows\tavg_cell\tc1_status\n",
        );
        for e in &self.entries {
            let star = e
                .sce_star_drop
                .map_or_else(|| "NA".to_owned(), |v| format!("{:.4}", v.as_f64()));
            let _ = writeln!(
                out,
                "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}\t{:.3}\t{}",
                e.order,
                e.label(),
                e.ce.as_f64(),
                e.ce_drop.as_f64(),
                e.sce_drop.as_f64(),
                star,
                e.rows,
                e.avg_cell.as_f64(),
                e.c1_status()
            );
        }
        out
    }
}

struct FirstPass {
    subset: Vec<String>,
    ce: f64,
    rows: usize,
    cols: usize,
    avg: f64,
}

/// Evaluates every covariate subset up to `config.max_order`.
///
/// For a subset `A` of size `k`:
/// - `ce = H[Y|A]` and `ce_drop = H^(k)[Y] - ce`, where `H^(k)` pads with `k`
///   noise features from `pool` that are not in `A`;
/// - `sce_drop` is the drop from the best `(k-1)`-subset (`ce_drop` for singletons);
/// - `sce_star_drop` replaces the added member by one noise pad, so both
///   sides are measured on tables of the same dimension.
///
/// Confirmation bands and dimension-matched quantities are only computed for
/// subsets whose average cell count clears `reliability_floor`.
pub fn build_ledger<F: Real>(
    covariates: &[(String, CategoricalSeries)],
    response: &CategoricalSeries,
    pool: &NoisePool,
    config: &LedgerConfig<F>,
) -> Result<Ledger<F>> {
    if covariates.is_empty() {
        return Err(CedaError::EmptyInput);
    }
    let mut all: Vec<&CategoricalSeries> = covariates.iter().map(|(_, s)| s).collect();
    all.push(response);
    let n = check_lengths(&all)?;
    let lookup: HashMap<&str, &CategoricalSeries> =
        covariates.iter().map(|(n, s)| (n.as_str(), s)).collect();
    if lookup.len() != covariates.len() {
        return Err(CedaError::invalid("duplicate covariate names"));
    }
    let pool_owned;
    let pool = if config.noise_features.is_empty() {
        pool
    } else {
        let designated = config
            .noise_features
            .iter()
            .map(|f| {
                lookup
                    .get(f.as_str())
                    .map(|s| (f.clone(), (*s).clone()))
                    .ok_or_else(|| CedaError::UnknownFeature(f.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        pool_owned = pool.clone().with_designated(designated)?;
        &pool_owned
    };
    let names: Vec<String> = covariates.iter().map(|(n, _)| n.clone()).collect();
    let subsets = enumerate_subsets(&names, config.max_order)?;
    let cols = response.cardinality() as u64;

    let series_of = |s: &[String]| -> Vec<&CategoricalSeries> {
        s.iter().map(|n| lookup[n.as_str()]).collect()
    };

    let (kept, skipped): (Vec<Vec<String>>, Vec<Vec<String>>) =
        subsets.into_iter().map(|s| canonical(&s)).partition(|s| {
            s.iter()
                .try_fold(cols, |acc, n| {
                    acc.checked_mul(u64::from(lookup[n.as_str()].cardinality()))
                })
                .is_some_and(|cells| cells <= config.cell_budget)
        });

    let first: Vec<FirstPass> = kept
        .into_par_iter()
        .map(|subset| {
            let t = crosstab(&series_of(&subset), response)?;
            Ok(FirstPass {
                ce: crate::tabulate::conditional_entropy_fast(t.counts(), t.cols()),
                rows: t.rows(),
                cols: t.cols(),
                avg: t.avg_cell_count(),
                subset,
            })
        })
        .collect::<Result<_>>()?;
    let ce_of: HashMap<&[String], f64> =
        first.iter().map(|f| (f.subset.as_slice(), f.ce)).collect();

    let mut references = Vec::with_capacity(config.max_order + 1);
    for k in 0..=config.max_order {
        references.push(noise_padded_reference::<F>(
            pool,
            &[],
            &[],
            k,
            response,
            false,
        )?);
    }

    // Reference per (dimension, designated pads) pair, shared across subsets.
    let mut ref_cache: HashMap<(usize, Option<Vec<String>>), f64> = HashMap::new();
    let ref_key = |s: &[String]| -> (usize, Option<Vec<String>>) {
        let ex: Vec<&str> = s.iter().map(String::as_str).collect();
        let chosen = pool
            .designated_outside(&ex, s.len())
            .map(|d| d.iter().map(|(n, _)| (*n).to_owned()).collect());
        (s.len(), chosen)
    };
    for f in &first {
        let key = ref_key(&f.subset);
        if !ref_cache.contains_key(&key) {
            let ex: Vec<&str> = f.subset.iter().map(String::as_str).collect();
            let value = if key.1.is_none() {
                references[key.0].value.as_f64()
            } else {
                noise_padded_reference::<F>(pool, &[], &ex, key.0, response, false)?
                    .value
                    .as_f64()
            };
            ref_cache.insert(key, value);
        }
    }

    let h_y = entropy_of_counts_fast(&response.counts());
    let c1_stream = SeedStream::new(config.seed).child_str("c1");
    let floor = config.reliability_floor.as_f64();

    let entries: Vec<SubsetLedgerEntry<F>> = first
        .par_iter()
        .map(|f| -> Result<SubsetLedgerEntry<F>> {
            let k = f.subset.len();
            let reference = ref_cache[&ref_key(&f.subset)];
            let ce_drop = reference - f.ce;
            let exclude: Vec<&str> = f.subset.iter().map(String::as_str).collect();

            let base: Option<(Vec<String>, f64)> = (k >= 2)
                .then(|| {
                    (0..k)
                        .filter_map(|drop| {
                            let sub: Vec<String> = f
                                .subset
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != drop)
                                .map(|(_, n)| n.clone())
                                .collect();
                            ce_of.get(sub.as_slice()).map(|&ce| (sub, ce))
                        })
                        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| cmp_subsets(&a.0, &b.0)))
                })
                .flatten();
            let sce_drop = match &base {
                Some((_, b)) => b - f.ce,
                None => ce_drop,
            };

            let reliable = f.avg >= floor;
            let contains_noise = f.subset.iter().any(|n| config.noise_features.contains(n));
            let mut entry = SubsetLedgerEntry {
                subset: f.subset.clone(),
                order: k,
                ce: F::lit(f.ce),
                reference: F::lit(reference),
                ce_drop: F::lit(ce_drop),
                sce_drop: F::lit(sce_drop),
                sce_star_drop: None,
                base: None,
                added: None,
                gain_band: None,
                solo: Vec::new(),
                rows: f.rows,
                cols: f.cols,
                avg_cell: F::lit(f.avg),
                reliable,
                contains_noise,
                synthetic_noise: pool.designated_outside(&exclude, k).is_none(),
                c1: None,
            };
            if !reliable {
                return Ok(entry);
            }

            let cov = series_of(&f.subset);
            let table = crosstab(&cov, response)?;
            let stream = c1_stream.child_str(&f.subset.join("\u{1f}"));
            let band = null_band::<F>(
                &table,
                Statistic::MutualInformation,
                config.replicates,
                stream,
            )?;
            let mi = (h_y - f.ce).max(0.0);
            entry.c1 = Some(c1_test(F::lit(mi), &band));

            if k == 1 {
                entry.sce_star_drop = Some(F::lit(ce_drop));
                entry.solo.push(SoloDrop {
                    feature: f.subset[0].clone(),
                    drop: F::lit(ce_drop),
                });
                return Ok(entry);
            }

            if let Some((base_set, _)) = &base {
                let added = f
                    .subset
                    .iter()
                    .find(|n| !base_set.contains(n))
                    .cloned()
                    .unwrap_or_default();
                let padded = noise_padded_reference::<F>(
                    pool,
                    &series_of(base_set),
                    &exclude,
                    1,
                    response,
                    true,
                )?;
                let gain = padded.value.as_f64() - f.ce;
                if let Some(mean) = padded.synthetic_mean {
                    let centered: Vec<F> = padded.samples.iter().map(|&s| mean - s).collect();
                    entry.gain_band = Some(NullBand::from_samples(Statistic::Custom, centered)?);
                }
                if matches!(padded.source, ReferenceSource::Synthetic { .. }) {
                    entry.synthetic_noise = true;
                }
                entry.sce_star_drop = Some(F::lit(gain));
                entry.base = Some(base_set.clone());
                entry.added = Some(added);
            }

            for member in &f.subset {
                let level = noise_padded_reference::<F>(
                    pool,
                    &[lookup[member.as_str()]],
                    &exclude,
                    k - 1,
                    response,
                    false,
                )?;
                entry.solo.push(SoloDrop {
                    feature: member.clone(),
                    drop: F::lit(reference - level.value.as_f64()),
                });
            }
            Ok(entry)
        })
        .collect::<Result<_>>()?;

    let mut entries = entries;
    entries.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then_with(|| a.ce.partial_cmp(&b.ce).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| cmp_subsets(&a.subset, &b.subset))
    });
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.subset.clone(), i))
        .collect();

    Ok(Ledger {
        entries,
        references,
        skipped,
        config: config.clone(),
        total: n,
        index,
        response: Some(response.clone()),
        covariates: covariates
            .iter()
            .map(|(n, s)| (n.clone(), s.clone()))
            .collect(),
        pool: Some(pool.clone()),
    })
}

pub(crate) fn cmp_subsets(a: &[String], b: &[String]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = natural_cmp(x, y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Gain of adding `added` to the rest of `subset`, measured against a
/// noise pad in its place: `H[Y | A' ∪ ε] - H[Y | A]`.
pub fn sce_star_drop<F: Real>(
    ledger: &Ledger<F>,
    subset: &[String],
    added: &str,
    pool: &NoisePool,
) -> Result<F> {
    let response = ledger.response.as_ref().ok_or(CedaError::EmptyInput)?;
    let series = |n: &String| {
        ledger
            .covariates
            .get(n)
            .ok_or_else(|| CedaError::UnknownFeature(n.clone()))
    };
    if !subset.iter().any(|n| n == added) {
        return Err(CedaError::UnknownFeature(added.to_owned()));
    }
    let all = subset.iter().map(series).collect::<Result<Vec<_>>>()?;
    let base = subset
        .iter()
        .filter(|n| n.as_str() != added)
        .map(series)
        .collect::<Result<Vec<_>>>()?;
    let exclude: Vec<&str> = subset.iter().map(String::as_str).collect();
    let padded = noise_padded_reference::<F>(pool, &base, &exclude, 1, response, false)?;
    Ok(padded.value - F::lit(conditional_entropy_of(&all, response)?))
}
