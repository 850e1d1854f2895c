use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};
use crate::rng::SeedStream;
use crate::scalar::{mean_sd, Real};
use crate::tabulate::{
    column_margin_entropy, conditional_entropy_fast, crosstab, CategoricalSeries, ContingencyTable,
};

/// Source of noise features used to build dimension-matched references.
///
/// Designated features are real columns known to be unrelated to the
/// response; synthetic ones are i.i.d. categorical draws with the masses of
/// the covariate categorizer. Synthetic feature `j` of replicate `b` depends
/// only on `(stream, j, b)`, so pads are nested across dimensions.
#[derive(Debug, Clone)]
pub struct NoisePool {
    designated: Vec<(String, CategoricalSeries)>,
    masses: Vec<f64>,
    len: usize,
    replicates: usize,
    stream: SeedStream,
}

impl NoisePool {
    pub fn synthetic(
        len: usize,
        masses: Vec<f64>,
        replicates: usize,
        stream: SeedStream,
    ) -> Result<Self> {
        if len == 0 {
            return Err(CedaError::EmptyInput);
        }
        if masses.is_empty()
            || masses.iter().any(|m| !(m.is_finite() && *m >= 0.0))
            || masses.iter().sum::<f64>() <= 0.0
        {
            return Err(CedaError::invalid(
                "noise masses must be non-negative with positive sum",
            ));
        }
        if replicates < 2 {
            return Err(CedaError::invalid("noise replicates must be at least 2"));
        }
        Ok(Self {
            designated: Vec::new(),
            masses,
            len,
            replicates,
            stream,
        })
    }

    pub fn with_designated(mut self, designated: Vec<(String, CategoricalSeries)>) -> Result<Self> {
        for (_, s) in &designated {
            if s.len() != self.len {
                return Err(CedaError::LengthMismatch {
                    expected: self.len,
                    actual: s.len(),
                });
            }
        }
        self.designated = designated;
        Ok(self)
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn designated_names(&self) -> Vec<&str> {
        self.designated.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn is_designated(&self, name: &str) -> bool {
        self.designated.iter().any(|(n, _)| n == name)
    }

    /// The first `k` designated features whose names are not in `exclude`.
    pub fn designated_outside(
        &self,
        exclude: &[&str],
        k: usize,
    ) -> Option<Vec<(&str, &CategoricalSeries)>> {
        let picked: Vec<_> = self
            .designated
            .iter()
            .filter(|(n, _)| !exclude.contains(&n.as_str()))
            .take(k)
            .map(|(n, s)| (n.as_str(), s))
            .collect();
        (picked.len() == k).then_some(picked)
    }

    /// Synthetic pad `slot` of replicate `b`.
    pub fn synthetic_feature(&self, slot: usize, b: usize) -> CategoricalSeries {
        let mut rng = self.stream.child(slot as u64).rng(b as u64);
        let dist = WeightedIndex::new(&self.masses).expect("masses validated");
        let labels = (0..self.len)
            .map(|_| dist.sample(&mut rng) as u32)
            .collect();
        CategoricalSeries::new(labels, self.masses.len() as u32).expect("labels below cardinality")
    }

    /// `H[Y | base ∪ synthetic pads 0..k]` for every replicate.
    pub fn synthetic_levels(
        &self,
        base: &[&CategoricalSeries],
        k: usize,
        response: &CategoricalSeries,
    ) -> Result<Vec<f64>> {
        (0..self.replicates)
            .into_par_iter()
            .map(|b| {
                let pads: Vec<CategoricalSeries> =
                    (0..k).map(|j| self.synthetic_feature(j, b)).collect();
                let mut cov: Vec<&CategoricalSeries> = base.to_vec();
                cov.extend(pads.iter());
                conditional_entropy_of(&cov, response)
            })
            .collect()
    }
}

pub(crate) fn conditional_entropy_of(
    cov: &[&CategoricalSeries],
    response: &CategoricalSeries,
) -> Result<f64> {
    if cov.is_empty() {
        return Ok(column_margin_entropy::<f64>(&crosstab_margin(response)?));
    }
    let t = crosstab(cov, response)?;
    Ok(conditional_entropy_fast(t.counts(), t.cols()))
}

fn crosstab_margin(response: &CategoricalSeries) -> Result<ContingencyTable> {
    let counts = response.counts();
    let cols = counts.len();
    ContingencyTable::from_counts(counts, 1, cols)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSource {
    /// No pads needed.
    Exact,
    Designated {
        features: Vec<String>,
    },
    Synthetic {
        replicates: usize,
    },
}

/// Reference entropy `H[Y | base ∪ k noise pads]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct ReferenceLevel<F> {
    pub k: usize,
    pub value: F,
    pub source: ReferenceSource,
    /// Mean and sample sd over synthetic replicates, when simulated.
    pub synthetic_mean: Option<F>,
    pub synthetic_sd: Option<F>,
    #[serde(skip)]
    pub samples: Vec<F>,
}

/// Dimension-matched reference level. Designated noise outside `exclude` is
/// used when enough is available; otherwise the mean over the pool's
/// synthetic replicates. With `synthetic_band` the synthetic replicates are
/// simulated even when designated pads supply the value.
pub fn noise_padded_reference<F: Real>(
    pool: &NoisePool,
    base: &[&CategoricalSeries],
    exclude: &[&str],
    k: usize,
    response: &CategoricalSeries,
    synthetic_band: bool,
) -> Result<ReferenceLevel<F>> {
    if k == 0 {
        return Ok(ReferenceLevel {
            k,
            value: F::lit(conditional_entropy_of(base, response)?),
            source: ReferenceSource::Exact,
            synthetic_mean: None,
            synthetic_sd: None,
            samples: Vec::new(),
        });
    }
    let designated = pool.designated_outside(exclude, k);
    let (samples, mean, sd) = if designated.is_none() || synthetic_band {
        let s: Vec<F> = pool
            .synthetic_levels(base, k, response)?
            .into_iter()
            .map(F::lit)
            .collect();
        let (m, sd) = mean_sd(&s);
        (s, Some(m), Some(sd))
    } else {
        (Vec::new(), None, None)
    };
    let (value, source) = match designated {
        Some(d) => {
            let mut cov: Vec<&CategoricalSeries> = base.to_vec();
            cov.extend(d.iter().map(|(_, s)| *s));
            (
                F::lit(conditional_entropy_of(&cov, response)?),
                ReferenceSource::Designated {
                    features: d.iter().map(|(n, _)| (*n).to_owned()).collect(),
                },
            )
        }
        None => (
            mean.unwrap_or_else(F::nan),
            ReferenceSource::Synthetic {
                replicates: pool.replicates(),
            },
        ),
    };
    Ok(ReferenceLevel {
        k,
        value,
        source,
        synthetic_mean: mean,
        synthetic_sd: sd,
        samples,
    })
}
