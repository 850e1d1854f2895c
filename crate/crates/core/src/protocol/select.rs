use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::classify::{
    classify_subset, coexistence_ratio, interaction_ratio, is_order_one, Classification,
};
use super::ledger::{cmp_subsets, Ledger};
use super::subsets::{canonical, subset_label};
use crate::categorize::{fuse_features, PointMatrix};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::nullsim::conditional_entropy_of;
use crate::rng::SeedStream;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct ConfirmedFactor<F> {
    pub subset: Vec<String>,
    pub order: usize,
    pub classification: Classification,
    pub ce: F,
    pub ce_drop: F,
    pub sce_star_drop: Option<F>,
    pub excess_sd: Option<F>,
}

/// Pairwise relation between two order-1 factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct PairRelation<F> {
    pub pair: [String; 2],
    pub classification: Classification,
    pub coexistence_ratio: Option<F>,
    pub interaction_ratio: Option<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedSubset {
    pub subset: Vec<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankCriterion {
    /// Ledger entry of the union, when reliable.
    LedgerCe,
    /// Union fused by K-means into one categorical feature.
    FusedCe,
    /// Negative sum of member drops.
    DropSum,
}

/// A set of factors that can be claimed together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct FactorCollection<F> {
    pub features: Vec<String>,
    pub members: Vec<Vec<String>>,
    pub score: F,
    pub criterion: RankCriterion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct MajorFactorReport<F> {
    pub confirmed: Vec<ConfirmedFactor<F>>,
    pub chief: Option<FactorCollection<F>>,
    pub alternatives: Vec<FactorCollection<F>>,
    pub interactions: Vec<Vec<String>>,
    pub relations: Vec<PairRelation<F>>,
    pub excluded: Vec<ExcludedSubset>,
}

impl<F: Real> MajorFactorReport<F> {
    /// Subsets of the chief collection.
    pub fn chief_members(&self) -> Vec<Vec<String>> {
        self.chief
            .as_ref()
            .map(|c| c.members.clone())
            .unwrap_or_default()
    }
}

/// Assembles the major-factor report from a ledger.
///
/// Order-1 factors and interacting subsets form the units. Two units conflict
/// when any of their features form a non-coexistent order-1 pair. The
/// collections are the maximal conflict-free sets of units; the one with the
/// lowest conditional entropy is the chief, the rest are alternatives. When
/// `dataset` holds the raw numeric columns, unions too large for a reliable
/// table are ranked by fusing them with K-means.
pub fn select_major_factors<F: Real>(
    ledger: &Ledger<F>,
    dataset: Option<&Dataset<F>>,
) -> Result<MajorFactorReport<F>> {
    let cfg = &ledger.config;
    let mut confirmed = Vec::new();
    let mut excluded = Vec::new();
    let mut interactions = Vec::new();
    let mut relations = Vec::new();

    for e in &ledger.entries {
        let class = classify_subset(e, ledger, cfg);
        match class {
            Classification::OrderOne | Classification::Interaction => {
                confirmed.push(ConfirmedFactor {
                    subset: e.subset.clone(),
                    order: e.order,
                    classification: class,
                    ce: e.ce,
                    ce_drop: e.ce_drop,
                    sce_star_drop: e.sce_star_drop,
                    excess_sd: e.c1.as_ref().map(|v| v.excess_sd),
                });
                if class == Classification::Interaction {
                    interactions.push(e.subset.clone());
                }
            }
            Classification::Undetermined => excluded.push(ExcludedSubset {
                subset: e.subset.clone(),
                reason: format!(
                    "undetermined (dimension): average cell count {:.3}",
                    e.avg_cell.as_f64()
                ),
            }),
            Classification::Noise => {}
            _ if e.order == 1 => excluded.push(ExcludedSubset {
                subset: e.subset.clone(),
                reason: format!("c1 {}", e.c1_status()),
            }),
            _ => {}
        }
        if e.order == 2
            && e.subset.iter().all(|m| {
                ledger
                    .get(std::slice::from_ref(m))
                    .is_some_and(|s| is_order_one(s, cfg))
            })
        {
            relations.push(PairRelation {
                pair: [e.subset[0].clone(), e.subset[1].clone()],
                classification: class,
                coexistence_ratio: coexistence_ratio(e),
                interaction_ratio: interaction_ratio(e),
            });
        }
    }
    for s in &ledger.skipped {
        excluded.push(ExcludedSubset {
            subset: s.clone(),
            reason: "cell budget exceeded".into(),
        });
    }
    confirmed.sort_by(|a, b| {
        a.order
            .cmp(&b.order)
            .then_with(|| cmp_subsets(&a.subset, &b.subset))
    });

    let units: Vec<Vec<String>> = confirmed.iter().map(|c| c.subset.clone()).collect();
    let blocked: Vec<[String; 2]> = relations
        .iter()
        .filter(|r| r.classification == Classification::NonCoexistent)
        .map(|r| r.pair.clone())
        .collect();
    let conflict = |a: &[String], b: &[String]| {
        blocked.iter().any(|[x, y]| {
            (a.contains(x) && b.contains(y) && !a.contains(y) && !b.contains(x))
                || (a.contains(y) && b.contains(x) && !a.contains(x) && !b.contains(y))
        })
    };
    let n = units.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && !conflict(&units[i], &units[j]))
                .collect()
        })
        .collect();
    let cliques = maximal_cliques(&adj);

    let mut collections: Vec<FactorCollection<F>> = Vec::new();
    let unions: Vec<Vec<String>> = cliques
        .iter()
        .map(|c| {
            let set: BTreeSet<String> = c.iter().flat_map(|&i| units[i].iter().cloned()).collect();
            canonical(&set.into_iter().collect::<Vec<_>>())
        })
        .collect();
    let criterion = if unions
        .iter()
        .all(|u| ledger.get(u).is_some_and(|e| e.reliable))
    {
        RankCriterion::LedgerCe
    } else if dataset.is_some_and(|d| unions.iter().flatten().all(|f| d.numeric(f).is_ok())) {
        RankCriterion::FusedCe
    } else {
        RankCriterion::DropSum
    };
    for (clique, features) in cliques.iter().zip(unions) {
        let mut members: Vec<Vec<String>> = clique.iter().map(|&i| units[i].clone()).collect();
        members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| cmp_subsets(a, b)));
        let score = match criterion {
            RankCriterion::LedgerCe => ledger.get(&features).map_or(F::infinity(), |e| e.ce),
            RankCriterion::FusedCe => match dataset {
                Some(d) => F::lit(fused_ce(ledger, d, &features)?),
                None => F::infinity(),
            },
            RankCriterion::DropSum => -clique
                .iter()
                .map(|&i| confirmed[i].ce_drop)
                .fold(F::zero(), |a, b| a + b),
        };
        collections.push(FactorCollection {
            features,
            members,
            score,
            criterion,
        });
    }
    collections.sort_by(|a, b| {
        a.score
            .partial_cmp(&b.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| cmp_subsets(&a.features, &b.features))
    });
    let mut it = collections.into_iter();
    let chief = it.next();
    let alternatives = it.collect();

    Ok(MajorFactorReport {
        confirmed,
        chief,
        alternatives,
        interactions,
        relations,
        excluded,
    })
}

/// `H[Y | K-means fusion of features]` with the ledger's fusion size.
pub(crate) fn fused_ce<F: Real>(
    ledger: &Ledger<F>,
    dataset: &Dataset<F>,
    features: &[String],
) -> Result<f64> {
    let response = ledger
        .response()
        .ok_or(crate::error::CedaError::EmptyInput)?;
    let cols = features
        .iter()
        .map(|f| dataset.numeric(f))
        .collect::<Result<Vec<_>>>()?;
    let pts = PointMatrix::from_columns(&cols)?;
    let seed = SeedStream::new(ledger.config.seed)
        .child_str("fuse")
        .child_str(&subset_label(features))
        .key();
    let fused = fuse_features(&pts, ledger.default_fuse_k(), seed)?;
    conditional_entropy_of(&[&fused], response)
}

/// Bron–Kerbosch with pivoting over a boolean adjacency matrix.
fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn bk(
        adj: &[Vec<bool>],
        r: Vec<usize>,
        mut p: Vec<usize>,
        mut x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count());
        let candidates: Vec<usize> = match pivot {
            Some(u) => p.iter().copied().filter(|&v| !adj[u][v]).collect(),
            None => p.clone(),
        };
        for v in candidates {
            let mut r2 = r.clone();
            r2.push(v);
            let p2 = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let x2 = x.iter().copied().filter(|&w| adj[v][w]).collect();
            bk(adj, r2, p2, x2, out);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    bk(adj, Vec::new(), (0..n).collect(), Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}
