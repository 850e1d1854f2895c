use serde::{Deserialize, Serialize};

use super::ledger::{Ledger, LedgerConfig, SubsetLedgerEntry};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// Singleton that clears confirmation and carries a drop.
    #[serde(rename = "order-1 major factor")]
    OrderOne,
    /// Members are conditionally dependent given the response.
    #[serde(rename = "interaction")]
    Interaction,
    /// Members act side by side without interacting.
    #[serde(rename = "ecological")]
    Ecological,
    /// Two order-1 factors that carry overlapping information.
    #[serde(rename = "non-coexistent")]
    NonCoexistent,
    #[serde(rename = "none")]
    NoEffect,
    #[serde(rename = "undetermined (dimension)")]
    Undetermined,
    /// Contains a designated noise feature.
    #[serde(rename = "noise")]
    Noise,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::OrderOne => "order-1 major factor",
            Classification::Interaction => "interaction",
            Classification::Ecological => "ecological",
            Classification::NonCoexistent => "non-coexistent",
            Classification::NoEffect => "none",
            Classification::Undetermined => "undetermined (dimension)",
            Classification::Noise => "noise",
        }
    }
}

/// Whether a singleton qualifies as an order-1 major factor.
pub(crate) fn is_order_one<F: Real>(e: &SubsetLedgerEntry<F>, cfg: &LedgerConfig<F>) -> bool {
    e.order == 1 && e.reliable && !e.contains_noise && e.confirmed() && e.ce_drop >= cfg.min_effect
}

/// Joint drop of a pair over the sum of its members' drops on the same table size.
pub fn coexistence_ratio<F: Real>(e: &SubsetLedgerEntry<F>) -> Option<F> {
    if e.order != 2 {
        return None;
    }
    let sum = e
        .solo
        .iter()
        .map(|s| s.drop.max(F::zero()))
        .fold(F::zero(), |a, b| a + b);
    (sum > F::zero() && !e.solo.is_empty()).then(|| e.ce_drop / sum)
}

/// Gain of the added member over its own effect at the same dimension.
pub fn interaction_ratio<F: Real>(e: &SubsetLedgerEntry<F>) -> Option<F> {
    let gain = e.sce_star_drop?;
    let solo = e.solo_of(e.added.as_deref()?)?.max(F::zero());
    Some(if solo > F::zero() {
        gain / solo
    } else if gain > F::zero() {
        F::infinity()
    } else {
        F::zero()
    })
}

fn interacts<F: Real>(e: &SubsetLedgerEntry<F>, cfg: &LedgerConfig<F>) -> bool {
    let (Some(gain), Some(added)) = (e.sce_star_drop, e.added.as_deref()) else {
        return false;
    };
    let solo = e.solo_of(added).unwrap_or(F::zero()).max(F::zero());
    e.confirmed() && e.gain_confirmed() && gain >= cfg.min_effect && gain >= cfg.r_int * solo
}

/// Classifies one ledger entry using its proper subsets.
///
/// - Singletons: order-1 factor when confirmed with a drop of at least `min_effect`.
/// - Pairs of order-1 factors: non-coexistent when the joint drop falls below
///   `coexist_floor` times the summed solo drops, otherwise interaction or
///   ecological by the gain test.
/// - Everything else: interaction when the subset is confirmed, its
///   dimension-matched gain clears its null band and `min_effect`, and the
///   gain is at least `r_int` times the added member's solo effect.
/// - Larger sets of mutually ecological order-1 factors are ecological.
pub fn classify_subset<F: Real>(
    entry: &SubsetLedgerEntry<F>,
    ledger: &Ledger<F>,
    cfg: &LedgerConfig<F>,
) -> Classification {
    if entry.contains_noise {
        return Classification::Noise;
    }
    if !entry.reliable {
        return Classification::Undetermined;
    }
    if entry.order == 1 {
        return if is_order_one(entry, cfg) {
            Classification::OrderOne
        } else {
            Classification::NoEffect
        };
    }

    let all_order_one = entry.subset.iter().all(|m| {
        ledger
            .get(std::slice::from_ref(m))
            .is_some_and(|s| is_order_one(s, cfg))
    });

    if entry.order == 2 && all_order_one {
        return match coexistence_ratio(entry) {
            Some(r) if r < cfg.coexist_floor => Classification::NonCoexistent,
            Some(_) if interacts(entry, cfg) => Classification::Interaction,
            Some(_) => Classification::Ecological,
            None => Classification::Undetermined,
        };
    }

    if interacts(entry, cfg) {
        return Classification::Interaction;
    }

    if all_order_one {
        let mut pairs_ecological = true;
        for (i, a) in entry.subset.iter().enumerate() {
            for b in &entry.subset[i + 1..] {
                let pair = [a.clone(), b.clone()];
                let verdict = ledger.get(&pair).map(|p| classify_subset(p, ledger, cfg));
                pairs_ecological &= verdict == Some(Classification::Ecological);
            }
        }
        if pairs_ecological {
            return Classification::Ecological;
        }
    }
    Classification::NoEffect
}
