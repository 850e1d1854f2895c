use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};

/// Per-record category labels for one (possibly fused) variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalSeries {
    labels: Vec<u32>,
    cardinality: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
}

impl CategoricalSeries {
    /// Labels must be `< cardinality`; at least one record.
    pub fn new(labels: Vec<u32>, cardinality: u32) -> Result<Self> {
        if labels.is_empty() {
            return Err(CedaError::EmptyInput);
        }
        if cardinality == 0 {
            return Err(CedaError::invalid("cardinality must be at least 1"));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= cardinality) {
            return Err(CedaError::LabelOutOfRange { label, cardinality });
        }
        Ok(Self {
            labels,
            cardinality,
            names: None,
        })
    }

    /// Cardinality is taken as `max(label) + 1`.
    pub fn from_labels(labels: Vec<u32>) -> Result<Self> {
        let cardinality = labels.iter().copied().max().map(|m| m + 1).unwrap_or(0);
        Self::new(labels, cardinality)
    }

    /// Maps arbitrary string tokens to categories; categories are the distinct
    /// tokens in sorted order.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(CedaError::EmptyInput);
        }
        let mut names: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        names.sort();
        names.dedup();
        let labels = tokens
            .iter()
            .map(|t| {
                names
                    .binary_search_by(|n| n.as_str().cmp(t.as_ref()))
                    .unwrap_or(0) as u32
            })
            .collect();
        let cardinality = names.len() as u32;
        Ok(Self {
            labels,
            cardinality,
            names: Some(names),
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cardinality as usize {
            return Err(CedaError::LengthMismatch {
                expected: self.cardinality as usize,
                actual: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    #[inline]
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn cardinality(&self) -> u32 {
        self.cardinality
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of category `c`: its descriptor when present, else the index.
    pub fn category_name(&self, c: u32) -> String {
        match &self.names {
            Some(n) => n[c as usize].clone(),
            None => c.to_string(),
        }
    }

    /// Count of records per category.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.cardinality as usize];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Number of categories actually present.
    pub fn occupied(&self) -> usize {
        self.counts().iter().filter(|&&c| c > 0).count()
    }
}
