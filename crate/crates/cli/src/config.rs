//! Run configuration: a JSON file merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ceda::genlab::GeneratorParams;
use ceda::{Categorizer, LedgerConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

/// Categorization directives. Columns marked `passthrough` are read as
/// categorical labels; every other column must be numeric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Directives {
    pub default: Categorizer,
    /// Applied to response columns without their own entry.
    pub response: Option<Categorizer>,
    pub columns: BTreeMap<String, Categorizer>,
}

impl Default for Directives {
    fn default() -> Self {
        Self {
            default: Categorizer::quantile(10),
            response: None,
            columns: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub reliability_floor: f64,
    pub r_int: f64,
    pub coexist_floor: f64,
    pub min_effect: f64,
    pub cell_budget: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        let d = LedgerConfig::<f64>::default();
        Self {
            reliability_floor: d.reliability_floor,
            r_int: d.r_int,
            coexist_floor: d.coexist_floor,
            min_effect: d.min_effect,
            cell_budget: d.cell_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub response: Vec<String>,
    /// Empty means every non-response column.
    pub covariates: Vec<String>,
    pub categorize: Directives,
    /// Subsets reported by `measure` and `null`; empty means each covariate alone.
    pub subsets: Vec<Vec<String>>,
    pub max_order: usize,
    pub replicates: usize,
    /// Synthetic noise replicates behind the padded references.
    pub noise_replicates: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub noise_features: Vec<String>,
    pub fuse_k: Option<usize>,
    pub y_ladder: Vec<usize>,
    pub x_ladder: Vec<usize>,
    pub generator: GeneratorParams,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            response: Vec::new(),
            covariates: Vec::new(),
            categorize: Directives::default(),
            subsets: Vec::new(),
            max_order: 2,
            replicates: 1000,
            noise_replicates: 100,
            seed: 0,
            thresholds: Thresholds::default(),
            noise_features: Vec::new(),
            fuse_k: None,
            y_ladder: vec![12, 22, 32, 102],
            x_ladder: vec![12, 22, 32, 102],
            generator: GeneratorParams::default(),
            format: Format::Tsv,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Directive for a column, falling back to the response or default entry.
    pub fn directive(&self, column: &str) -> Categorizer {
        if let Some(c) = self.categorize.columns.get(column) {
            return *c;
        }
        if self.response.iter().any(|r| r == column) {
            if let Some(c) = self.categorize.response {
                return c;
            }
        }
        self.categorize.default
    }

    pub fn is_categorical(&self, column: &str) -> bool {
        self.directive(column) == Categorizer::Passthrough
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.max_order == 0 {
            return bad("max_order must be at least 1".into());
        }
        if self.replicates < 2 {
            return bad("replicates must be at least 2".into());
        }
        if self.noise_replicates < 2 {
            return bad("noise_replicates must be at least 2".into());
        }
        if let Some(r) = self.response.iter().find(|r| self.covariates.contains(r)) {
            return bad(format!("column \"{r}\" is both response and covariate"));
        }
        if let Some(f) = self
            .noise_features
            .iter()
            .find(|f| self.response.contains(f))
        {
            return bad(format!("noise feature \"{f}\" is a response column"));
        }
        if self.fuse_k == Some(0) {
            return bad("fuse_k must be positive".into());
        }
        if self.y_ladder.contains(&0) || self.x_ladder.contains(&0) {
            return bad("cluster ladders must be positive".into());
        }
        for c in self
            .categorize
            .columns
            .values()
            .chain([&self.categorize.default])
            .chain(&self.categorize.response)
        {
            match *c {
                Categorizer::Quantile { k, low, high }
                    if k == 0 || !(0.0 < low && low < high && high < 1.0) =>
                {
                    return bad(format!("invalid quantile directive {c:?}"));
                }
                Categorizer::KMeans { k: 0 } => return bad("kmeans directive needs k >= 1".into()),
                _ => {}
            }
        }
        let t = &self.thresholds;
        if [t.reliability_floor, t.r_int, t.coexist_floor, t.min_effect]
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return bad("thresholds must be finite and non-negative".into());
        }
        Ok(())
    }

    pub fn ledger_config(&self) -> LedgerConfig<f64> {
        LedgerConfig {
            max_order: self.max_order,
            replicates: self.replicates,
            seed: self.seed,
            reliability_floor: self.thresholds.reliability_floor,
            cell_budget: self.thresholds.cell_budget,
            r_int: self.thresholds.r_int,
            coexist_floor: self.thresholds.coexist_floor,
            min_effect: self.thresholds.min_effect,
            noise_features: self.noise_features.clone(),
            fuse_k: self.fuse_k,
        }
    }

    /// SHA-256 of the canonical JSON form, ignoring where the input lives.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.input = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
