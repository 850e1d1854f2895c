use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CedaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    Ex1,
    Ex2,
    #[serde(rename = "ex2star")]
    Ex2Star,
    Ex3Rho,
    #[serde(rename = "ex3_halfsine")]
    Ex3HalfSine,
    #[serde(rename = "ex3_fullsine")]
    Ex3FullSine,
    Ex4,
    Ex5,
    Ex6,
}

impl ExampleId {
    pub const ALL: [ExampleId; 9] = [
        ExampleId::Ex1,
        ExampleId::Ex2,
        ExampleId::Ex2Star,
        ExampleId::Ex3Rho,
        ExampleId::Ex3HalfSine,
        ExampleId::Ex3FullSine,
        ExampleId::Ex4,
        ExampleId::Ex5,
        ExampleId::Ex6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex2Star => "ex2star",
            ExampleId::Ex3Rho => "ex3_rho",
            ExampleId::Ex3HalfSine => "ex3_halfsine",
            ExampleId::Ex3FullSine => "ex3_fullsine",
            ExampleId::Ex4 => "ex4",
            ExampleId::Ex5 => "ex5",
            ExampleId::Ex6 => "ex6",
        }
    }

    /// Sample size used when none is given.
    pub fn default_n(&self) -> usize {
        match self {
            ExampleId::Ex1 | ExampleId::Ex2 | ExampleId::Ex2Star => 20_000,
            ExampleId::Ex3Rho | ExampleId::Ex3HalfSine | ExampleId::Ex3FullSine => 20_000,
            ExampleId::Ex4 | ExampleId::Ex5 => 10_000,
            ExampleId::Ex6 => 100_000,
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = CedaError;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| CedaError::invalid(format!("unknown example `{s}`")))
    }
}

/// Tunable parameters; each example reads the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    /// Compound-symmetry correlation of population 0 (ex2).
    pub rho0: f64,
    /// Compound-symmetry correlation of population 1 (ex2).
    pub rho1: f64,
    /// Dimension of the ex2 response.
    pub dim: usize,
    /// Correlation of the ex3 bivariate normal.
    pub rho: f64,
    /// Mixture setting of ex2star, 1 (close) or 2 (apart).
    pub setting: u8,
    /// Mean of population 1 in ex1.
    pub gap: f64,
    /// Scale of the additive standard-normal noise.
    pub noise_scale: f64,
    /// Common off-diagonal covariance of the ex6 base features.
    pub base_cov: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            rho0: 0.5,
            rho1: 0.7,
            dim: 2,
            rho: 0.5,
            setting: 1,
            gap: 1.0,
            noise_scale: 0.1,
            base_cov: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub example: ExampleId,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn new(example: ExampleId, n: usize, seed: u64) -> Self {
        Self {
            example,
            n,
            seed,
            params: GeneratorParams::default(),
        }
    }

    pub fn with_params(mut self, params: GeneratorParams) -> Self {
        self.params = params;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if self.n == 0 {
            return Err(CedaError::invalid("n must be at least 1"));
        }
        let corr_ok = |r: f64| r > -1.0 && r < 1.0;
        match self.example {
            ExampleId::Ex2 => {
                if p.dim < 1 {
                    return Err(CedaError::invalid("dim must be at least 1"));
                }
                let lower = -1.0 / (p.dim.max(2) - 1) as f64;
                for r in [p.rho0, p.rho1] {
                    if !corr_ok(r) || r <= lower {
                        return Err(CedaError::NotPositiveDefinite);
                    }
                }
            }
            ExampleId::Ex3Rho if !corr_ok(p.rho) => {
                return Err(CedaError::invalid("rho must lie in (-1, 1)"))
            }
            ExampleId::Ex2Star if !(p.setting == 1 || p.setting == 2) => {
                return Err(CedaError::invalid("ex2star setting must be 1 or 2"))
            }
            ExampleId::Ex6 if !(p.base_cov > -0.125 && p.base_cov < 1.0) => {
                return Err(CedaError::NotPositiveDefinite)
            }
            _ => {}
        }
        if !(p.noise_scale.is_finite() && p.noise_scale >= 0.0) {
            return Err(CedaError::invalid("noise_scale must be non-negative"));
        }
        Ok(())
    }
}
