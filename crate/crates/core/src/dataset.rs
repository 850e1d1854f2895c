//! Named columns with designated response columns.

use crate::categorize::Categorizer;
use crate::error::{CedaError, Result};
use crate::scalar::Real;
use crate::tabulate::CategoricalSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Column<F> {
    Numeric(Vec<F>),
    Categorical(CategoricalSeries),
}

impl<F: Real> Column<F> {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<F> {
    columns: Vec<(String, Column<F>)>,
    responses: Vec<String>,
}

impl<F: Real> Dataset<F> {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
            responses: Vec::new(),
        }
    }

    /// Appends a column; all columns must share one length.
    pub fn push(&mut self, name: impl Into<String>, column: Column<F>) -> Result<()> {
        let name = name.into();
        if column.is_empty() {
            return Err(CedaError::EmptyInput);
        }
        if let Some((_, first)) = self.columns.first() {
            if first.len() != column.len() {
                return Err(CedaError::LengthMismatch {
                    expected: first.len(),
                    actual: column.len(),
                });
            }
        }
        if self.index(&name).is_some() {
            return Err(CedaError::invalid(format!("duplicate column `{name}`")));
        }
        self.columns.push((name, column));
        Ok(())
    }

    pub fn with_numeric(mut self, name: &str, values: Vec<F>) -> Result<Self> {
        self.push(name, Column::Numeric(values))?;
        Ok(self)
    }

    pub fn set_response(&mut self, name: &str) -> Result<()> {
        self.set_responses(&[name])
    }

    /// Designates one or more response columns (a multi-dimensional response).
    pub fn set_responses(&mut self, names: &[&str]) -> Result<()> {
        for n in names {
            self.index(n)
                .ok_or_else(|| CedaError::UnknownFeature((*n).to_owned()))?;
        }
        self.responses = names.iter().map(|n| (*n).to_owned()).collect();
        Ok(())
    }

    pub fn with_response(mut self, name: &str) -> Result<Self> {
        self.set_response(name)?;
        Ok(self)
    }

    /// First response column.
    pub fn response(&self) -> Option<&str> {
        self.responses.first().map(String::as_str)
    }

    pub fn responses(&self) -> &[String] {
        &self.responses
    }

    /// Number of records.
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    /// Every column except the responses, in insertion order.
    pub fn covariate_names(&self) -> Vec<String> {
        self.names()
            .filter(|n| !self.responses.iter().any(|r| r == n))
            .map(str::to_owned)
            .collect()
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column<F>> {
        self.index(name)
            .map(|i| &self.columns[i].1)
            .ok_or_else(|| CedaError::UnknownFeature(name.to_owned()))
    }

    pub fn numeric(&self, name: &str) -> Result<&[F]> {
        match self.column(name)? {
            Column::Numeric(v) => Ok(v),
            Column::Categorical(_) => Err(CedaError::NotNumeric(name.to_owned())),
        }
    }

    /// Categorical columns pass through; numeric ones go through `how`.
    pub fn categorize(
        &self,
        name: &str,
        how: &Categorizer,
        seed: u64,
    ) -> Result<CategoricalSeries> {
        match self.column(name)? {
            Column::Categorical(s) => Ok(s.clone()),
            Column::Numeric(v) => how.categorize(v, seed),
        }
    }
}
