use ndarray::Array2;

use crate::error::{Error, Result};

/// An n×p sample matrix with column names.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub values: Array2<f64>,
    pub names: Vec<String>,
}

impl DataMatrix {
    /// Wraps a value matrix with explicit column names.
    pub fn new(values: Array2<f64>, names: Vec<String>) -> Result<Self> {
        if names.len() != values.ncols() {
            return Err(Error::DimensionMismatch {
                context: "column names",
                expected: values.ncols(),
                actual: names.len(),
            });
        }
        Ok(Self { values, names })
    }

    /// Wraps a value matrix with default names `X1..Xp`.
    pub fn from_values(values: Array2<f64>) -> Self {
        let names = default_names(values.ncols());
        Self { values, names }
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// `X1..Xp`, matching the cohort CSV header convention.
pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("X{i}")).collect()
}

/// Checks that a label vector is binary with both classes present.
pub fn validate_labels(labels: &[u8], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: "label vector length",
            expected: n,
            actual: labels.len(),
        });
    }
    if labels.iter().any(|&d| d > 1) {
        return Err(Error::Input("labels must be binary {0,1}".into()));
    }
    let ones = labels.iter().filter(|&&d| d == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::SingleClassLabels);
    }
    Ok(())
}
