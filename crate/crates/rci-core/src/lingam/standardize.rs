use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variances below this are treated as degenerate.
pub(crate) const MIN_VARIANCE: f64 = 1e-12;

/// Per-column centering/scaling parameters, population convention (divisor n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

impl StandardizationParams {
    pub fn p(&self) -> usize {
        self.means.len()
    }
}

pub(crate) fn column_mean_var(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Centers and scales every column to mean 0 and population variance 1,
/// returning the parameters for later reuse on held-out rows.
pub fn standardize(data: &Array2<f64>) -> Result<(Array2<f64>, StandardizationParams)> {
    let (n, p) = data.dim();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "data",
            reason: format!("need at least 2 rows to standardize, got {n}"),
        });
    }
    let mut means = Vec::with_capacity(p);
    let mut stddevs = Vec::with_capacity(p);
    for j in 0..p {
        let col = data.column(j);
        let col: Vec<f64> = col.iter().copied().collect();
        let (mean, var) = column_mean_var(&col);
        if var < MIN_VARIANCE {
            return Err(Error::DegenerateInput(format!(
                "column {j} has (near-)zero variance and cannot be standardized"
            )));
        }
        means.push(mean);
        stddevs.push(var.sqrt());
    }
    let params = StandardizationParams { means, stddevs };
    let out = apply_standardize(data, &params)?;
    Ok((out, params))
}

/// Applies previously estimated parameters: `(x − mean)/stddev` per column.
pub fn apply_standardize(data: &Array2<f64>, params: &StandardizationParams) -> Result<Array2<f64>> {
    let (n, p) = data.dim();
    if params.p() != p {
        return Err(Error::DimensionMismatch {
            context: "standardization parameters",
            expected: p,
            actual: params.p(),
        });
    }
    let mut out = Array2::zeros((n, p));
    for j in 0..p {
        let mean = params.means[j];
        let inv = 1.0 / params.stddevs[j];
        for k in 0..n {
            out[[k, j]] = (data[[k, j]] - mean) * inv;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn hand_computed_three_point_column() {
        let data = array![[1.0], [2.0], [3.0]];
        let (std, params) = standardize(&data).unwrap();
        // mean 2, population sigma sqrt(2/3)
        assert_abs_diff_eq!(params.means[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(params.stddevs[0], (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(std[[0, 0]], -1.224744871391589, epsilon = 1e-12);
        assert_abs_diff_eq!(std[[1, 0]], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(std[[2, 0]], 1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn idempotent_on_standardized_input() {
        let data = array![[1.0, -3.0], [2.0, 0.5], [3.0, 2.0], [-1.0, 0.25]];
        let (std1, _) = standardize(&data).unwrap();
        let (std2, _) = standardize(&std1).unwrap();
        for (a, b) in std1.iter().zip(std2.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_column_is_degenerate() {
        let data = array![[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]];
        let err = standardize(&data).unwrap_err();
        assert!(err.to_string().contains("column 1"));
    }

    #[test]
    fn apply_with_identity_params_is_identity() {
        let data = array![[1.0, 2.0], [3.0, 4.0]];
        let params = StandardizationParams {
            means: vec![0.0, 0.0],
            stddevs: vec![1.0, 1.0],
        };
        let out = apply_standardize(&data, &params).unwrap();
        assert_eq!(out, data);
    }

    #[test]
    fn training_matrix_through_own_params_matches() {
        let data = array![[1.0, 9.0], [4.0, -2.0], [2.0, 3.0], [0.0, 1.0]];
        let (std, params) = standardize(&data).unwrap();
        let replayed = apply_standardize(&data, &params).unwrap();
        assert_eq!(std, replayed);
    }

    #[test]
    fn single_row_applies_fixed_params() {
        let params = StandardizationParams {
            means: vec![1.0, 2.0],
            stddevs: vec![2.0, 4.0],
        };
        let row = array![[3.0, 10.0]];
        let out = apply_standardize(&row, &params).unwrap();
        assert_eq!(out, array![[1.0, 2.0]]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let params = StandardizationParams {
            means: vec![0.0],
            stddevs: vec![1.0],
        };
        let row = array![[3.0, 10.0]];
        assert!(apply_standardize(&row, &params).is_err());
    }
}
