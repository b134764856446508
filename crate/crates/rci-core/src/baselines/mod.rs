//! Comparison methods: t-statistic ranking, adaptive-lasso logistic scores and
//! conditional-outlier scores. All three standardize their input first.

mod lasso;

use ndarray::Array2;

use crate::data::{validate_labels, DataMatrix};
use crate::error::{Error, Result};
use crate::lingam::{direct_lingam, independence_pvalue, standardize, RootFinder};
use crate::rci::irls_logistic;

use lasso::{adaptive_lasso_linear, adaptive_lasso_logistic, adaptive_weights};

/// Stage-1 ridge for the adaptive-lasso pilot fits.
const PILOT_RIDGE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Per-variable Welch t-statistic magnitude (same row for every sample).
    TTest,
    /// Per-sample `x ⊙ β̂` from an adaptive-lasso logistic fit.
    AdaptiveLasso,
    /// Per-sample standardized conditional residual magnitude.
    ConditionalOutlier,
}

impl BaselineMethod {
    pub fn tag(self) -> &'static str {
        match self {
            BaselineMethod::TTest => "tt",
            BaselineMethod::AdaptiveLasso => "lr",
            BaselineMethod::ConditionalOutlier => "co",
        }
    }
}

/// Per-sample score matrix of one baseline.
#[derive(Debug, Clone)]
pub struct BaselineScores {
    pub method: BaselineMethod,
    pub scores: Array2<f64>,
}

/// Welch two-sample |t| per variable, replicated across sample rows.
pub fn ttest_scores(data: &DataMatrix, labels: &[u8]) -> Result<BaselineScores> {
    let (n, p) = data.values.dim();
    validate_labels(labels, n)?;
    let mut stats = Vec::with_capacity(p);
    for j in 0..p {
        let col: Vec<f64> = data.values.column(j).iter().copied().collect();
        let ws = crate::lingam::welch_stats(&col, labels)?;
        if ws.degenerate {
            return Err(Error::InvalidParameter {
                name: "data",
                reason: format!("column {j} has zero within-class variance; t undefined"),
            });
        }
        stats.push(ws.t.abs());
    }
    let mut scores = Array2::zeros((n, p));
    for k in 0..n {
        for j in 0..p {
            scores[[k, j]] = stats[j];
        }
    }
    Ok(BaselineScores {
        method: BaselineMethod::TTest,
        scores,
    })
}

/// Adaptive-lasso logistic scores: stage-1 ridge-stabilized MLE supplies the
/// penalty weights, the BIC-selected L1 fit supplies β̂, and each sample row
/// is scored as `x_k ⊙ β̂` on the standardized data.
pub fn adaptive_lasso_scores(data: &DataMatrix, labels: &[u8]) -> Result<BaselineScores> {
    let (n, p) = data.values.dim();
    validate_labels(labels, n)?;
    let (std, _) = standardize(&data.values)?;

    let pilot = irls_logistic(&std, labels, PILOT_RIDGE)?;
    let weights = adaptive_weights(&pilot.coefficients);
    let fit = adaptive_lasso_logistic(&std, labels, &weights)?;

    let mut scores = Array2::zeros((n, p));
    for k in 0..n {
        for j in 0..p {
            scores[[k, j]] = std[[k, j]] * fit.coefficients[j];
        }
    }
    Ok(BaselineScores {
        method: BaselineMethod::AdaptiveLasso,
        scores,
    })
}

/// Conditional-outlier scores: a causal order is learned, each variable is
/// regressed on its order-predecessors with adaptive-lasso pruning, and the
/// score is the absolute standardized conditional residual. Variables whose
/// independence p-value against the labels is ≥ `alpha` are zeroed out.
pub fn conditional_outlier_scores(
    data: &DataMatrix,
    labels: &[u8],
    alpha: f64,
) -> Result<BaselineScores> {
    let (n, p) = data.values.dim();
    validate_labels(labels, n)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("need 0 < alpha <= 1, got {alpha}"),
        });
    }
    let (std, _) = standardize(&data.values)?;
    let extraction = direct_lingam(&std, RootFinder::Plus)?;

    let mut scores = Array2::zeros((n, p));
    for (t, &v) in extraction.order.iter().enumerate() {
        let y: Vec<f64> = std.column(v).iter().copied().collect();
        let residual = if t == 0 {
            y.clone()
        } else {
            let preds = &extraction.order[..t];
            let mut x = Array2::zeros((n, t));
            for (c, &u) in preds.iter().enumerate() {
                for k in 0..n {
                    x[[k, c]] = std[[k, u]];
                }
            }
            // stage-1 OLS pilot via ridge-stabilized normal equations
            let pilot = ols_ridge(&x, &y, 1e-8)?;
            let weights = adaptive_weights(&pilot);
            let beta = adaptive_lasso_linear(&x, &y, &weights)?;
            (0..n)
                .map(|k| {
                    let mut r = y[k];
                    for (c, &b) in beta.iter().enumerate() {
                        if b != 0.0 {
                            r -= x[[k, c]] * b;
                        }
                    }
                    r
                })
                .collect()
        };
        let nf = n as f64;
        let mean = residual.iter().sum::<f64>() / nf;
        let var = residual.iter().map(|&r| (r - mean) * (r - mean)).sum::<f64>() / nf;
        if var < 1e-12 {
            return Err(Error::DegenerateInput(format!(
                "conditional residual of column {v} has (near-)zero variance"
            )));
        }
        let inv = 1.0 / var.sqrt();
        for k in 0..n {
            scores[[k, v]] = (residual[k] - mean).abs() * inv;
        }
    }

    // non-ancestor exclusion on the original standardized columns
    for j in 0..p {
        let col: Vec<f64> = std.column(j).iter().copied().collect();
        if independence_pvalue(&col, labels)? >= alpha {
            for k in 0..n {
                scores[[k, j]] = 0.0;
            }
        }
    }

    Ok(BaselineScores {
        method: BaselineMethod::ConditionalOutlier,
        scores,
    })
}

fn ols_ridge(x: &Array2<f64>, y: &[f64], ridge: f64) -> Result<Vec<f64>> {
    let (n, p) = x.dim();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for k in 0..n {
        for i in 0..p {
            let xi = x[[k, i]];
            b[i] += xi * y[k];
            for j in 0..=i {
                a[i][j] += xi * x[[k, j]];
            }
        }
    }
    for i in 0..p {
        a[i][i] += ridge;
        for j in 0..i {
            a[j][i] = a[i][j];
        }
    }
    crate::rci::cholesky_solve(&mut a, &mut b)?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use crate::sem::logistic;
    use ndarray::Array2;
    use rand::Rng;

    fn labeled_noise(n: usize, p: usize, seed: u64) -> (DataMatrix, Vec<u8>) {
        let mut rng = stream(seed, Stream::Errors, 0);
        let mut values = Array2::zeros((n, p));
        for v in values.iter_mut() {
            *v = rng.random::<f64>() * 2.0 - 1.0;
        }
        let labels = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect();
        (DataMatrix::from_values(values), labels)
    }

    #[test]
    fn identical_class_distributions_give_small_t() {
        let (data, labels) = labeled_noise(20_000, 3, 5);
        let out = ttest_scores(&data, &labels).unwrap();
        for j in 0..3 {
            assert!(out.scores[[0, j]] < 4.0, "|t| = {}", out.scores[[0, j]]);
        }
        // identical rows
        for k in 1..data.nrows() {
            for j in 0..3 {
                assert_eq!(out.scores[[k, j]], out.scores[[0, j]]);
            }
        }
    }

    #[test]
    fn label_like_column_dominates() {
        let (mut data, labels) = labeled_noise(5_000, 3, 6);
        let mut rng = stream(7, Stream::Errors, 1);
        for k in 0..data.nrows() {
            data.values[[k, 1]] = labels[k] as f64 + 0.01 * (rng.random::<f64>() - 0.5);
        }
        let out = ttest_scores(&data, &labels).unwrap();
        assert!(out.scores[[0, 1]] > out.scores[[0, 0]]);
        assert!(out.scores[[0, 1]] > out.scores[[0, 2]]);
    }

    #[test]
    fn zero_within_class_variance_is_rejected() {
        let values = ndarray::array![[0.0, 1.0], [0.0, -1.0], [1.0, 0.5], [1.0, 2.0]];
        let data = DataMatrix::from_values(values);
        let labels = vec![0, 0, 1, 1];
        let err = ttest_scores(&data, &labels).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn lasso_scores_zero_when_no_signal() {
        // with pure-noise labels the BIC-selected model is almost always empty
        let (data, labels) = labeled_noise(2_000, 4, 9);
        let out = adaptive_lasso_scores(&data, &labels).unwrap();
        let max = out.scores.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(max < 0.5, "max |score| = {max}");
    }

    #[test]
    fn active_parent_carries_largest_case_score() {
        let mut rng = stream(10, Stream::Errors, 0);
        let n = 10_000;
        let mut values = Array2::zeros((n, 4));
        let mut labels = Vec::with_capacity(n);
        for k in 0..n {
            for j in 0..4 {
                values[[k, j]] = rng.random::<f64>() * 2.0 - 1.0;
            }
            let eta = 2.0 * values[[k, 2]];
            labels.push(u8::from(rng.random::<f64>() < logistic(eta)));
        }
        let data = DataMatrix::from_values(values);
        let out = adaptive_lasso_scores(&data, &labels).unwrap();
        let mut means = [0.0f64; 4];
        let mut cases = 0.0;
        for k in 0..n {
            if labels[k] == 1 {
                cases += 1.0;
                for j in 0..4 {
                    means[j] += out.scores[[k, j]];
                }
            }
        }
        for m in &mut means {
            *m /= cases;
        }
        for j in [0usize, 1, 3] {
            assert!(
                means[2] > means[j],
                "mean case score: col2 {} vs col{j} {}",
                means[2],
                means[j]
            );
        }
    }

    #[test]
    fn exogenous_variable_scores_marginal_zscore() {
        let (data, labels) = labeled_noise(5_000, 2, 12);
        // alpha = 1.0 keeps every variable (p-values are < 1 a.s.)
        let out = conditional_outlier_scores(&data, &labels, 1.0).unwrap();
        // learned order has a first element whose score is its |z|
        assert!(out.scores.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn planted_shock_tops_conditional_outliers() {
        let mut rng = stream(21, Stream::Errors, 0);
        let n = 20_000;
        let mut values = Array2::zeros((n, 3));
        let mut labels = Vec::with_capacity(n);
        let sigma2 = (1.0f64 / 3.0).sqrt();
        for k in 0..n {
            let e1 = rng.random::<f64>() * 2.0 - 1.0;
            let mut e2 = rng.random::<f64>() * 2.0 - 1.0;
            let e3 = rng.random::<f64>() * 2.0 - 1.0;
            if k == 0 {
                e2 += 6.0 * sigma2; // the planted shock
            }
            let x1 = e1;
            let x2 = 0.8 * x1 + e2;
            let x3 = 0.8 * x2 + e3;
            values[[k, 0]] = x1;
            values[[k, 1]] = x2;
            values[[k, 2]] = x3;
            labels.push(u8::from(rng.random::<f64>() < logistic(1.5 * x3)));
        }
        let data = DataMatrix::from_values(values);
        let out = conditional_outlier_scores(&data, &labels, 0.2).unwrap();
        let row: Vec<f64> = out.scores.row(0).iter().copied().collect();
        let top = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(top, 1, "scores for shocked sample: {row:?}");
    }
}
