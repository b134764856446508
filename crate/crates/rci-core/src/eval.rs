//! Evaluation metrics: truncated prefix-overlap ranking agreement (weighted by
//! normalized true scores or uniformly) and mean squared error of scores.

use crate::error::{Error, Result};
use crate::rci::{rank_row, Ranking, ShapleyMatrix};

/// One sample's ground truth: true root causes in descending score order with
/// their normalized positive scores.
#[derive(Debug, Clone)]
pub struct GroundTruthRanking {
    /// Variable indices with strictly positive true score, descending.
    pub indices: Vec<usize>,
    /// Normalized positive scores (sum to 1 when q ≥ 1).
    pub weights: Vec<f64>,
    /// Number of true root causes.
    pub q: usize,
}

/// Builds per-sample ground-truth rankings from true scores: keep strictly
/// positive scores, sort descending (ties by index), normalize to sum 1.
pub fn ground_truth_ranking(true_scores: &ShapleyMatrix) -> Vec<GroundTruthRanking> {
    let (n, _) = true_scores.scores.dim();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let row = true_scores.scores.row(k);
        let ranking = rank_row(row.as_slice().expect("row is contiguous"))
            .expect("true scores must be finite");
        let q = ranking.root_cause_count;
        let indices: Vec<usize> = ranking.order[..q].to_vec();
        let total: f64 = indices.iter().map(|&i| row[i]).sum();
        let weights: Vec<f64> = indices.iter().map(|&i| row[i] / total).collect();
        out.push(GroundTruthRanking { indices, weights, q });
    }
    out
}

fn rbo_mean<F>(estimated: &[Ranking], truth: &[GroundTruthRanking], weight: F) -> Result<f64>
where
    F: Fn(&GroundTruthRanking, usize) -> f64,
{
    if estimated.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            context: "RBO sample counts",
            expected: truth.len(),
            actual: estimated.len(),
        });
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for (est, gt) in estimated.iter().zip(truth) {
        if gt.q == 0 {
            continue;
        }
        if est.order.len() < gt.q {
            return Err(Error::InvalidParameter {
                name: "estimated",
                reason: format!(
                    "ranking covers {} variables but {} root causes exist",
                    est.order.len(),
                    gt.q
                ),
            });
        }
        let p = est.order.len();
        let mut in_est = vec![false; p];
        let mut in_truth = vec![false; p];
        let mut overlap = 0usize;
        let mut sample = 0.0;
        for depth in 1..=gt.q {
            let e = est.order[depth - 1];
            let t = gt.indices[depth - 1];
            if in_truth[e] {
                overlap += 1;
            }
            in_est[e] = true;
            if in_est[t] {
                overlap += 1;
            }
            in_truth[t] = true;
            sample += weight(gt, depth - 1) * overlap as f64 / depth as f64;
        }
        total += sample;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::UndefinedMetric(
            "no sample has a strictly positive true score".into(),
        ));
    }
    Ok(total / counted as f64)
}

/// Mean over samples (with q ≥ 1) of Σ_{i=1}^{q} s̃_i · |R̂_{1:i} ∩ R_{1:i}| / i.
pub fn rbo_weighted(estimated: &[Ranking], truth: &[GroundTruthRanking]) -> Result<f64> {
    rbo_mean(estimated, truth, |gt, i| gt.weights[i])
}

/// Same with uniform weights 1/q per depth.
pub fn rbo_unweighted(estimated: &[Ranking], truth: &[GroundTruthRanking]) -> Result<f64> {
    rbo_mean(estimated, truth, |gt, _| 1.0 / gt.q as f64)
}

/// Mean over all n·p entries of squared score difference.
pub fn mse_scores(estimated: &ShapleyMatrix, truth: &ShapleyMatrix) -> Result<f64> {
    if estimated.scores.dim() != truth.scores.dim() {
        return Err(Error::DimensionMismatch {
            context: "score matrix shapes",
            expected: truth.scores.len(),
            actual: estimated.scores.len(),
        });
    }
    let n = estimated.scores.len() as f64;
    let sum: f64 = estimated
        .scores
        .iter()
        .zip(truth.scores.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum();
    Ok(sum / n)
}
