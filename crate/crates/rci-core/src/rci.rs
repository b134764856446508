//! End-to-end per-sample scoring: fit a logistic model on extracted errors,
//! score each test row as error × coefficient, and rank.

use ndarray::Array2;

use crate::data::{validate_labels, DataMatrix};
use crate::error::{Error, Result};
use crate::lingam::{apply_extraction, direct_lingam, local_plus, ErrorExtraction, RootFinder};
use crate::sem::logistic;

const IRLS_TOL: f64 = 1e-8;
const IRLS_MAX_ITER: usize = 100;
const IRLS_RIDGE: f64 = 1e-8;
/// Per-iteration cap on coefficient movement; only binds under separation.
const IRLS_MAX_STEP: f64 = 10.0;

/// Logistic model over extracted errors.
#[derive(Debug, Clone)]
pub struct LogisticModel {
    /// Coefficients on the error columns.
    pub delta: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Per-sample score matrix; columns outside the kept set are exactly zero.
#[derive(Debug, Clone)]
pub struct ShapleyMatrix {
    pub scores: Array2<f64>,
    pub sample_ids: Vec<usize>,
}

/// Descending score ranking of one sample's row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    /// Permutation of variable indices, scores nonincreasing, ties by index.
    pub order: Vec<usize>,
    /// Number of strictly positive scores.
    pub root_cause_count: usize,
}

/// Which extraction feeds the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RciMode {
    /// Extract all p errors.
    Full,
    /// Label-screened extraction; only kept errors are fitted and scored.
    LocalPlus,
}

/// Everything produced by one pipeline run.
#[derive(Debug, Clone)]
pub struct RciOutput {
    pub shapley: ShapleyMatrix,
    pub model: LogisticModel,
    pub extraction: ErrorExtraction,
    /// Set when the screened kept set was empty and the scores are all zero.
    pub kept_empty: bool,
}

pub(crate) fn cholesky_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<()> {
    let n = b.len();
    // in-place LL^T factorization
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= a[i][k] * a[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::DegenerateInput(
                        "normal equations are not positive definite".into(),
                    ));
                }
                a[i][j] = sum.sqrt();
            } else {
                a[i][j] = sum / a[j][j];
            }
        }
    }
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= a[i][k] * b[k];
        }
        b[i] = sum / a[i][i];
    }
    for i in (0..n).rev() {
        let mut sum = b[i];
        for k in i + 1..n {
            sum -= a[k][i] * b[k];
        }
        b[i] = sum / a[i][i];
    }
    Ok(())
}

pub(crate) struct IrlsFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Newton/IRLS with a ridge stabilizer on the normal equations. `ridge` guards
/// separability; coefficients stay finite even on separated data.
pub(crate) fn irls_logistic(x: &Array2<f64>, labels: &[u8], ridge: f64) -> Result<IrlsFit> {
    let (n, r) = x.dim();
    let mut coef = vec![0.0; r];
    let mut intercept = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    let mut eta = vec![0.0; n];
    for iter in 1..=IRLS_MAX_ITER {
        iterations = iter;
        for (k, e) in eta.iter_mut().enumerate() {
            let mut v = intercept;
            for j in 0..r {
                v += x[[k, j]] * coef[j];
            }
            *e = v;
        }

        // normal equations (intercept first), ridge on the diagonal
        let dim = r + 1;
        let mut a = vec![vec![0.0; dim]; dim];
        let mut g = vec![0.0; dim];
        for k in 0..n {
            let mu = logistic(eta[k].clamp(-30.0, 30.0));
            let w = mu * (1.0 - mu);
            let resid = labels[k] as f64 - mu;
            g[0] += resid;
            a[0][0] += w;
            for i in 0..r {
                let xi = x[[k, i]];
                g[i + 1] += resid * xi;
                a[i + 1][0] += w * xi;
                for j in 0..=i {
                    a[i + 1][j + 1] += w * xi * x[[k, j]];
                }
            }
        }
        for i in 0..dim {
            a[i][i] += ridge;
            for j in 0..i {
                a[j][i] = a[i][j];
            }
        }

        cholesky_solve(&mut a, &mut g)?;
        let mut max_step = g.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
        if max_step > IRLS_MAX_STEP {
            let scale = IRLS_MAX_STEP / max_step;
            for s in &mut g {
                *s *= scale;
            }
            max_step = IRLS_MAX_STEP;
        }
        intercept += g[0];
        for j in 0..r {
            coef[j] += g[j + 1];
        }
        if max_step < IRLS_TOL {
            converged = true;
            break;
        }
    }
    Ok(IrlsFit {
        coefficients: coef,
        intercept,
        converged,
        iterations,
    })
}

/// Maximum-likelihood logistic fit of the labels on the error columns.
pub fn fit_logistic(errors: &Array2<f64>, labels: &[u8]) -> Result<LogisticModel> {
    let (n, r) = errors.dim();
    validate_labels(labels, n)?;
    if n <= r {
        return Err(Error::InvalidParameter {
            name: "errors",
            reason: format!("need more samples than columns (n={n}, r={r})"),
        });
    }
    let fit = irls_logistic(errors, labels, IRLS_RIDGE)?;
    Ok(LogisticModel {
        delta: fit.coefficients,
        intercept: fit.intercept,
        converged: fit.converged,
        iterations: fit.iterations,
    })
}

/// Scores test rows: `scores[k][kept[j]] = errors_test[k][j] · delta[j]`,
/// zero everywhere else.
pub fn shapley_scores(
    model: &LogisticModel,
    errors_test: &Array2<f64>,
    kept: &[usize],
    p: usize,
) -> Result<ShapleyMatrix> {
    let (m, r) = errors_test.dim();
    if kept.len() != r || model.delta.len() != r {
        return Err(Error::DimensionMismatch {
            context: "kept set / coefficient / error columns",
            expected: r,
            actual: kept.len().min(model.delta.len()),
        });
    }
    if let Some(&bad) = kept.iter().find(|&&i| i >= p) {
        return Err(Error::InvalidParameter {
            name: "kept",
            reason: format!("index {bad} out of range for p={p}"),
        });
    }
    let mut scores = Array2::zeros((m, p));
    for k in 0..m {
        for (j, &var) in kept.iter().enumerate() {
            scores[[k, var]] = errors_test[[k, j]] * model.delta[j];
        }
    }
    Ok(ShapleyMatrix {
        scores,
        sample_ids: (0..m).collect(),
    })
}

/// Descending sort with ascending-index tie-break; counts strictly positive
/// scores as root causes.
pub fn rank_row(score_row: &[f64]) -> Result<Ranking> {
    if score_row.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "score_row",
            reason: "scores must be finite".into(),
        });
    }
    let mut order: Vec<usize> = (0..score_row.len()).collect();
    order.sort_by(|&a, &b| {
        score_row[b]
            .partial_cmp(&score_row[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let root_cause_count = score_row.iter().filter(|&&s| s > 0.0).count();
    Ok(Ranking {
        order,
        root_cause_count,
    })
}

/// Runs the whole pipeline: extract errors from the training data, fit the
/// logistic model, and score the test rows through the stored extraction.
pub fn run_rci(
    train: &DataMatrix,
    labels: &[u8],
    test: &DataMatrix,
    alpha: f64,
    mode: RciMode,
) -> Result<RciOutput> {
    let p = train.ncols();
    if test.ncols() != p {
        return Err(Error::DimensionMismatch {
            context: "test columns",
            expected: p,
            actual: test.ncols(),
        });
    }
    validate_labels(labels, train.nrows())?;

    let extraction = match mode {
        RciMode::Full => direct_lingam(&train.values, RootFinder::Plus)?,
        RciMode::LocalPlus => local_plus(&train.values, labels, alpha)?,
    };

    let m = test.nrows();
    if extraction.order.is_empty() {
        let ones = labels.iter().filter(|&&d| d == 1).count() as f64;
        let frac = ones / labels.len() as f64;
        return Ok(RciOutput {
            shapley: ShapleyMatrix {
                scores: Array2::zeros((m, p)),
                sample_ids: (0..m).collect(),
            },
            model: LogisticModel {
                delta: Vec::new(),
                intercept: (frac / (1.0 - frac)).ln(),
                converged: true,
                iterations: 0,
            },
            extraction,
            kept_empty: true,
        });
    }

    let model = fit_logistic(&extraction.errors, labels)?;
    let errors_test = apply_extraction(&extraction, &test.values)?;
    let shapley = shapley_scores(&model, &errors_test, &extraction.order, p)?;
    Ok(RciOutput {
        shapley,
        model,
        extraction,
        kept_empty: false,
    })
}
