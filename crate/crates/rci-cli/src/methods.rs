//! Shared method execution for `analyze` and `benchmark`.

use std::time::Instant;

use ndarray::Array2;
use rci_core::baselines::{adaptive_lasso_scores, conditional_outlier_scores, ttest_scores};
use rci_core::data::DataMatrix;
use rci_core::lingam::{apply_extraction, direct_lingam, local_plus, ErrorExtraction, RootFinder};
use rci_core::rci::{fit_logistic, shapley_scores, LogisticModel, RciMode};
use rci_core::rng::{stream, Stream};
use rci_core::Result;

use crate::config::Method;

/// Train/eval split of one labeled dataset. With `test_frac = 0` the eval set
/// is the training set itself (the in-sample, table-reproduction mode).
pub struct Split {
    pub train: DataMatrix,
    pub train_labels: Vec<u8>,
    pub eval: DataMatrix,
    pub eval_labels: Vec<u8>,
    /// Original row index of each eval row.
    pub eval_ids: Vec<usize>,
    /// Row indices of the eval rows in the source matrix.
    pub eval_rows: Vec<usize>,
}

pub fn make_split(data: &DataMatrix, labels: &[u8], test_frac: f64, seed: u64) -> Split {
    let n = data.nrows();
    if test_frac == 0.0 {
        return Split {
            train: data.clone(),
            train_labels: labels.to_vec(),
            eval: data.clone(),
            eval_labels: labels.to_vec(),
            eval_ids: (0..n).collect(),
            eval_rows: (0..n).collect(),
        };
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream(seed, Stream::Split, 0);
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rand_index(&mut rng, i + 1);
        order.swap(i, j);
    }
    let n_test = ((n as f64) * test_frac).floor().max(1.0) as usize;
    let n_train = n - n_test;
    let (train_rows, test_rows) = order.split_at(n_train);
    let mut test_rows = test_rows.to_vec();
    test_rows.sort_unstable();

    let take = |rows: &[usize]| {
        let mut values = Array2::zeros((rows.len(), data.ncols()));
        let mut labs = Vec::with_capacity(rows.len());
        for (k, &r) in rows.iter().enumerate() {
            for j in 0..data.ncols() {
                values[[k, j]] = data.values[[r, j]];
            }
            labs.push(labels[r]);
        }
        (
            DataMatrix {
                values,
                names: data.names.clone(),
            },
            labs,
        )
    };
    let mut train_rows = train_rows.to_vec();
    train_rows.sort_unstable();
    let (train, train_labels) = take(&train_rows);
    let (eval, eval_labels) = take(&test_rows);
    Split {
        train,
        train_labels,
        eval,
        eval_labels,
        eval_ids: test_rows.clone(),
        eval_rows: test_rows,
    }
}

fn rand_index(rng: &mut rand_chacha::ChaCha8Rng, bound: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..bound)
}

/// One method's scores on the eval rows plus bookkeeping.
pub struct MethodOutput {
    pub scores: Array2<f64>,
    pub model: Option<LogisticModel>,
    pub extraction: Option<ErrorExtraction>,
    pub kept_empty: bool,
    /// Extraction-only wall clock for the rci methods, full scoring time for
    /// the baselines.
    pub wall_seconds: f64,
}

pub fn run_method(method: Method, split: &Split, alpha: f64) -> Result<MethodOutput> {
    match method {
        Method::RciFull => run_rci_method(split, alpha, RciMode::Full),
        Method::RciLocalPlus => run_rci_method(split, alpha, RciMode::LocalPlus),
        Method::TTest => {
            let start = Instant::now();
            let out = ttest_scores(&split.eval, &split.eval_labels)?;
            Ok(MethodOutput {
                scores: out.scores,
                model: None,
                extraction: None,
                kept_empty: false,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        }
        Method::AdaptiveLasso => {
            let start = Instant::now();
            let out = adaptive_lasso_scores(&split.eval, &split.eval_labels)?;
            Ok(MethodOutput {
                scores: out.scores,
                model: None,
                extraction: None,
                kept_empty: false,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        }
        Method::ConditionalOutlier => {
            let start = Instant::now();
            let out = conditional_outlier_scores(&split.eval, &split.eval_labels, alpha)?;
            Ok(MethodOutput {
                scores: out.scores,
                model: None,
                extraction: None,
                kept_empty: false,
                wall_seconds: start.elapsed().as_secs_f64(),
            })
        }
    }
}

/// The rci pipeline with the extraction call timed on its own (the timing
/// contract excludes generation, fitting and metric computation).
fn run_rci_method(split: &Split, alpha: f64, mode: RciMode) -> Result<MethodOutput> {
    let p = split.train.ncols();
    let start = Instant::now();
    let extraction = match mode {
        RciMode::Full => direct_lingam(&split.train.values, RootFinder::Plus)?,
        RciMode::LocalPlus => local_plus(&split.train.values, &split.train_labels, alpha)?,
    };
    let wall_seconds = start.elapsed().as_secs_f64();

    let m = split.eval.nrows();
    if extraction.order.is_empty() {
        return Ok(MethodOutput {
            scores: Array2::zeros((m, p)),
            model: None,
            extraction: Some(extraction),
            kept_empty: true,
            wall_seconds,
        });
    }
    let model = fit_logistic(&extraction.errors, &split.train_labels)?;
    let eval_errors = apply_extraction(&extraction, &split.eval.values)?;
    let shapley = shapley_scores(&model, &eval_errors, &extraction.order, p)?;
    Ok(MethodOutput {
        scores: shapley.scores,
        model: Some(model),
        extraction: Some(extraction),
        kept_empty: false,
        wall_seconds,
    })
}
