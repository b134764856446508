//! End-to-end pipeline checks: in-sample/apply agreement, score bilinearity,
//! screened-column zeroing, and one full synthetic replication against the
//! ground truth.

use ndarray::Array2;
use rci_core::data::DataMatrix;
use rci_core::eval::{ground_truth_ranking, mse_scores, rbo_weighted};
use rci_core::rci::{rank_row, run_rci, shapley_scores, LogisticModel, RciMode};
use rci_core::sem::{generate_sem, sample_cohort, true_shapley};

#[test]
fn in_sample_equals_apply_path_exactly() {
    let sem = generate_sem(6, 2.0, 11).unwrap();
    let cohort = sample_cohort(&sem, 5_000, 2).unwrap();
    let data = DataMatrix::from_values(cohort.data.clone());
    let out = run_rci(&data, &cohort.labels, &data, 0.2, RciMode::Full).unwrap();

    // scoring the training matrix as the test set reuses the stored errors
    let direct = shapley_scores(
        &out.model,
        &out.extraction.errors,
        &out.extraction.order,
        6,
    )
    .unwrap();
    assert_eq!(out.shapley.scores, direct.scores);
}

#[test]
fn scores_are_bilinear_in_errors_and_delta() {
    let model = LogisticModel {
        delta: vec![0.5, -1.25],
        intercept: 0.0,
        converged: true,
        iterations: 1,
    };
    let errors = ndarray::array![[2.0, 4.0], [-1.0, 0.5]];
    let base = shapley_scores(&model, &errors, &[0, 1], 2).unwrap();

    let c = 7.0;
    let scaled_model = LogisticModel {
        delta: model.delta.iter().map(|d| d / c).collect(),
        intercept: 0.0,
        converged: true,
        iterations: 1,
    };
    let scaled_errors = errors.mapv(|v| v * c);
    let scaled = shapley_scores(&scaled_model, &scaled_errors, &[0, 1], 2).unwrap();
    for (a, b) in base.scores.iter().zip(scaled.scores.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn local_plus_zeroes_screened_columns() {
    let sem = generate_sem(8, 1.5, 21).unwrap();
    let cohort = sample_cohort(&sem, 20_000, 3).unwrap();
    let data = DataMatrix::from_values(cohort.data.clone());
    let out = run_rci(&data, &cohort.labels, &data, 0.2, RciMode::LocalPlus).unwrap();
    for j in 0..8 {
        if !out.extraction.order.contains(&j) {
            assert!(out.shapley.scores.column(j).iter().all(|&v| v == 0.0));
        }
    }
}

#[test]
fn empty_kept_set_yields_zero_scores_with_flag() {
    // labels independent of everything and alpha tiny: everything pruned
    let sem = generate_sem(4, 2.0, 31).unwrap();
    let cohort = sample_cohort(&sem, 5_000, 4).unwrap();
    let mut shuffled = cohort.labels.clone();
    // destroy the association by reversing the label vector half-way
    shuffled.rotate_left(2_500);
    let data = DataMatrix::from_values(cohort.data.clone());
    let out = run_rci(&data, &shuffled, &data, 1e-12, RciMode::LocalPlus).unwrap();
    assert!(out.kept_empty);
    assert!(out.shapley.scores.iter().all(|&v| v == 0.0));
}

#[test]
fn single_replication_matches_ground_truth_well() {
    let sem = generate_sem(10, 2.0, 424).unwrap();
    let cohort = sample_cohort(&sem, 10_000, 17).unwrap();
    let data = DataMatrix::from_values(cohort.data.clone());
    let out = run_rci(&data, &cohort.labels, &data, 0.2, RciMode::LocalPlus).unwrap();

    let truth_scores = true_shapley(&sem, &cohort.errors).unwrap();
    let truth = ground_truth_ranking(&truth_scores);
    let rankings: Vec<_> = (0..out.shapley.scores.nrows())
        .map(|k| {
            let row: Vec<f64> = out.shapley.scores.row(k).iter().copied().collect();
            rank_row(&row).unwrap()
        })
        .collect();

    let rbo = rbo_weighted(&rankings, &truth).unwrap();
    assert!(rbo > 0.9, "weighted RBO {rbo}");

    let mse = mse_scores(&out.shapley, &truth_scores).unwrap();
    assert!(mse < 0.01, "MSE {mse}");
}

#[test]
fn non_ancestor_columns_score_near_zero() {
    // sem with a guaranteed non-ancestor: beta only on the last variable,
    // isolated first variable
    let mut theta = Array2::zeros((4, 4));
    theta[[1, 2]] = 0.9;
    theta[[2, 3]] = 0.9;
    let sem = rci_core::sem::GroundTruthSem::from_parts(
        theta,
        ndarray::array![0.0, 0.0, 0.0, 1.5],
        0.0,
        vec![rci_core::sem::ErrorDist::UniformSym; 4],
        0,
    )
    .unwrap();
    let cohort = sample_cohort(&sem, 10_000, 5).unwrap();
    let data = DataMatrix::from_values(cohort.data.clone());
    let out = run_rci(&data, &cohort.labels, &data, 0.2, RciMode::Full).unwrap();

    let n = out.shapley.scores.nrows() as f64;
    let mean_abs_null: f64 =
        out.shapley.scores.column(0).iter().map(|v| v.abs()).sum::<f64>() / n;
    assert!(mean_abs_null < 0.05, "mean |score| on non-ancestor {mean_abs_null}");
}
