//! Random ground-truth models, cohort sampling and true per-sample scores.
//!
//! A generated model is a linear SEM `X = Xθ + E` with strictly upper
//! triangular θ, mutually independent non-Gaussian errors, and a binary label
//! drawn from `logistic(Xβ + α)`. Because D is terminal, the log-odds in terms
//! of the errors are `E·δ + α` with `δ = (I−θ)^{-1}β`, which is what
//! [`true_shapley`] evaluates.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StudentT, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rci::ShapleyMatrix;
use crate::rng::{stream, Stream};

/// Smallest magnitude of a generated nonzero coefficient.
pub const COEF_MIN: f64 = 0.25;
/// Largest magnitude of a generated nonzero coefficient.
pub const COEF_MAX: f64 = 1.0;

/// Error-term distribution tags. All are non-Gaussian and shifted to exact
/// zero population mean; the natural variances (5/3, 6, 1/3) are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDist {
    /// Student t with five degrees of freedom.
    StudentT5,
    /// Chi-square with three degrees of freedom, shifted by −3.
    ChiSq3,
    /// Uniform on [−1, 1].
    UniformSym,
}

impl ErrorDist {
    /// Population variance after centering.
    pub fn variance(self) -> f64 {
        match self {
            ErrorDist::StudentT5 => 5.0 / 3.0,
            ErrorDist::ChiSq3 => 6.0,
            ErrorDist::UniformSym => 1.0 / 3.0,
        }
    }

    fn sample_centered(self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        match self {
            ErrorDist::StudentT5 => {
                let d = StudentT::new(5.0).unwrap();
                (0..n).map(|_| d.sample(rng)).collect()
            }
            ErrorDist::ChiSq3 => {
                let d = ChiSquared::new(3.0).unwrap();
                (0..n).map(|_| d.sample(rng) - 3.0).collect()
            }
            ErrorDist::UniformSym => {
                let d = Uniform::new_inclusive(-1.0, 1.0).unwrap();
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }
}

/// The generating model: edge coefficients, label coefficients, logistic
/// intercept and per-variable error distributions.
#[derive(Debug, Clone)]
pub struct GroundTruthSem {
    /// p×p edge coefficients, strictly upper triangular.
    pub theta: Array2<f64>,
    /// Length-p label coefficients; nonzero only on parents of D.
    pub beta: Array1<f64>,
    /// Logistic intercept.
    pub alpha: f64,
    /// Per-variable error-distribution tags.
    pub error_dists: Vec<ErrorDist>,
    /// Seed the model was generated from (kept for provenance).
    pub seed: u64,
}

/// A sampled dataset: realized errors, observed data and binary labels.
#[derive(Debug, Clone)]
pub struct SampledCohort {
    /// n×p realized centered errors.
    pub errors: Array2<f64>,
    /// n×p observed data, `data = errors · (I−θ)^{-1}` row-wise.
    pub data: Array2<f64>,
    /// Length-n binary labels.
    pub labels: Vec<u8>,
}

impl GroundTruthSem {
    /// Builds a model from explicit parts, checking strict upper-triangularity.
    ///
    /// Unlike [`generate_sem`], a zero β is accepted (useful for null-model
    /// tests) and coefficient magnitudes are not constrained.
    pub fn from_parts(
        theta: Array2<f64>,
        beta: Array1<f64>,
        alpha: f64,
        error_dists: Vec<ErrorDist>,
        seed: u64,
    ) -> Result<Self> {
        let p = theta.nrows();
        if theta.ncols() != p {
            return Err(Error::DimensionMismatch {
                context: "theta must be square",
                expected: p,
                actual: theta.ncols(),
            });
        }
        if beta.len() != p {
            return Err(Error::DimensionMismatch {
                context: "beta length",
                expected: p,
                actual: beta.len(),
            });
        }
        if error_dists.len() != p {
            return Err(Error::DimensionMismatch {
                context: "error_dists length",
                expected: p,
                actual: error_dists.len(),
            });
        }
        for i in 0..p {
            for j in 0..=i {
                if theta[[i, j]] != 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "theta",
                        reason: format!("entry ({i},{j}) violates strict upper-triangularity"),
                    });
                }
            }
        }
        Ok(Self {
            theta,
            beta,
            alpha,
            error_dists,
            seed,
        })
    }

    /// Number of observed variables.
    pub fn p(&self) -> usize {
        self.theta.nrows()
    }

    /// True log-odds coefficients on the errors: `δ = (I−θ)^{-1}β`, solved by
    /// back-substitution through the unit upper triangular system.
    pub fn delta(&self) -> Array1<f64> {
        let p = self.p();
        let mut delta = Array1::zeros(p);
        for i in (0..p).rev() {
            let mut v = self.beta[i];
            for j in i + 1..p {
                v += self.theta[[i, j]] * delta[j];
            }
            delta[i] = v;
        }
        delta
    }

    /// Whether each variable's error is an ancestor of the label (δ_i ≠ 0).
    pub fn label_ancestors(&self) -> Vec<bool> {
        self.delta().iter().map(|&d| d != 0.0).collect()
    }

    /// True topological-order check: does `order` respect every edge of θ?
    pub fn is_topological(&self, order: &[usize]) -> bool {
        let p = self.p();
        if order.len() != p {
            return false;
        }
        let mut pos = vec![usize::MAX; p];
        for (t, &v) in order.iter().enumerate() {
            if v >= p || pos[v] != usize::MAX {
                return false;
            }
            pos[v] = t;
        }
        for i in 0..p {
            for j in i + 1..p {
                if self.theta[[i, j]] != 0.0 && pos[i] > pos[j] {
                    return false;
                }
            }
        }
        true
    }
}

fn draw_coefficient(rng: &mut ChaCha8Rng) -> f64 {
    let magnitude = COEF_MIN + (COEF_MAX - COEF_MIN) * rng.random::<f64>();
    if rng.random::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Generates a random ground-truth model.
///
/// Each strict-upper-triangle entry of θ is nonzero independently with
/// probability `expected_neighbors/(p−1)`, with nonzero values uniform on
/// ±[0.25, 1]. β follows the same scheme (the label acting as an extra
/// terminal vertex) and is redrawn until at least one entry is nonzero;
/// α is 0; error distributions are chosen uniformly among the three tags.
pub fn generate_sem(p: usize, expected_neighbors: f64, seed: u64) -> Result<GroundTruthSem> {
    if p < 2 {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("need p >= 2, got {p}"),
        });
    }
    if !(expected_neighbors > 0.0) || expected_neighbors > (p - 1) as f64 {
        return Err(Error::InvalidParameter {
            name: "expected_neighbors",
            reason: format!("need 0 < expected_neighbors <= p-1, got {expected_neighbors}"),
        });
    }
    let prob = expected_neighbors / (p - 1) as f64;

    let mut rng = stream(seed, Stream::Theta, 0);
    let mut theta = Array2::zeros((p, p));
    for i in 0..p {
        for j in i + 1..p {
            if rng.random::<f64>() < prob {
                theta[[i, j]] = draw_coefficient(&mut rng);
            }
        }
    }

    let mut rng = stream(seed, Stream::Beta, 0);
    let mut beta = Array1::zeros(p);
    loop {
        for i in 0..p {
            beta[i] = if rng.random::<f64>() < prob {
                draw_coefficient(&mut rng)
            } else {
                0.0
            };
        }
        if beta.iter().any(|&b| b != 0.0) {
            break;
        }
    }

    let mut rng = stream(seed, Stream::Dists, 0);
    let error_dists = (0..p)
        .map(|_| match rng.random_range(0..3u8) {
            0 => ErrorDist::StudentT5,
            1 => ErrorDist::ChiSq3,
            _ => ErrorDist::UniformSym,
        })
        .collect();

    Ok(GroundTruthSem {
        theta,
        beta,
        alpha: 0.0,
        error_dists,
        seed,
    })
}

/// Numerically stable logistic function.
pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Samples a cohort of `n` rows from the model.
///
/// Error columns are drawn i.i.d. from their tagged distribution and shifted
/// to exact zero population mean; data follows by forward substitution through
/// the triangular system (index order is already topological); labels are
/// Bernoulli draws of `logistic(xβ + α)`.
pub fn sample_cohort(sem: &GroundTruthSem, n: usize, seed: u64) -> Result<SampledCohort> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need n >= 1".into(),
        });
    }
    let p = sem.p();

    let mut errors = Array2::zeros((n, p));
    for i in 0..p {
        let mut rng = stream(seed, Stream::Errors, i as u64);
        let col = sem.error_dists[i].sample_centered(&mut rng, n);
        for (k, v) in col.into_iter().enumerate() {
            errors[[k, i]] = v;
        }
    }

    let mut data = Array2::zeros((n, p));
    for k in 0..n {
        for j in 0..p {
            let mut v = errors[[k, j]];
            for i in 0..j {
                let c = sem.theta[[i, j]];
                if c != 0.0 {
                    v += data[[k, i]] * c;
                }
            }
            data[[k, j]] = v;
        }
    }

    let mut rng = stream(seed, Stream::Labels, 0);
    let labels = (0..n)
        .map(|k| {
            let logit = data.row(k).dot(&sem.beta) + sem.alpha;
            u8::from(rng.random::<f64>() < logistic(logit))
        })
        .collect();

    Ok(SampledCohort {
        errors,
        data,
        labels,
    })
}

/// True per-sample scores `s_i^k = e_i^k · δ_i` from realized errors.
pub fn true_shapley(sem: &GroundTruthSem, errors: &Array2<f64>) -> Result<ShapleyMatrix> {
    let p = sem.p();
    if errors.ncols() != p {
        return Err(Error::DimensionMismatch {
            context: "error matrix columns",
            expected: p,
            actual: errors.ncols(),
        });
    }
    let delta = sem.delta();
    let n = errors.nrows();
    let mut scores = Array2::zeros((n, p));
    for k in 0..n {
        for i in 0..p {
            scores[[k, i]] = errors[[k, i]] * delta[i];
        }
    }
    Ok(ShapleyMatrix {
        scores,
        sample_ids: (0..n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_sem(1, 1.0, 0).is_err());
        assert!(generate_sem(10, 0.0, 0).is_err());
        assert!(generate_sem(10, 9.5, 0).is_err());
        assert!(generate_sem(10, 2.0, 0).is_ok());
    }

    #[test]
    fn p2_single_candidate_edge_always_present() {
        // with p=2 and E(N)=1 the Bernoulli probability is exactly 1
        for seed in 0..50 {
            let sem = generate_sem(2, 1.0, seed).unwrap();
            assert_ne!(sem.theta[[0, 1]], 0.0);
        }
    }

    #[test]
    fn generated_models_satisfy_structural_invariants() {
        for seed in 0..200 {
            let sem = generate_sem(10, 2.0, seed).unwrap();
            for i in 0..10 {
                for j in 0..10 {
                    let v = sem.theta[[i, j]];
                    if i >= j {
                        assert_eq!(v, 0.0, "lower triangle must be zero");
                    } else if v != 0.0 {
                        assert!((COEF_MIN..=COEF_MAX).contains(&v.abs()));
                    }
                }
            }
            assert!(sem.beta.iter().any(|&b| b != 0.0));
            for &b in sem.beta.iter() {
                if b != 0.0 {
                    assert!((COEF_MIN..=COEF_MAX).contains(&b.abs()));
                }
            }
            assert_eq!(sem.alpha, 0.0);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_sem(10, 2.0, 99).unwrap();
        let b = generate_sem(10, 2.0, 99).unwrap();
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.error_dists, b.error_dists);
    }

    #[test]
    fn no_edges_means_data_equals_errors() {
        let sem = GroundTruthSem::from_parts(
            Array2::zeros((3, 3)),
            array![1.0, 0.0, 0.0],
            0.0,
            vec![ErrorDist::UniformSym; 3],
            0,
        )
        .unwrap();
        let cohort = sample_cohort(&sem, 100, 5).unwrap();
        assert_eq!(cohort.data, cohort.errors);
    }

    #[test]
    fn data_inverts_back_to_errors() {
        let sem = generate_sem(8, 2.0, 3).unwrap();
        let cohort = sample_cohort(&sem, 500, 11).unwrap();
        // X(I−θ) = E, entrywise within accumulated rounding
        let reconstructed = &cohort.data - &cohort.data.dot(&sem.theta);
        for (a, b) in reconstructed.iter().zip(cohort.errors.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn delta_solves_triangular_system() {
        let theta = array![[0.0, 0.8, 0.0], [0.0, 0.0, 0.5], [0.0, 0.0, 0.0]];
        let sem = GroundTruthSem::from_parts(
            theta,
            array![0.0, 0.0, 1.0],
            0.0,
            vec![ErrorDist::UniformSym; 3],
            0,
        )
        .unwrap();
        // chain: delta = (0.4, 0.5, 1.0)
        let d = sem.delta();
        assert_abs_diff_eq!(d[0], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn true_shapley_is_identity_scaling_without_edges() {
        let sem = GroundTruthSem::from_parts(
            Array2::zeros((3, 3)),
            array![1.0, 0.0, 0.0],
            0.0,
            vec![ErrorDist::StudentT5; 3],
            0,
        )
        .unwrap();
        let cohort = sample_cohort(&sem, 50, 2).unwrap();
        let s = true_shapley(&sem, &cohort.errors).unwrap();
        for k in 0..50 {
            assert_eq!(s.scores[[k, 0]], cohort.errors[[k, 0]]);
            assert_eq!(s.scores[[k, 1]], 0.0);
            assert_eq!(s.scores[[k, 2]], 0.0);
        }
    }

    #[test]
    fn topological_check_detects_violations() {
        let theta = array![[0.0, 0.8], [0.0, 0.0]];
        let sem = GroundTruthSem::from_parts(
            theta,
            array![0.0, 1.0],
            0.0,
            vec![ErrorDist::UniformSym; 2],
            0,
        )
        .unwrap();
        assert!(sem.is_topological(&[0, 1]));
        assert!(!sem.is_topological(&[1, 0]));
        assert!(!sem.is_topological(&[0, 0]));
    }
}
