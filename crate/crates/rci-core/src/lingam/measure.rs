//! Entropy-approximation-based pairwise independence measure.
//!
//! `C_ij = −H(X_i) − H(R_ji) + H(X_j) + H(R_ij)` is the log-likelihood ratio
//! of the two causal directions for a standardized pair, with `R_ij` the
//! residual of X_i regressed on X_j and H the moment-based differential
//! entropy approximation. C_ij > 0 is evidence that X_i is the exogenous one.

use crate::error::{Error, Result};
use crate::lingam::standardize::MIN_VARIANCE;

const K1: f64 = 79.047;
const K2: f64 = 7.4129;
/// E[log cosh Y] for standard normal Y.
const GAUSSIAN_LOGCOSH: f64 = 0.37457;

/// Upper bound of the entropy approximation, attained at the Gaussian:
/// `(1 + log 2π)/2 ≈ 1.41894`.
pub fn entropy_max() -> f64 {
    (1.0 + (2.0 * std::f64::consts::PI).ln()) / 2.0
}

/// log cosh y without overflow for large |y|.
#[inline]
fn log_cosh(y: f64) -> f64 {
    let a = y.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}

/// Both empirical moments of the approximation in one pass, with an optional
/// rescaling `y = x * inv_scale` folded in.
#[inline]
fn entropy_moments(values: &[f64], inv_scale: f64) -> (f64, f64) {
    let mut m_logcosh = 0.0;
    let mut m_odd = 0.0;
    for &x in values {
        let y = x * inv_scale;
        m_logcosh += log_cosh(y);
        m_odd += y * (-y * y / 2.0).exp();
    }
    let n = values.len() as f64;
    (m_logcosh / n, m_odd / n)
}

fn entropy_from_moments(m_logcosh: f64, m_odd: f64) -> f64 {
    let d1 = m_logcosh - GAUSSIAN_LOGCOSH;
    entropy_max() - K1 * d1 * d1 - K2 * m_odd * m_odd
}

/// Approximate differential entropy of a standardized sample.
pub fn approx_entropy(y: &[f64]) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: "empty vector".into(),
        });
    }
    let (m1, m2) = entropy_moments(y, 1.0);
    Ok(entropy_from_moments(m1, m2))
}

/// Least-squares residual of `x_i` on `x_j`, computed on mean-centered inputs.
pub fn residualize(x_i: &[f64], x_j: &[f64]) -> Result<Vec<f64>> {
    if x_i.len() != x_j.len() {
        return Err(Error::DimensionMismatch {
            context: "residualize inputs",
            expected: x_i.len(),
            actual: x_j.len(),
        });
    }
    let n = x_i.len() as f64;
    let mean_i = x_i.iter().sum::<f64>() / n;
    let mean_j = x_j.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_j = 0.0;
    for (&a, &b) in x_i.iter().zip(x_j) {
        let cb = b - mean_j;
        cov += (a - mean_i) * cb;
        var_j += cb * cb;
    }
    cov /= n;
    var_j /= n;
    if var_j < MIN_VARIANCE {
        return Err(Error::DegenerateInput(
            "regressor has (near-)zero variance".into(),
        ));
    }
    let slope = cov / var_j;
    Ok(x_i
        .iter()
        .zip(x_j)
        .map(|(&a, &b)| (a - mean_i) - slope * (b - mean_j))
        .collect())
}

/// Entropy of the re-standardized residual of `x_i` on `x_j`.
///
/// Inputs are assumed centered (they are inside the search loops); the
/// residual is centered by construction and only needs rescaling to unit
/// variance before the entropy moments are taken.
pub(crate) fn residual_entropy(x_i: &[f64], x_j: &[f64], scratch: &mut Vec<f64>) -> Result<f64> {
    let n = x_i.len() as f64;
    let mut dot_ij = 0.0;
    let mut dot_jj = 0.0;
    for (&a, &b) in x_i.iter().zip(x_j) {
        dot_ij += a * b;
        dot_jj += b * b;
    }
    if dot_jj / n < MIN_VARIANCE {
        return Err(Error::DegenerateInput(
            "regressor has (near-)zero variance".into(),
        ));
    }
    let slope = dot_ij / dot_jj;
    scratch.clear();
    scratch.reserve(x_i.len());
    let mut sumsq = 0.0;
    for (&a, &b) in x_i.iter().zip(x_j) {
        let r = a - slope * b;
        sumsq += r * r;
        scratch.push(r);
    }
    let var = sumsq / n;
    if var < MIN_VARIANCE {
        return Err(Error::DegenerateInput(
            "residual has (near-)zero variance (collinear pair)".into(),
        ));
    }
    let (m1, m2) = entropy_moments(scratch, 1.0 / var.sqrt());
    Ok(entropy_from_moments(m1, m2))
}

/// Pairwise measure `C_ij` for standardized inputs; antisymmetric by
/// construction. Residuals are re-standardized before entropy evaluation.
pub fn pairwise_measure(x_i: &[f64], x_j: &[f64]) -> Result<f64> {
    if x_i.len() != x_j.len() {
        return Err(Error::DimensionMismatch {
            context: "pairwise_measure inputs",
            expected: x_i.len(),
            actual: x_j.len(),
        });
    }
    let h_i = approx_entropy(x_i)?;
    let h_j = approx_entropy(x_j)?;
    let mut scratch = Vec::new();
    pairwise_measure_cached(x_i, x_j, h_i, h_j, &mut scratch)
}

/// `C_ij` with the column entropies precomputed (search loops cache them).
pub(crate) fn pairwise_measure_cached(
    x_i: &[f64],
    x_j: &[f64],
    h_i: f64,
    h_j: f64,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    let h_res_ij = residual_entropy(x_i, x_j, scratch)?; // residual of x_i on x_j
    let h_res_ji = residual_entropy(x_j, x_i, scratch)?; // residual of x_j on x_i
    Ok(-h_i - h_res_ji + h_j + h_res_ij)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn standardized(mut v: Vec<f64>) -> Vec<f64> {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let inv = 1.0 / var.sqrt();
        for x in &mut v {
            *x = (*x - mean) * inv;
        }
        v
    }

    #[test]
    fn gaussian_entropy_attains_the_maximum() {
        let mut rng = stream(42, Stream::Errors, 0);
        let y: Vec<f64> = (0..1_000_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let y = standardized(y);
        let h = approx_entropy(&y).unwrap();
        assert_abs_diff_eq!(h, 1.41894, epsilon = 1e-3);
        assert!(h <= entropy_max());
    }

    #[test]
    fn uniform_entropy_is_strictly_below_the_maximum() {
        let mut rng = stream(43, Stream::Errors, 0);
        let y: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let y = standardized(y);
        let h = approx_entropy(&y).unwrap();
        assert!(h < entropy_max() - 1e-3, "H = {h}");

        // quadrature oracle: E log cosh Y for Y ~ U(-sqrt3, sqrt3) via Simpson
        let s3 = 3.0f64.sqrt();
        let m = 20_000;
        let hstep = 2.0 * s3 / m as f64;
        let f = |x: f64| x.abs() - std::f64::consts::LN_2 + (-2.0 * x.abs()).exp().ln_1p();
        let mut integral = f(-s3) + f(s3);
        for k in 1..m {
            let x = -s3 + k as f64 * hstep;
            integral += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        integral *= hstep / 3.0;
        let expected_logcosh = integral / (2.0 * s3);
        let d = expected_logcosh - GAUSSIAN_LOGCOSH;
        let expected_h = entropy_max() - K1 * d * d; // odd moment vanishes by symmetry
        assert_abs_diff_eq!(h, expected_h, epsilon = 2e-3);
    }

    #[test]
    fn entropy_never_exceeds_the_gaussian_bound() {
        let mut rng = stream(44, Stream::Errors, 0);
        for _ in 0..200 {
            let y: Vec<f64> = (0..500).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let y = standardized(y);
            assert!(approx_entropy(&y).unwrap() <= entropy_max());
        }
    }

    #[test]
    fn empty_vector_is_a_parameter_error() {
        assert!(approx_entropy(&[]).is_err());
    }

    #[test]
    fn residual_of_scaled_copy_is_zero() {
        let x_j = vec![1.0, -2.0, 0.5, 0.5];
        let x_i: Vec<f64> = x_j.iter().map(|&v| 3.0 * v).collect();
        let r = residualize(&x_i, &x_j).unwrap();
        for v in r {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn residual_hand_example() {
        // centered x_i equals -x_j, slope -1, residual identically zero
        let r = residualize(&[1.0, 2.0, 3.0], &[1.0, 0.0, -1.0]).unwrap();
        for v in r {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn residual_is_orthogonal_to_regressor() {
        let mut rng = stream(45, Stream::Errors, 0);
        let x_j: Vec<f64> = (0..400).map(|_| rng.random::<f64>() - 0.5).collect();
        let x_i: Vec<f64> = x_j
            .iter()
            .map(|&v| 0.7 * v + rng.random::<f64>() - 0.5)
            .collect();
        let r = residualize(&x_i, &x_j).unwrap();
        let n = r.len() as f64;
        let mean_j = x_j.iter().sum::<f64>() / n;
        let cov = r
            .iter()
            .zip(&x_j)
            .map(|(&a, &b)| a * (b - mean_j))
            .sum::<f64>()
            / n;
        assert_abs_diff_eq!(cov, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn measure_is_antisymmetric() {
        let mut rng = stream(46, Stream::Errors, 0);
        for _ in 0..20 {
            let a: Vec<f64> = (0..300).map(|_| rng.random::<f64>() - 0.5).collect();
            let b: Vec<f64> = a
                .iter()
                .map(|&v| 0.4 * v + (rng.random::<f64>() - 0.5))
                .collect();
            let a = standardized(a);
            let b = standardized(b);
            let c_ab = pairwise_measure(&a, &b).unwrap();
            let c_ba = pairwise_measure(&b, &a).unwrap();
            assert_abs_diff_eq!(c_ab + c_ba, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn exogenous_side_gets_positive_measure() {
        // X1 -> X2 with uniform errors and coefficient 0.8: C_12 > 0
        let mut rng = stream(47, Stream::Errors, 0);
        let n = 100_000;
        let e1: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let e2: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let x1 = e1.clone();
        let x2: Vec<f64> = x1.iter().zip(&e2).map(|(&a, &b)| 0.8 * a + b).collect();
        let x1 = standardized(x1);
        let x2 = standardized(x2);
        let c12 = pairwise_measure(&x1, &x2).unwrap();
        assert!(c12 > 0.0, "C_12 = {c12}");
    }

    #[test]
    fn identical_columns_are_degenerate() {
        let x = standardized(vec![1.0, 2.0, 3.0, -1.0, 0.5]);
        assert!(matches!(
            pairwise_measure(&x, &x),
            Err(crate::error::Error::DegenerateInput(_))
        ));
    }
}
