//! Adaptive (weighted) L1 fits used by the baselines: coordinate descent with
//! per-coefficient penalty weights from a stage-1 pilot, λ chosen by BIC over
//! a 50-point log grid spanning [1e-4, 1e+1]·λ_max.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sem::logistic;

pub(crate) const GRID_POINTS: usize = 50;
pub(crate) const GRID_LO: f64 = 1e-4;
pub(crate) const GRID_HI: f64 = 1e1;
const WEIGHT_FLOOR: f64 = 1e-10;
const CD_TOL: f64 = 1e-7;
const CD_MAX_PASSES: usize = 200;
const OUTER_MAX: usize = 30;
const WORK_WEIGHT_FLOOR: f64 = 1e-5;

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Penalty weights 1/|pilot| with a floor to keep the grid finite.
pub(crate) fn adaptive_weights(pilot: &[f64]) -> Vec<f64> {
    pilot
        .iter()
        .map(|&b| 1.0 / b.abs().max(WEIGHT_FLOOR))
        .collect()
}

/// Descending λ grid anchored at the smallest λ that zeroes every coefficient.
pub(crate) fn lambda_grid(lambda_max: f64) -> Vec<f64> {
    let hi = (GRID_HI * lambda_max).max(f64::MIN_POSITIVE);
    let lo = GRID_LO * lambda_max;
    let ratio = (lo / hi).powf(1.0 / (GRID_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(GRID_POINTS);
    let mut v = hi;
    for _ in 0..GRID_POINTS {
        grid.push(v);
        v *= ratio;
    }
    grid
}

pub(crate) struct LassoFit {
    pub coefficients: Vec<f64>,
    pub converged: bool,
}

/// Weighted-L1 logistic regression, λ selected by BIC.
///
/// Minimizes (1/n)·negative log-likelihood + λ Σ w_j |β_j| by proximal Newton:
/// an IRLS quadratic approximation solved by coordinate descent, warm-started
/// along the descending grid.
pub(crate) fn adaptive_lasso_logistic(
    x: &Array2<f64>,
    labels: &[u8],
    weights: &[f64],
) -> Result<LassoFit> {
    let (n, p) = x.dim();
    let nf = n as f64;

    // λ_max from the gradient at the intercept-only model
    let pbar = labels.iter().map(|&d| d as f64).sum::<f64>() / nf;
    let mut lambda_max = 0.0f64;
    for j in 0..p {
        let mut g = 0.0;
        for k in 0..n {
            g += x[[k, j]] * (labels[k] as f64 - pbar);
        }
        lambda_max = lambda_max.max((g / nf).abs() / weights[j]);
    }

    let mut beta = vec![0.0; p];
    let mut intercept = (pbar.max(1e-12) / (1.0 - pbar).max(1e-12)).ln();
    let mut best: Option<(f64, LassoFit)> = None;
    let mut all_converged = true;

    for &lambda in &lambda_grid(lambda_max) {
        let mut converged = false;
        for _outer in 0..OUTER_MAX {
            // quadratic approximation at the current iterate
            let mut eta = vec![0.0; n];
            let mut wk = vec![0.0; n];
            let mut z = vec![0.0; n];
            for k in 0..n {
                let mut v = intercept;
                for j in 0..p {
                    if beta[j] != 0.0 {
                        v += x[[k, j]] * beta[j];
                    }
                }
                eta[k] = v;
                let mu = logistic(v.clamp(-30.0, 30.0));
                let w = (mu * (1.0 - mu)).max(WORK_WEIGHT_FLOOR);
                wk[k] = w;
                z[k] = v + (labels[k] as f64 - mu) / w;
            }
            let sum_w: f64 = wk.iter().sum();

            // residual of the working response under the current iterate
            let mut r: Vec<f64> = (0..n).map(|k| z[k] - eta[k]).collect();
            let mut max_delta_inner: f64;
            let mut passes = 0;
            loop {
                max_delta_inner = 0.0;
                // intercept (unpenalized)
                let num: f64 = wk.iter().zip(&r).map(|(&w, &ri)| w * ri).sum();
                let d0 = num / sum_w;
                if d0 != 0.0 {
                    intercept += d0;
                    for ri in &mut r {
                        *ri -= d0;
                    }
                    max_delta_inner = max_delta_inner.max(d0.abs());
                }
                for j in 0..p {
                    let old = beta[j];
                    let mut rho = 0.0;
                    let mut nu = 0.0;
                    for k in 0..n {
                        let xij = x[[k, j]];
                        rho += wk[k] * xij * (r[k] + xij * old);
                        nu += wk[k] * xij * xij;
                    }
                    rho /= nf;
                    nu /= nf;
                    if nu <= 0.0 {
                        continue;
                    }
                    let new = soft_threshold(rho, lambda * weights[j]) / nu;
                    if new != old {
                        let d = new - old;
                        for k in 0..n {
                            r[k] -= d * x[[k, j]];
                        }
                        beta[j] = new;
                        max_delta_inner = max_delta_inner.max(d.abs());
                    }
                }
                passes += 1;
                if max_delta_inner < CD_TOL || passes >= CD_MAX_PASSES {
                    break;
                }
            }
            // outer step converged when the quadratic solve barely moved
            if max_delta_inner < CD_TOL && passes <= 2 {
                converged = true;
                break;
            }
        }
        if !converged {
            all_converged = false;
        }

        // BIC at this λ
        let mut loglik = 0.0;
        for k in 0..n {
            let mut v = intercept;
            for j in 0..p {
                if beta[j] != 0.0 {
                    v += x[[k, j]] * beta[j];
                }
            }
            // y·eta − log(1+e^eta), stable for either sign
            loglik += labels[k] as f64 * v - softplus(v);
        }
        let df = beta.iter().filter(|&&b| b != 0.0).count() + 1;
        let bic = -2.0 * loglik + df as f64 * nf.ln();
        if best.as_ref().map_or(true, |(b, _)| bic < *b) {
            best = Some((
                bic,
                LassoFit {
                    coefficients: beta.clone(),
                    converged,
                },
            ));
        }
    }

    let (_, mut fit) = best.ok_or_else(|| Error::InvalidParameter {
        name: "data",
        reason: "empty lambda grid".into(),
    })?;
    fit.converged = fit.converged && all_converged;
    Ok(fit)
}

fn softplus(v: f64) -> f64 {
    if v > 0.0 {
        v + (-v).exp().ln_1p()
    } else {
        v.exp().ln_1p()
    }
}

/// Weighted-L1 linear regression on centered inputs, λ selected by BIC.
pub(crate) fn adaptive_lasso_linear(
    x: &Array2<f64>,
    y: &[f64],
    weights: &[f64],
) -> Result<Vec<f64>> {
    let (n, p) = x.dim();
    let nf = n as f64;
    if p == 0 {
        return Ok(Vec::new());
    }

    let mut lambda_max = 0.0f64;
    for j in 0..p {
        let g: f64 = (0..n).map(|k| x[[k, j]] * y[k]).sum::<f64>() / nf;
        lambda_max = lambda_max.max(g.abs() / weights[j]);
    }

    let nu: Vec<f64> = (0..p)
        .map(|j| (0..n).map(|k| x[[k, j]] * x[[k, j]]).sum::<f64>() / nf)
        .collect();

    let mut beta = vec![0.0; p];
    let mut r: Vec<f64> = y.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;

    for &lambda in &lambda_grid(lambda_max) {
        for _pass in 0..CD_MAX_PASSES {
            let mut max_delta = 0.0f64;
            for j in 0..p {
                if nu[j] <= 0.0 {
                    continue;
                }
                let old = beta[j];
                let rho: f64 =
                    (0..n).map(|k| x[[k, j]] * (r[k] + x[[k, j]] * old)).sum::<f64>() / nf;
                let new = soft_threshold(rho, lambda * weights[j]) / nu[j];
                if new != old {
                    let d = new - old;
                    for k in 0..n {
                        r[k] -= d * x[[k, j]];
                    }
                    beta[j] = new;
                    max_delta = max_delta.max(d.abs());
                }
            }
            if max_delta < CD_TOL {
                break;
            }
        }
        let rss: f64 = r.iter().map(|&v| v * v).sum();
        let df = beta.iter().filter(|&&b| b != 0.0).count();
        let bic = nf * (rss / nf).max(1e-300).ln() + df as f64 * nf.ln();
        if best.as_ref().map_or(true, |(b, _)| bic < *b) {
            best = Some((bic, beta.clone()));
        }
    }

    Ok(best.expect("grid is nonempty").1)
}
