//! Independence screening of a continuous column against the binary label.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub(crate) struct WelchStats {
    pub t: f64,
    pub df: f64,
    /// True when both class variances vanish (t undefined).
    pub degenerate: bool,
    pub mean_diff: f64,
}

/// Welch two-sample statistics of `x` split by binary `d`. Sample variances
/// (divisor n−1) as the t reference distribution requires.
pub(crate) fn welch_stats(x: &[f64], d: &[u8]) -> Result<WelchStats> {
    if x.len() != d.len() {
        return Err(Error::DimensionMismatch {
            context: "independence test inputs",
            expected: x.len(),
            actual: d.len(),
        });
    }
    let (mut n1, mut n0) = (0usize, 0usize);
    let (mut s1, mut s0) = (0.0, 0.0);
    for (&v, &lab) in x.iter().zip(d) {
        if lab == 1 {
            n1 += 1;
            s1 += v;
        } else {
            n0 += 1;
            s0 += v;
        }
    }
    if n1 < 2 || n0 < 2 {
        return Err(Error::InvalidParameter {
            name: "labels",
            reason: "each class needs at least 2 samples".into(),
        });
    }
    let m1 = s1 / n1 as f64;
    let m0 = s0 / n0 as f64;
    let (mut v1, mut v0) = (0.0, 0.0);
    for (&v, &lab) in x.iter().zip(d) {
        if lab == 1 {
            v1 += (v - m1) * (v - m1);
        } else {
            v0 += (v - m0) * (v - m0);
        }
    }
    v1 /= (n1 - 1) as f64;
    v0 /= (n0 - 1) as f64;

    let a1 = v1 / n1 as f64;
    let a0 = v0 / n0 as f64;
    let se2 = a1 + a0;
    let mean_diff = m1 - m0;
    if se2 <= 0.0 {
        return Ok(WelchStats {
            t: 0.0,
            df: 1.0,
            degenerate: true,
            mean_diff,
        });
    }
    let df = se2 * se2 / (a1 * a1 / (n1 - 1) as f64 + a0 * a0 / (n0 - 1) as f64);
    Ok(WelchStats {
        t: mean_diff / se2.sqrt(),
        df,
        degenerate: false,
        mean_diff,
    })
}

pub(crate) fn two_sided_p(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

/// Two-sided p-value of the point-biserial correlation t-test between `x` and
/// the binary label `d`, with Welch-style variance handling.
///
/// A zero-variance column yields p = 1 when the class means agree (no
/// evidence of dependence) and p = 0 when they differ.
pub fn independence_pvalue(x: &[f64], d: &[u8]) -> Result<f64> {
    if d.iter().all(|&v| v == 1) || d.iter().all(|&v| v == 0) {
        return Err(Error::SingleClassLabels);
    }
    let stats = welch_stats(x, d)?;
    if stats.degenerate {
        return Ok(if stats.mean_diff.abs() < 1e-300 { 1.0 } else { 0.0 });
    }
    Ok(two_sided_p(stats.t, stats.df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use rand::Rng;

    #[test]
    fn single_class_is_an_error() {
        let x = vec![1.0, 2.0, 3.0];
        assert!(independence_pvalue(&x, &[1, 1, 1]).is_err());
        assert!(independence_pvalue(&x, &[0, 0, 0]).is_err());
    }

    #[test]
    fn strong_dependence_gives_tiny_p() {
        let mut rng = stream(1, Stream::Errors, 0);
        let n = 10_000;
        let d: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect();
        let x: Vec<f64> = d
            .iter()
            .map(|&v| v as f64 + 0.01 * (rng.random::<f64>() - 0.5))
            .collect();
        let p = independence_pvalue(&x, &d).unwrap();
        assert!(p < 1e-6, "p = {p}");
    }

    #[test]
    fn null_pvalues_are_roughly_uniform() {
        // Kolmogorov–Smirnov distance of the p-value sample against U(0,1)
        let reps = 1_000;
        let n = 10_000;
        let mut pvalues = Vec::with_capacity(reps);
        for r in 0..reps {
            let mut rng = stream(2, Stream::Errors, r as u64);
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let d: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect();
            pvalues.push(independence_pvalue(&x, &d).unwrap());
        }
        pvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &p) in pvalues.iter().enumerate() {
            let lo = i as f64 / reps as f64;
            let hi = (i + 1) as f64 / reps as f64;
            ks = ks.max((p - lo).abs()).max((hi - p).abs());
        }
        assert!(ks < 0.05, "KS = {ks}");
    }

    #[test]
    fn constant_column_is_independent() {
        let x = vec![2.5; 100];
        let d: Vec<u8> = (0..100).map(|k| u8::from(k % 2 == 0)).collect();
        assert_eq!(independence_pvalue(&x, &d).unwrap(), 1.0);
    }
}
