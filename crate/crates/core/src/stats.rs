//! Sample statistics for Monte Carlo variance estimates.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceSummary {
    pub samples: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of `variance` from the fourth-moment estimator.
    pub variance_se: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// `SE² = (μ₄ - σ⁴ (S-3)/(S-1)) / S`, with `μ₄` the central fourth sample moment.
pub fn variance_standard_error(xs: &[f64]) -> f64 {
    let s = xs.len() as f64;
    let m = mean(xs);
    let mu4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / s;
    let var = sample_variance(xs);
    ((mu4 - var * var * (s - 3.0) / (s - 1.0)) / s).max(0.0).sqrt()
}

pub fn summarize(xs: &[f64]) -> Result<VarianceSummary> {
    if xs.len() < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite sample".into()));
    }
    Ok(VarianceSummary {
        samples: xs.len(),
        mean: mean(xs),
        variance: sample_variance(xs),
        variance_se: variance_standard_error(xs),
    })
}

/// Standard error of the mean.
pub fn mean_standard_error(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Bootstrap standard deviation of the sample variance.
pub fn bootstrap_variance_se<R: RngCore>(xs: &[f64], resamples: usize, rng: &mut R) -> Result<f64> {
    if xs.len() < 2 || resamples < 2 {
        return Err(Error::Domain("bootstrap needs at least two samples and two resamples".into()));
    }
    let n = xs.len();
    let mut buf = vec![0.0; n];
    let estimates: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = xs[rng.random_range(0..n)];
            }
            sample_variance(&buf)
        })
        .collect();
    Ok(sample_variance(&estimates).sqrt())
}

/// `|observed - expected| / se`, infinite when `se` is zero and the values differ.
pub fn z_score(observed: f64, expected: f64, se: f64) -> f64 {
    let d = (observed - expected).abs();
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}
