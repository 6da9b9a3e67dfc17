//! Bernoulli relative entropy and the KL-UCB style confidence bounds built on it.

use crate::error::{Error, Result};

/// Bisection steps; `2^-30 < 1e-9` so the bracket is below the target tolerance.
const BISECTION_STEPS: u32 = 30;

/// Bernoulli relative entropy `D(mu, gamma)` with `0 ln 0 = 0`.
///
/// `gamma` must lie strictly inside (0, 1).
pub fn kl_bernoulli(mu: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::InvalidArgument(format!("mu = {mu} outside [0, 1]")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} outside (0, 1)"
        )));
    }
    Ok(kl_unchecked(mu, gamma))
}

#[inline]
fn kl_unchecked(mu: f64, gamma: f64) -> f64 {
    let mut d = 0.0;
    if mu > 0.0 {
        d += mu * (mu / gamma).ln();
    }
    if mu < 1.0 {
        d += (1.0 - mu) * ((1.0 - mu) / (1.0 - gamma)).ln();
    }
    d.max(0.0)
}

/// Smallest `gamma <= mu_hat` with `n_samples * D(mu_hat, gamma) <= ln t`.
///
/// Returns `mu_hat` when `t = 1`, and 0 when there are no samples or `mu_hat = 0`.
pub fn lower_confidence(mu_hat: f64, n_samples: u64, t: u64) -> f64 {
    let mu = mu_hat.clamp(0.0, 1.0);
    if n_samples == 0 || mu == 0.0 {
        return 0.0;
    }
    if t <= 1 {
        return mu;
    }
    let budget = (t as f64).ln();
    let n = n_samples as f64;
    // lo is always infeasible (or 0), hi always feasible
    let (mut lo, mut hi) = (0.0, mu);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if n * kl_unchecked(mu, mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Largest `gamma >= mu_hat` with `n_samples * D(mu_hat, gamma) <= ln t`.
///
/// Returns `mu_hat` when `t = 1`, and 1 when there are no samples or `mu_hat = 1`.
pub fn upper_confidence(mu_hat: f64, n_samples: u64, t: u64) -> f64 {
    let mu = mu_hat.clamp(0.0, 1.0);
    if n_samples == 0 || mu == 1.0 {
        return 1.0;
    }
    if t <= 1 {
        return mu;
    }
    let budget = (t as f64).ln();
    let n = n_samples as f64;
    let (mut lo, mut hi) = (mu, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if n * kl_unchecked(mu, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
