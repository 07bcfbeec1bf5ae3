//! Distribution tails used by the uniformity tests.

use statrs::function::gamma::checked_gamma_ur;

use crate::error::{Error, Result};

/// Regularized upper incomplete gamma function `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn incomplete_gamma_q(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || a.is_infinite() {
        return Err(Error::Input(format!("incomplete gamma needs a > 0, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Input(format!("incomplete gamma needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    checked_gamma_ur(a, x)
        .map(|q| q.clamp(0.0, 1.0))
        .map_err(|e| Error::Numeric(format!("incomplete gamma Q({a}, {x}): {e}")))
}

/// Upper tail `P(X >= stat)` of a chi-squared variable with `dof` degrees of freedom.
pub fn chi2_sf(stat: f64, dof: f64) -> Result<f64> {
    incomplete_gamma_q(dof / 2.0, (stat / 2.0).max(0.0))
}

/// Result of a one-sample Kolmogorov-Smirnov test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS test of `data` against a continuous `cdf`.
pub fn ks_test(data: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    KsResult { statistic, p_value: kolmogorov_sf(statistic, n), n }
}

/// Asymptotic Kolmogorov tail with the small-sample correction
/// `lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * D`.
pub fn kolmogorov_sf(d: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
