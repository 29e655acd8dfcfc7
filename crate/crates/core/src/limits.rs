//! Limit laws: normal and bivariate normal distribution functions, the
//! Gumbel law and its normalizing constants, and the block-size schedule.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::quad;

/// `Φ(x) = erfc(−x/√2)/2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `P(X ≤ x, Y ≤ y)` for a standard bivariate normal with correlation `rho`.
///
/// Integrates `φ(z) Φ((y − ρz)/√(1−ρ²))` over `z ≤ x`.
pub fn bvn_cdf(x: f64, y: f64, rho: f64) -> f64 {
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return std_normal_cdf(y);
    }
    if y == f64::INFINITY {
        return std_normal_cdf(x);
    }
    if rho >= 1.0 {
        return std_normal_cdf(x.min(y));
    }
    if rho <= -1.0 {
        return (std_normal_cdf(x) + std_normal_cdf(y) - 1.0).max(0.0);
    }
    if rho == 0.0 {
        return std_normal_cdf(x) * std_normal_cdf(y);
    }
    let s = (1.0 - rho * rho).sqrt();
    let f = |z: f64| std_normal_pdf(z) * std_normal_cdf((y - rho * z) / s);
    let lo = -40.0;
    if x <= lo {
        return 0.0;
    }
    quad::adaptive(&f, lo, x.min(40.0), 1e-14)
}

pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// `α_k = √(2 ln k) − (ln ln k + ln 4π)/(2√(2 ln k))`.
pub fn gumbel_alpha(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("gumbel_alpha needs k >= 2, got {k}")));
    }
    let l = (k as f64).ln();
    let r = (2.0 * l).sqrt();
    Ok(r - (l.ln() + (4.0 * PI).ln()) / (2.0 * r))
}

/// `P(α(max_{i≤k} N_i − α) ≤ x)` for iid standard normals.
pub fn gaussian_max_cdf(k: usize, alpha: f64, x: f64) -> f64 {
    std_normal_cdf(alpha + x / alpha).powi(k as i32)
}

/// `max(2, ⌊n/(ln n)²⌋)`.
pub fn schedule_k(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::Domain(format!("schedule_k needs n >= 3, got {n}")));
    }
    let l = (n as f64).ln();
    Ok(((n as f64 / (l * l)).floor() as usize).max(2))
}

/// `k ln k ≥ n`.
pub fn violates_schedule(k: usize, n: usize) -> bool {
    (k as f64) * (k as f64).ln() >= n as f64
}
