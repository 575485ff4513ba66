//! Thin wrappers over `statrs` special functions with the argument
//! conventions used throughout the crate.

use statrs::function::{erf, gamma as sg};

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Unregularized upper incomplete gamma Γ(s, x) for s > 0, x ≥ 0.
pub fn upper_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return sg::gamma(s);
    }
    sg::gamma_ur(s, x) * sg::gamma(s)
}

/// Unregularized lower incomplete gamma γ(s, x) for s > 0, x ≥ 0.
pub fn lower_gamma(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    sg::gamma_lr(s, x) * sg::gamma(s)
}

/// Regularized lower incomplete gamma P(s, x); the Ga(s, 1) cdf.
pub fn gamma_p(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    sg::gamma_lr(s, x)
}

/// Regularized upper incomplete gamma Q(s, x).
pub fn gamma_q(s: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    sg::gamma_ur(s, x)
}

/// Γ(−β, x) for β ∈ (0, 1) and x > 0, via Γ(1−β, x) = −β Γ(−β, x) + x^{−β} e^{−x}.
pub fn upper_gamma_negative(beta: f64, x: f64) -> f64 {
    debug_assert!(beta > 0.0 && beta < 1.0 && x > 0.0);
    (x.powf(-beta) * (-x).exp() - upper_gamma(1.0 - beta, x)) / beta
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
