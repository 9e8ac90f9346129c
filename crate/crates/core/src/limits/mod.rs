//! Large-`N` behaviour of the expected density.
//!
//! As `N` grows the `k`-th closed-form summand tends to
//! `(-1)^(k+1) k^k/k! z^k` with `z = pi e^(pi - beta)`, and the resulting tree
//! series sums to `W(z)/(1+W(z))`. The series converges absolutely for
//! `|z| < 1/e`, i.e. for `beta > pi + 1 + ln pi`.

mod lambert;

pub use lambert::{lambert_w0, LambertEval, BRANCH_POINT, BRANCH_TOLERANCE};

use statrs::function::gamma::ln_gamma;

use crate::error::{LotteryError, Result};
use crate::numeric::KahanSum;
use crate::params::InstanceParams;
use crate::spectral::closed_form_term;

/// Term budget used by [`mu_series`].
pub const DEFAULT_MAX_TERMS: u64 = 10_000_000;

/// Partial sum of a series together with how it stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: u64,
    pub last_term_mag: f64,
    pub converged: bool,
}

/// `W(z)/(1+W(z))`. Singular at the branch point, where `W = -1`.
pub fn w_ratio(z: f64) -> Result<f64> {
    let w = lambert_w0(z)?.w;
    if w == f64::INFINITY {
        return Ok(1.0);
    }
    if w <= -1.0 {
        return Err(LotteryError::Singularity(z));
    }
    Ok(w / (1.0 + w))
}

/// Limit density in scaled variables: `W(g)/(1+W(g))` with `g = pi e^(pi - beta)`.
pub fn mu_scaled(pi: f64, beta: f64) -> Result<f64> {
    if pi.is_nan() || pi < 0.0 {
        return Err(LotteryError::domain("pi", pi, "[0, inf)"));
    }
    if beta.is_nan() {
        return Err(LotteryError::domain("beta", beta, "a number"));
    }
    if pi == 0.0 {
        return Ok(0.0);
    }
    w_ratio(pi * (pi - beta).exp())
}

/// Limit density in the original variables: `W(h)/(1+W(h))` with
/// `h = p/(1-p) e^((p - alpha)/(1-p))`.
///
/// `mu_ratio(0.5, 0.5) = W(1)/(1+W(1))`: the well-known value for half the
/// numbers tracked and half as many draws as numbers is this function, not
/// [`mu_scaled`] at `(1/2, 1/2)`.
pub fn mu_ratio(p: f64, alpha: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LotteryError::domain("p", p, "the open interval (0, 1)"));
    }
    if alpha.is_nan() {
        return Err(LotteryError::domain("alpha", alpha, "a number"));
    }
    let q = 1.0 - p;
    w_ratio(p / q * ((p - alpha) / q).exp())
}

/// `(-1)^(k+1) k^k / k! z^k` with `z = pi e^(pi - beta)`; zero for `k = 0`.
pub fn limit_coefficient(k: u64, pi: f64, beta: f64) -> f64 {
    if k == 0 || pi == 0.0 {
        return 0.0;
    }
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let kf = k as f64;
    let ln_z = pi.ln() + pi - beta;
    if k <= 100 {
        let mut coeff = 1.0;
        for i in 1..=k {
            coeff *= kf / i as f64;
        }
        sign * coeff * (kf * ln_z).exp()
    } else {
        sign * (kf * kf.ln() - ln_gamma(kf + 1.0) + kf * ln_z).exp()
    }
}

/// The `k`-th summand of the finite-`N` closed form, `1 <= k <= S0`.
pub fn finite_coefficient(k: u64, inst: &InstanceParams) -> Result<f64> {
    closed_form_term(inst, k).map(|t| t.to_f64())
}

/// Partial sums of `sum_{k>=1} (-1)^(k-1) k^k/k! z^k`.
///
/// Terms come from `t_{k+1} = -t_k z (1 + 1/k)^k`, `t_1 = z`. Summation stops
/// after the first term below `tol` in magnitude, after `max_terms` terms, or
/// before the first term that overflows.
/// The result is never flagged converged for `|z| >= 1/e`, where the terms
/// decay no faster than `k^(-1/2)`.
pub fn tree_series(z: f64, tol: f64, max_terms: u64) -> SeriesResult {
    let inside = z.abs() < -BRANCH_POINT;
    let mut sum = KahanSum::new();
    let mut term = z;
    let mut k = 1u64;
    loop {
        let mag = term.abs();
        if !term.is_finite() {
            return SeriesResult {
                value: sum.value(),
                terms_used: k - 1,
                last_term_mag: mag,
                converged: false,
            };
        }
        sum += term;
        if mag < tol || k >= max_terms {
            return SeriesResult {
                value: sum.value(),
                terms_used: k,
                last_term_mag: mag,
                converged: inside && mag < tol,
            };
        }
        let kf = k as f64;
        term = -term * z * (kf * (1.0 / kf).ln_1p()).exp();
        k += 1;
    }
}

/// Tree series at `z = pi e^(pi - beta)` with [`DEFAULT_MAX_TERMS`].
pub fn mu_series(pi: f64, beta: f64, tol: f64) -> Result<SeriesResult> {
    if pi.is_nan() || pi <= 0.0 {
        return Err(LotteryError::domain("pi", pi, "(0, inf)"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(LotteryError::domain("tol", tol, "(0, inf)"));
    }
    Ok(tree_series(pi * (pi - beta).exp(), tol, DEFAULT_MAX_TERMS))
}

/// Ratio-test condition in the original variables: `alpha > 1 + (1-p) ln(p/(1-p))`.
pub fn sufficient_condition(p: f64, alpha: f64) -> Result<bool> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LotteryError::domain("p", p, "the open interval (0, 1)"));
    }
    let q = 1.0 - p;
    Ok(alpha > 1.0 + q * (p / q).ln())
}

/// Ratio-test condition in scaled variables: `beta > pi + 1 + ln pi`.
pub fn sufficient_condition_scaled(pi: f64, beta: f64) -> Result<bool> {
    if pi.is_nan() || pi <= 0.0 {
        return Err(LotteryError::domain("pi", pi, "(0, inf)"));
    }
    Ok(beta > pi + 1.0 + pi.ln())
}

/// `W'(z) = W(z) / (z (1 + W(z)))`, extended by continuity to `W'(0) = 1`.
pub fn w_derivative(z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    Ok(w_ratio(z)? / z)
}
