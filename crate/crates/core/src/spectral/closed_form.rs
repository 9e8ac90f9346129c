//! Closed-form expected density
//!
//! ```text
//! m_N = sum_{k=1}^{S0} (-1)^(k+1) C(S0, k) (k/(N+k))^k ((N+k)/N)^(S0-T-1)
//! ```
//!
//! The summand alternates in sign and its magnitude can exceed `e^80` for
//! inputs as small as `N = 50`, so the plain `f64` sum is only trusted when a
//! running error bound says so. Otherwise the terms are recomputed exactly as
//! big-integer fractions and summed in fixed point with enough fraction bits to
//! deliver full `f64` precision.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use super::SignedLogValue;
use crate::error::{LotteryError, Result};
use crate::markov::NumericMode;
use crate::numeric::KahanSum;
use crate::params::InstanceParams;

/// Accept the compensated `f64` sum only if its error bound is below this
/// fraction of the result.
const F64_RELATIVE_BUDGET: f64 = 1e-12;
/// Condition numbers above this are logged.
const CONDITION_WARN: f64 = 1e12;
/// Rough limit on machine-word operations spent in the fixed-point fallback.
const FIXED_POINT_WORK_LIMIT: f64 = 4e9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormTerm {
    pub k: u64,
    pub value: SignedLogValue,
}

/// How the sum was finally evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummationPath {
    /// No terms (`S0 = 0`).
    Empty,
    /// Signed-log terms converted to `f64` and Kahan-summed in ascending `k`.
    Compensated,
    /// Exact terms summed as integers scaled by `2^bits`.
    FixedPoint {
        bits: u64,
    },
    ExactRational,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormEvaluation {
    pub value: f64,
    /// `sum |term| / |sum term|`; one when nothing cancels.
    pub condition: f64,
    pub path: SummationPath,
    pub terms: u64,
}

struct LogTerm {
    value: SignedLogValue,
    /// Bound on the absolute error of `value.log_mag()` in units of machine epsilon.
    log_error_scale: f64,
}

fn log_term(inst: &InstanceParams, k: u64, ln_fact_s0: f64) -> LogTerm {
    let (n, kf) = (inst.n as f64, k as f64);
    let exponent = inst.closed_form_exponent() as f64;
    let ln_choose = ln_binomial(inst.s0, k);
    // k ln(k/(N+k)) and (S0-T-1) ln((N+k)/N)
    let ln_ratio_pow = -kf * (n / kf).ln_1p();
    let ln_growth = exponent * (kf / n).ln_1p();
    let sign = if k % 2 == 1 { 1 } else { -1 };
    LogTerm {
        value: SignedLogValue::from_parts(sign, ln_choose + ln_ratio_pow + ln_growth),
        log_error_scale: 4.0
            * (ln_choose.abs().max(ln_fact_s0) + ln_ratio_pow.abs() + ln_growth.abs() + 1.0),
    }
}

/// The `k`-th summand, `1 <= k <= S0`, in signed-log form.
pub fn closed_form_term(inst: &InstanceParams, k: u64) -> Result<SignedLogValue> {
    if k == 0 || k > inst.s0 {
        return Err(LotteryError::OutOfRange {
            index: k,
            lo: 1,
            hi: inst.s0,
        });
    }
    Ok(log_term(inst, k, 0.0).value)
}

pub fn closed_form_terms(inst: &InstanceParams) -> Vec<ClosedFormTerm> {
    (1..=inst.s0)
        .map(|k| ClosedFormTerm {
            k,
            value: log_term(inst, k, 0.0).value,
        })
        .collect()
}

/// Closed-form expected density.
pub fn closed_form_m(inst: &InstanceParams, mode: NumericMode) -> Result<f64> {
    evaluate_closed_form(inst, mode).map(|e| e.value)
}

/// Closed-form evaluation with the diagnostics of how it was computed.
pub fn evaluate_closed_form(
    inst: &InstanceParams,
    mode: NumericMode,
) -> Result<ClosedFormEvaluation> {
    if inst.s0 == 0 {
        return Ok(ClosedFormEvaluation {
            value: 0.0,
            condition: 1.0,
            path: SummationPath::Empty,
            terms: 0,
        });
    }
    match mode {
        NumericMode::Float64 => evaluate_float(inst),
        NumericMode::ExactRational => {
            let exact = closed_form_rational(inst)?;
            let value = exact.to_f64().unwrap_or(f64::NAN);
            Ok(ClosedFormEvaluation {
                value,
                condition: condition_from_logs(&log_terms(inst), value),
                path: SummationPath::ExactRational,
                terms: inst.s0,
            })
        }
    }
}

fn log_terms(inst: &InstanceParams) -> Vec<LogTerm> {
    let ln_fact_s0 = if inst.s0 >= 171 {
        ln_factorial(inst.s0)
    } else {
        0.0
    };
    (1..=inst.s0)
        .map(|k| log_term(inst, k, ln_fact_s0))
        .collect()
}

fn log_abs_sum(terms: &[LogTerm]) -> f64 {
    let max = terms
        .iter()
        .map(|t| t.value.log_mag())
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let scaled: KahanSum = terms
        .iter()
        .map(|t| (t.value.log_mag() - max).exp())
        .collect();
    max + scaled.value().ln()
}

fn condition_from_logs(terms: &[LogTerm], value: f64) -> f64 {
    (log_abs_sum(terms) - value.abs().ln()).exp()
}

fn evaluate_float(inst: &InstanceParams) -> Result<ClosedFormEvaluation> {
    let terms = log_terms(inst);
    let max_log = terms
        .iter()
        .map(|t| t.value.log_mag())
        .fold(f64::NEG_INFINITY, f64::max);

    // Terms that overflow f64 cannot be summed in it at all.
    let mut condition = f64::INFINITY;
    if max_log < 700.0 {
        let mut sum = KahanSum::new();
        let mut abs_sum = 0.0;
        let mut error_bound = 0.0;
        for t in &terms {
            let x = t.value.to_f64();
            sum += x;
            abs_sum += x.abs();
            error_bound += x.abs() * t.log_error_scale * f64::EPSILON;
        }
        let value = sum.value();
        error_bound += abs_sum * 4.0 * f64::EPSILON;
        condition = abs_sum / value.abs();
        if error_bound <= F64_RELATIVE_BUDGET * value.abs() {
            if condition > CONDITION_WARN {
                log::warn!(
                    "closed form for N={} S0={} T={} has condition {condition:e}",
                    inst.n,
                    inst.s0,
                    inst.t
                );
            }
            return Ok(ClosedFormEvaluation {
                value,
                condition,
                path: SummationPath::Compensated,
                terms: inst.s0,
            });
        }
    }

    if fixed_point_work(inst) > FIXED_POINT_WORK_LIMIT {
        return Err(LotteryError::IllConditioned {
            condition,
            s0: inst.s0,
        });
    }
    let (value, bits) = fixed_point_sum(inst);
    let condition = condition_from_logs(&terms, value);
    log::info!(
        "closed form for N={} S0={} T={} fell back to {bits}-bit fixed point (condition {condition:e})",
        inst.n,
        inst.s0,
        inst.t
    );
    Ok(ClosedFormEvaluation {
        value,
        condition,
        path: SummationPath::FixedPoint { bits },
        terms: inst.s0,
    })
}

/// Numerator and denominator of the `k`-th summand's magnitude, given `C(S0, k)`.
fn exact_term_parts(inst: &InstanceParams, k: u64, choose: &BigUint) -> (BigUint, BigUint) {
    let n = BigUint::from(inst.n);
    let nk = BigUint::from(inst.n + k);
    let e = inst.closed_form_exponent();
    // C k^k (N+k)^(e-k) N^(-e)
    let growth = e - k as i128;
    let mut num = choose * BigUint::from(k).pow(k as u32);
    let mut den = BigUint::one();
    if growth >= 0 {
        num *= nk.pow(growth as u32);
    } else {
        den *= nk.pow((-growth) as u32);
    }
    if e >= 0 {
        den *= n.pow(e as u32);
    } else {
        num *= n.pow((-e) as u32);
    }
    (num, den)
}

fn fixed_point_work(inst: &InstanceParams) -> f64 {
    let e = inst.closed_form_exponent().unsigned_abs() as f64;
    let s0 = inst.s0 as f64;
    let bits = (e + s0) * ((inst.n + inst.s0) as f64).log2()
        + s0 * s0.log2().max(1.0)
        + e * (inst.n as f64).log2();
    let words = bits / 64.0 + 1.0;
    s0 * words * words
}

/// Sum the exact terms scaled by `2^bits`, raising `bits` until the result has
/// at least 64 significant bits beyond the accumulated truncation error.
fn fixed_point_sum(inst: &InstanceParams) -> (f64, u64) {
    let slack = 64 - inst.s0.leading_zeros() as u64;
    let mut bits = 96 + slack;
    loop {
        let mut acc = BigInt::zero();
        let mut choose = BigUint::one();
        for k in 1..=inst.s0 {
            choose = choose * BigUint::from(inst.s0 - k + 1) / BigUint::from(k);
            let (num, den) = exact_term_parts(inst, k, &choose);
            let scaled = BigInt::from_biguint(Sign::Plus, (num << bits) / den);
            if k % 2 == 1 {
                acc += scaled;
            } else {
                acc -= scaled;
            }
        }
        let have = acc.bits();
        let need = 64 + slack;
        if have >= need {
            let value = BigRational::new(acc, BigInt::one() << bits);
            return (value.to_f64().unwrap_or(f64::NAN), bits);
        }
        bits += need - have + 32;
    }
}

/// Exact closed-form value. Subject to the exact-rational cost guard.
pub fn closed_form_rational(inst: &InstanceParams) -> Result<BigRational> {
    NumericMode::ExactRational.check_cost(inst.n, inst.t)?;
    let mut sum = BigRational::zero();
    let mut choose = BigUint::one();
    for k in 1..=inst.s0 {
        choose = choose * BigUint::from(inst.s0 - k + 1) / BigUint::from(k);
        let (num, den) = exact_term_parts(inst, k, &choose);
        let g = num.gcd(&den);
        let term = BigRational::new_raw(
            BigInt::from_biguint(Sign::Plus, num / &g),
            BigInt::from_biguint(Sign::Plus, den / &g),
        );
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{m_exact, m_exact_rational};
    use crate::numeric::rational;
    use crate::params::{instantiate, ScaledParams};

    #[test]
    fn hand_cases() {
        let one = InstanceParams::from_counts(1, 1, 1).unwrap();
        assert_eq!(closed_form_rational(&one).unwrap(), rational(1, 4));
        assert!((closed_form_m(&one, NumericMode::Float64).unwrap() - 0.25).abs() < 1e-15);

        // 2 (1/3) (3/2)^-1 - (1/2)^2 2^-1 = 4/9 - 1/8; the body-text exponent
        // [pi-beta] k N - 1 would give a different value here.
        let two = InstanceParams::from_counts(2, 2, 2).unwrap();
        assert_eq!(closed_form_rational(&two).unwrap(), rational(23, 72));
        assert!((closed_form_m(&two, NumericMode::Float64).unwrap() - 23.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn empty_sum() {
        let inst = InstanceParams::from_counts(10, 0, 4).unwrap();
        let e = evaluate_closed_form(&inst, NumericMode::Float64).unwrap();
        assert_eq!((e.value, e.path), (0.0, SummationPath::Empty));
        assert!(closed_form_terms(&inst).is_empty());
    }

    #[test]
    fn term_index_bounds() {
        let inst = InstanceParams::from_counts(1, 1, 1).unwrap();
        assert!((closed_form_term(&inst, 1).unwrap().to_f64() - 0.25).abs() < 1e-15);
        assert!(closed_form_term(&inst, 0).is_err());
        assert!(matches!(
            closed_form_term(&inst, 2),
            Err(LotteryError::OutOfRange { .. })
        ));
    }

    #[test]
    fn signs_alternate_from_positive() {
        let inst = InstanceParams::from_counts(30, 45, 20).unwrap();
        for t in closed_form_terms(&inst) {
            let expected = if t.k % 2 == 1 { 1 } else { -1 };
            assert_eq!(t.value.sign(), expected, "k = {}", t.k);
        }
    }

    #[test]
    fn equals_dp_exactly_in_rationals() {
        for n in 1..=12u64 {
            for (pi, beta) in [(0.5, 0.5), (1.0, 2.0), (2.0, 0.5), (2.0, 2.0)] {
                let inst = instantiate(ScaledParams::new(pi, beta).unwrap(), n).unwrap();
                assert_eq!(
                    closed_form_rational(&inst).unwrap(),
                    m_exact_rational(&inst).unwrap()
                );
            }
        }
    }

    #[test]
    fn ill_conditioned_inputs_fall_back_to_fixed_point() {
        let inst = instantiate(ScaledParams::new(2.0, 0.5).unwrap(), 50).unwrap();
        let e = evaluate_closed_form(&inst, NumericMode::Float64).unwrap();
        assert!(matches!(e.path, SummationPath::FixedPoint { .. }));
        assert!(e.condition > 1e30);
        let dp = m_exact(&inst, NumericMode::Float64).unwrap();
        assert!((e.value - dp).abs() <= 1e-12, "{} vs {dp}", e.value);
    }

    #[test]
    fn well_conditioned_inputs_stay_in_f64() {
        let inst = instantiate(ScaledParams::new(1.0, 3.0).unwrap(), 150).unwrap();
        let e = evaluate_closed_form(&inst, NumericMode::Float64).unwrap();
        assert_eq!(e.path, SummationPath::Compensated);
        let dp = m_exact(&inst, NumericMode::Float64).unwrap();
        assert!((e.value - dp).abs() <= 1e-10, "{} vs {dp}", e.value);
    }

    #[test]
    fn fixed_point_matches_exact() {
        for (n, s0, t) in [(7u64, 20u64, 3u64), (20, 40, 10), (3, 9, 40)] {
            let inst = InstanceParams::from_counts(n, s0, t).unwrap();
            let (v, _) = fixed_point_sum(&inst);
            let exact = closed_form_rational(&inst).unwrap().to_f64().unwrap();
            assert!((v - exact).abs() <= 2.0 * f64::EPSILON * exact.abs());
        }
    }

    #[test]
    fn oversized_ill_conditioned_input_is_refused() {
        let inst = instantiate(ScaledParams::new(2.0, 0.5).unwrap(), 20_000).unwrap();
        assert!(matches!(
            evaluate_closed_form(&inst, NumericMode::Float64),
            Err(LotteryError::IllConditioned { .. })
        ));
    }
}
