use std::fmt;

use num_rational::BigRational;

use crate::error::{LotteryError, Result};
use crate::limits::{tree_series, w_ratio};
use crate::markov::{m_exact, m_exact_rational, NumericMode};
use crate::numeric::Field;
use crate::params::{instantiate, ScaledParams};
use crate::spectral::{
    closed_form_m, closed_form_rational, eigen_residual, inverse_residual, TruncatedMatrix,
    EIGEN_MAX_TRUNCATION, INVERSE_MAX_FLOAT_TRUNCATION, INVERSE_MAX_TRUNCATION,
};

const FLOAT_RESIDUAL_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-9;
const EXACT_ORACLE_MAX_N: u64 = 20;
const ORACLE_GRID: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub max_n: u64,
    pub trunc: usize,
    /// Agreement required between the tree series and `W/(1+W)`.
    pub tol: f64,
    /// Flip the sign of one eigenvector entry so the spectral suites must fail.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_n: 10,
            trunc: 16,
            tol: 1e-10,
            inject_fault: false,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(LotteryError::domain("max_n", 0.0, "max_n >= 1"));
        }
        if !(1..=INVERSE_MAX_TRUNCATION).contains(&self.trunc) {
            return Err(LotteryError::Invalid(format!(
                "truncation must be in 1..={INVERSE_MAX_TRUNCATION}, got {}",
                self.trunc
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(LotteryError::domain("tol", self.tol, "(0, inf)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    Ok(VerifyReport {
        suites: vec![
            eigen_suite(config),
            inverse_suite(config),
            oracle_suite(config)?,
            series_suite(config),
        ],
    })
}

fn eigenvectors<T: Field>(n: u64, order: usize, fault: bool) -> TruncatedMatrix<T> {
    let mut v = TruncatedMatrix::<T>::eigenvectors(n, order);
    if fault {
        let flipped = -v.get(0, 1).clone();
        v.set(0, 1, flipped);
    }
    v
}

fn eigen_suite(c: &VerifyConfig) -> SuiteOutcome {
    let order = c.trunc.min(EIGEN_MAX_TRUNCATION);
    let mut worst_float = 0.0f64;
    let mut exact_failures = Vec::new();
    for n in 1..=c.max_n {
        let m = TruncatedMatrix::<BigRational>::transition(n, order);
        let v = eigenvectors::<BigRational>(n, order, c.inject_fault);
        if eigen_residual(&m, &v) != 0.0 {
            exact_failures.push(n);
        }
        let m = TruncatedMatrix::<f64>::transition(n, order);
        let v = eigenvectors::<f64>(n, order, c.inject_fault);
        worst_float = worst_float.max(eigen_residual(&m, &v));
    }
    spectral_outcome("eigen_residual", exact_failures, worst_float, true)
}

fn inverse_suite(c: &VerifyConfig) -> SuiteOutcome {
    let float_checked = c.trunc <= INVERSE_MAX_FLOAT_TRUNCATION;
    let mut worst_float = 0.0f64;
    let mut exact_failures = Vec::new();
    for n in 1..=c.max_n {
        let inv = TruncatedMatrix::<BigRational>::inverse_eigenvectors(n, c.trunc);
        let v = eigenvectors::<BigRational>(n, c.trunc, c.inject_fault);
        if inverse_residual(&inv, &v) != 0.0 {
            exact_failures.push(n);
        }
        if float_checked {
            let inv = TruncatedMatrix::<f64>::inverse_eigenvectors(n, c.trunc);
            let v = eigenvectors::<f64>(n, c.trunc, c.inject_fault);
            worst_float = worst_float.max(inverse_residual(&inv, &v));
        }
    }
    spectral_outcome(
        "inverse_identity",
        exact_failures,
        worst_float,
        float_checked,
    )
}

fn spectral_outcome(
    name: &'static str,
    exact_failures: Vec<u64>,
    worst_float: f64,
    float_checked: bool,
) -> SuiteOutcome {
    let float_ok = worst_float <= FLOAT_RESIDUAL_TOL;
    let mut detail = if exact_failures.is_empty() {
        "exact residual 0".to_string()
    } else {
        format!("exact residual nonzero for N = {exact_failures:?}")
    };
    if float_checked {
        detail.push_str(&format!(", float residual {worst_float:e}"));
    } else {
        detail.push_str(", float check skipped above truncation 16");
    }
    SuiteOutcome {
        name,
        passed: exact_failures.is_empty() && float_ok,
        detail,
    }
}

fn oracle_suite(c: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    let mut cases = 0;
    for n in 1..=c.max_n {
        for pi in ORACLE_GRID {
            for beta in ORACLE_GRID {
                let inst = instantiate(ScaledParams::new(pi, beta)?, n)?;
                let dp = m_exact(&inst, NumericMode::Float64)?;
                let closed = closed_form_m(&inst, NumericMode::Float64)?;
                worst = worst.max((dp - closed).abs());
                if n <= EXACT_ORACLE_MAX_N
                    && m_exact_rational(&inst)? != closed_form_rational(&inst)?
                {
                    mismatches.push((n, pi, beta));
                }
                cases += 1;
            }
        }
    }
    Ok(SuiteOutcome {
        name: "closed_vs_dp",
        passed: worst <= ORACLE_TOL && mismatches.is_empty(),
        detail: format!(
            "{cases} cases, max |closed - dp| {worst:e}, exact mismatches {}",
            mismatches.len()
        ),
    })
}

fn series_suite(c: &VerifyConfig) -> SuiteOutcome {
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for i in 0..=70 {
        let z = 0.005 * i as f64;
        let s = tree_series(z, c.tol * 1e-2, 10_000_000);
        all_converged &= s.converged;
        match w_ratio(z) {
            Ok(w) => worst = worst.max((s.value - w).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    SuiteOutcome {
        name: "series_vs_w",
        passed: all_converged && worst <= c.tol,
        detail: format!("z in [0, 0.35], max deviation {worst:e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run_verify(&VerifyConfig::default()).unwrap();
        for s in &report.suites {
            assert!(s.passed, "{s}");
        }
        assert_eq!(report.suites.len(), 4);
    }

    #[test]
    fn injected_fault_is_caught() {
        let config = VerifyConfig {
            max_n: 3,
            trunc: 6,
            inject_fault: true,
            ..VerifyConfig::default()
        };
        let report = run_verify(&config).unwrap();
        assert!(!report.all_passed());
        assert!(!report.suites[0].passed);
        assert!(!report.suites[1].passed);
    }

    #[test]
    fn truncation_limit() {
        let config = VerifyConfig {
            trunc: 33,
            ..VerifyConfig::default()
        };
        assert!(run_verify(&config).is_err());
        let config = VerifyConfig {
            max_n: 0,
            ..VerifyConfig::default()
        };
        assert!(run_verify(&config).is_err());
    }
}
