//! Convergence studies, verification suites and their CSV/SVG output.

mod csv_out;
mod svg;
mod verify;

pub use csv_out::{format_float, write_records, CSV_HEADER};
pub use svg::render_svg;
pub use verify::{run_verify, SuiteOutcome, VerifyConfig, VerifyReport};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{LotteryError, Result};
use crate::limits::{mu_ratio, mu_scaled, sufficient_condition_scaled};
use crate::markov::{m_exact, monte_carlo_m, NumericMode};
use crate::params::{instantiate, to_ratio, to_scaled, RatioParams, ScaledParams};
use crate::spectral::closed_form_m;

/// How a value is obtained. Variants are declared in the order rows are sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Closed,
    Dp,
    Limit,
    Mc,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Closed, Method::Dp, Method::Limit, Method::Mc];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Dp => "dp",
            Method::Limit => "limit",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = LotteryError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| LotteryError::Invalid(format!("unknown method {s:?}")))
    }
}

/// A parameter point given in either parameterization. The limit is evaluated
/// in whichever variables the point was given in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamPoint {
    Ratio(RatioParams),
    Scaled(ScaledParams),
}

impl ParamPoint {
    pub fn ratio(&self) -> Result<RatioParams> {
        match *self {
            ParamPoint::Ratio(r) => Ok(r),
            ParamPoint::Scaled(s) => to_ratio(s),
        }
    }

    pub fn scaled(&self) -> Result<ScaledParams> {
        match *self {
            ParamPoint::Ratio(r) => to_scaled(r),
            ParamPoint::Scaled(s) => Ok(s),
        }
    }

    pub fn mu_limit(&self) -> Result<f64> {
        match *self {
            ParamPoint::Ratio(r) => mu_ratio(r.p, r.alpha),
            ParamPoint::Scaled(s) => mu_scaled(s.pi, s.beta),
        }
    }

    /// The ratio-test condition. `pi = 0` has a zero limit series and counts
    /// as satisfied.
    pub fn condition_satisfied(&self) -> Result<bool> {
        let s = self.scaled()?;
        if s.pi == 0.0 {
            return Ok(true);
        }
        sufficient_condition_scaled(s.pi, s.beta)
    }
}

/// One output row.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRecord {
    pub p: f64,
    pub alpha: f64,
    pub pi: f64,
    pub beta: f64,
    /// Absent only for a limit value requested without a system size.
    pub n: Option<u64>,
    pub method: Method,
    pub value: f64,
    pub std_error: Option<f64>,
    pub mu_limit: f64,
    pub abs_err: f64,
    pub condition_satisfied: bool,
}

impl StudyRecord {
    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.p
            .total_cmp(&other.p)
            .then(self.alpha.total_cmp(&other.alpha))
            .then(self.n.cmp(&other.n))
            .then(self.method.cmp(&other.method))
    }
}

/// Knobs shared by every evaluation method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodOptions {
    pub mode: NumericMode,
    pub trials: u64,
    pub seed: u64,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            mode: NumericMode::Float64,
            trials: 10_000,
            seed: 0,
        }
    }
}

/// Evaluate one cell. `n` is required by every method except `limit`.
pub fn compute_record(
    point: ParamPoint,
    n: Option<u64>,
    method: Method,
    opts: &MethodOptions,
) -> Result<StudyRecord> {
    let ratio = point.ratio()?;
    let scaled = point.scaled()?;
    let mu_limit = point.mu_limit()?;
    let condition_satisfied = point.condition_satisfied()?;

    let (value, std_error) = match (method, n) {
        (Method::Limit, _) => (mu_limit, None),
        (_, None) => {
            return Err(LotteryError::Invalid(format!(
                "method {method} needs a system size N"
            )))
        }
        (_, Some(n)) => {
            let inst = instantiate(scaled, n)?;
            match method {
                Method::Dp => (m_exact(&inst, opts.mode)?, None),
                Method::Closed => (closed_form_m(&inst, opts.mode)?, None),
                Method::Mc => {
                    let est = monte_carlo_m(&inst, opts.trials, opts.seed)?;
                    (est.mean, Some(est.std_error))
                }
                Method::Limit => unreachable!(),
            }
        }
    };

    Ok(StudyRecord {
        p: ratio.p,
        alpha: ratio.alpha,
        pi: scaled.pi,
        beta: scaled.beta,
        n,
        method,
        value,
        std_error,
        mu_limit,
        abs_err: (value - mu_limit).abs(),
        condition_satisfied,
    })
}

/// Grid of `(p, alpha, N, method)` cells.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub p_list: Vec<f64>,
    pub alpha_list: Vec<f64>,
    pub n_list: Vec<u64>,
    pub methods: Vec<Method>,
    pub options: MethodOptions,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("p", self.p_list.is_empty()),
            ("alpha", self.alpha_list.is_empty()),
            ("N", self.n_list.is_empty()),
            ("method", self.methods.is_empty()),
        ] {
            if empty {
                return Err(LotteryError::Invalid(format!("{name} list is empty")));
            }
        }
        for &p in &self.p_list {
            for &alpha in &self.alpha_list {
                RatioParams::new(p, alpha)?;
            }
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0) {
            return Err(LotteryError::domain("N", n as f64, "N >= 1"));
        }
        if self.methods.contains(&Method::Mc) && self.options.trials == 0 {
            return Err(LotteryError::domain("trials", 0.0, "trials >= 1"));
        }
        Ok(())
    }

    fn cells(&self) -> Vec<(f64, f64, u64, Method)> {
        let mut cells = Vec::new();
        for &p in &self.p_list {
            for &alpha in &self.alpha_list {
                for &n in &self.n_list {
                    for &m in &self.methods {
                        cells.push((p, alpha, n, m));
                    }
                }
            }
        }
        cells
    }
}

/// Evaluate every cell, in parallel, and return the rows sorted by
/// `(p, alpha, N, method)`. Duplicate cells in the input lists collapse.
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRecord>> {
    config.validate()?;
    let mut cells = config.cells();
    cells.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });
    cells.dedup();
    let mut rows = cells
        .par_iter()
        .map(|&(p, alpha, n, method)| {
            let point = ParamPoint::Ratio(RatioParams::new(p, alpha)?);
            compute_record(point, Some(n), method, &config.options)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(StudyRecord::sort_key_cmp);
    Ok(rows)
}
