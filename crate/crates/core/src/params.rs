//! The two parameterizations of the lottery and finite instances of it.
//!
//! The natural description uses `p`, the natural density of the tracked set,
//! and `alpha`, the number of iterations per natural number. The scaled pair
//! `pi = p/(1-p)` and `beta = (1+pi) alpha` counts everything relative to the
//! `N` untracked tickets, which is what the Markov chain works with.

use crate::error::{LotteryError, Result};

/// Original parameterization: density `p` in (0, 1) and iteration ratio `alpha >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioParams {
    pub p: f64,
    pub alpha: f64,
}

impl RatioParams {
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        check_density(p)?;
        check_non_negative("alpha", alpha)?;
        Ok(Self { p, alpha })
    }
}

/// Scaled parameterization: `pi >= 0` tracked tickets and `beta >= 0`
/// iterations, both per untracked ticket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledParams {
    pub pi: f64,
    pub beta: f64,
}

impl ScaledParams {
    pub fn new(pi: f64, beta: f64) -> Result<Self> {
        check_non_negative("pi", pi)?;
        check_non_negative("beta", beta)?;
        Ok(Self { pi, beta })
    }
}

/// A concrete lottery: `n` untracked tickets, `s0 = floor(pi n)` tracked
/// tickets and `t = floor(beta n)` draws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceParams {
    pub n: u64,
    pub pi: f64,
    pub beta: f64,
    pub s0: u64,
    pub t: u64,
}

impl InstanceParams {
    /// Build an instance straight from integer counts. `pi` and `beta` are set
    /// to `s0/n` and `t/n`, so `instantiate` on them gives the same counts back.
    pub fn from_counts(n: u64, s0: u64, t: u64) -> Result<Self> {
        if n == 0 {
            return Err(LotteryError::domain("N", 0.0, "N >= 1"));
        }
        Ok(Self {
            n,
            pi: s0 as f64 / n as f64,
            beta: t as f64 / n as f64,
            s0,
            t,
        })
    }

    /// Density of the tracked set before the first draw, `s0/(n+s0)`.
    pub fn initial_density(&self) -> f64 {
        self.s0 as f64 / (self.n as f64 + self.s0 as f64)
    }

    /// Exponent `s0 - t - 1` of the closed-form summand.
    pub(crate) fn closed_form_exponent(&self) -> i128 {
        self.s0 as i128 - self.t as i128 - 1
    }
}

pub fn to_scaled(r: RatioParams) -> Result<ScaledParams> {
    check_density(r.p)?;
    check_non_negative("alpha", r.alpha)?;
    let q = 1.0 - r.p;
    Ok(ScaledParams {
        pi: r.p / q,
        beta: r.alpha / q,
    })
}

/// Inverse of [`to_scaled`]. `pi = 0` maps to the degenerate `p = 0`.
pub fn to_ratio(s: ScaledParams) -> Result<RatioParams> {
    check_non_negative("pi", s.pi)?;
    check_non_negative("beta", s.beta)?;
    let total = 1.0 + s.pi;
    Ok(RatioParams {
        p: s.pi / total,
        alpha: s.beta / total,
    })
}

pub fn instantiate(s: ScaledParams, n: u64) -> Result<InstanceParams> {
    if n == 0 {
        return Err(LotteryError::domain("N", 0.0, "N >= 1"));
    }
    check_non_negative("pi", s.pi)?;
    check_non_negative("beta", s.beta)?;
    let s0 = guarded_floor(s.pi * n as f64, "pi * N")?;
    let t = guarded_floor(s.beta * n as f64, "beta * N")?;
    Ok(InstanceParams {
        n,
        pi: s.pi,
        beta: s.beta,
        s0,
        t,
    })
}

const FLOOR_SNAP: f64 = 1e-9;

/// Floor that snaps to the nearest integer first when within `1e-9`, so
/// products such as `0.29 * 100` that land a hair below an integer still floor
/// to it.
pub(crate) fn guarded_floor(x: f64, what: &'static str) -> Result<u64> {
    if !x.is_finite() || x >= u64::MAX as f64 {
        return Err(LotteryError::Overflow { what });
    }
    let nearest = x.round();
    let v = if (x - nearest).abs() <= FLOOR_SNAP {
        nearest
    } else {
        x.floor()
    };
    Ok(v.max(0.0) as u64)
}

fn check_density(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(LotteryError::domain("p", p, "the open interval (0, 1)"))
    }
}

fn check_non_negative(name: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(LotteryError::domain(name, x, "[0, inf)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn scaled_examples() {
        let s = to_scaled(RatioParams::new(0.5, 1.0).unwrap()).unwrap();
        assert_eq!((s.pi, s.beta), (1.0, 2.0));
        let s = to_scaled(RatioParams::new(0.5, 0.5).unwrap()).unwrap();
        assert_eq!((s.pi, s.beta), (1.0, 1.0));
        let s = to_scaled(RatioParams::new(2.0 / 3.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(s.pi, 2.0, max_relative = 1e-15);
        assert_relative_eq!(s.beta, 3.0, max_relative = 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let r = to_ratio(ScaledParams::new(1.0, 2.0).unwrap()).unwrap();
        assert_eq!((r.p, r.alpha), (0.5, 1.0));
        let r = to_ratio(ScaledParams::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((r.p, r.alpha), (0.0, 0.0));
        let r0 = RatioParams::new(0.3, 0.7).unwrap();
        let r = to_ratio(to_scaled(r0).unwrap()).unwrap();
        assert_relative_eq!(r.p, 0.3, max_relative = 1e-15);
        assert_relative_eq!(r.alpha, 0.7, max_relative = 1e-15);
    }

    #[test]
    fn density_outside_open_interval_is_rejected() {
        for p in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(RatioParams::new(p, 1.0).is_err());
            assert!(to_scaled(RatioParams { p, alpha: 1.0 }).is_err());
        }
        assert!(RatioParams::new(0.5, -1.0).is_err());
    }

    #[test]
    fn instantiate_examples() {
        let i = instantiate(ScaledParams::new(0.35, 1.0).unwrap(), 10).unwrap();
        assert_eq!((i.s0, i.t), (3, 10));
        let i = instantiate(ScaledParams::new(1.0, 2.0).unwrap(), 1000).unwrap();
        assert_eq!((i.s0, i.t), (1000, 2000));
        let i = instantiate(ScaledParams::new(0.999, 0.5).unwrap(), 3).unwrap();
        assert_eq!((i.s0, i.t), (2, 1));
    }

    #[test]
    fn floor_snaps_near_integers() {
        // 0.29 * 100 = 28.999999999999996
        let i = instantiate(ScaledParams::new(0.7, 0.29).unwrap(), 100).unwrap();
        assert_eq!((i.s0, i.t), (70, 29));
        let s = to_scaled(RatioParams::new(2.0 / 3.0, 1.0).unwrap()).unwrap();
        let i = instantiate(s, 999).unwrap();
        assert_eq!((i.s0, i.t), (1998, 2997));
    }

    #[test]
    fn instantiate_errors() {
        assert!(matches!(
            instantiate(ScaledParams::new(1.0, 1.0).unwrap(), 0),
            Err(LotteryError::Domain { .. })
        ));
        assert!(matches!(
            instantiate(ScaledParams::new(1e300, 1.0).unwrap(), 10),
            Err(LotteryError::Overflow { .. })
        ));
        assert!(matches!(
            instantiate(ScaledParams::new(1.0, f64::INFINITY).unwrap(), 10),
            Err(LotteryError::Overflow { .. })
        ));
    }

    #[test]
    fn from_counts_round_trips_through_instantiate() {
        let i = InstanceParams::from_counts(7, 5, 19).unwrap();
        let j = instantiate(ScaledParams::new(i.pi, i.beta).unwrap(), 7).unwrap();
        assert_eq!((j.s0, j.t), (5, 19));
    }

    proptest! {
        #[test]
        fn ratio_round_trip(p in 1e-6f64..(1.0 - 1e-6), alpha in 0.0f64..50.0) {
            let r = RatioParams::new(p, alpha).unwrap();
            let back = to_ratio(to_scaled(r).unwrap()).unwrap();
            prop_assert!((back.p - p).abs() <= 1e-14 * p);
            prop_assert!((back.alpha - alpha).abs() <= 1e-14 * alpha.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn scaled_round_trip(pi in 1e-6f64..10.0, beta in 0.0f64..1e3) {
            let s = ScaledParams::new(pi, beta).unwrap();
            let back = to_scaled(to_ratio(s).unwrap()).unwrap();
            prop_assert!((back.pi - pi).abs() <= 1e-14 * pi);
            prop_assert!((back.beta - beta).abs() <= 1e-14 * beta.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn initial_density_never_exceeds_nominal(p in 0.01f64..0.99, n in 1u64..5000) {
            let r = RatioParams::new(p, 1.0).unwrap();
            let inst = instantiate(to_scaled(r).unwrap(), n).unwrap();
            let nominal = to_ratio(ScaledParams::new(inst.pi, inst.beta).unwrap()).unwrap().p;
            prop_assert!(inst.initial_density() <= nominal + 1e-12);
        }
    }
}
