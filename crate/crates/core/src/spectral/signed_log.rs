use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Products and quotients are exact in the log domain; sums factor out the
/// larger magnitude first. Values far outside the `f64` range stay representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogValue {
    sign: i8,
    log_mag: f64,
}

impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLogValue = SignedLogValue {
        sign: 1,
        log_mag: 0.0,
    };

    /// `sign * exp(log_mag)`. A zero sign, or a log magnitude of `-inf`, gives zero.
    pub fn from_parts(sign: i8, log_mag: f64) -> Self {
        if sign == 0 || log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_mag,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                log_mag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        Self {
            sign: self.sign.abs(),
            ..self
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_mag.exp()
        }
    }

    /// Integer power. `0^0` is one.
    pub fn powi(self, exp: i64) -> Self {
        if exp == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return if exp > 0 {
                Self::ZERO
            } else {
                Self::from_parts(1, f64::INFINITY)
            };
        }
        let sign = if exp % 2 == 0 { 1 } else { self.sign };
        Self {
            sign,
            log_mag: self.log_mag * exp as f64,
        }
    }

    /// Compare magnitudes.
    pub fn cmp_magnitude(&self, other: &Self) -> Ordering {
        self.log_mag.total_cmp(&other.log_mag)
    }
}

impl Default for SignedLogValue {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for SignedLogValue {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for SignedLogValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            ..self
        }
    }
}

impl Mul for SignedLogValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self {
            sign: self.sign * rhs.sign,
            log_mag: self.log_mag + rhs.log_mag,
        }
    }
}

impl Div for SignedLogValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * Self {
            sign: rhs.sign,
            log_mag: -rhs.log_mag,
        }
    }
}

impl Add for SignedLogValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let r = (small.log_mag - big.log_mag).exp();
        if big.sign == small.sign {
            Self {
                sign: big.sign,
                log_mag: big.log_mag + r.ln_1p(),
            }
        } else if r == 1.0 {
            Self::ZERO
        } else {
            Self {
                sign: big.sign,
                log_mag: big.log_mag + (-r).ln_1p(),
            }
        }
    }
}

impl Sub for SignedLogValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_and_one() {
        assert_eq!(SignedLogValue::from_f64(0.0), SignedLogValue::ZERO);
        assert_eq!(SignedLogValue::ZERO.to_f64(), 0.0);
        assert_eq!(SignedLogValue::ONE.to_f64(), 1.0);
        assert_eq!(SignedLogValue::from_f64(2.0).powi(0), SignedLogValue::ONE);
        assert_eq!(SignedLogValue::ZERO.powi(0), SignedLogValue::ONE);
        assert!(SignedLogValue::ZERO.powi(3).is_zero());
    }

    #[test]
    fn exact_cancellation() {
        let a = SignedLogValue::from_f64(3.5);
        assert!((a - a).is_zero());
    }

    #[test]
    fn beyond_f64_range() {
        // 10^400 * 10^-399 = 10
        let big = SignedLogValue::from_parts(1, 400.0 * std::f64::consts::LN_10);
        let small = SignedLogValue::from_parts(1, -399.0 * std::f64::consts::LN_10);
        assert!(((big * small).to_f64() - 10.0).abs() < 1e-11);
        assert_eq!(big.to_f64(), f64::INFINITY);
    }

    #[test]
    fn odd_powers_keep_sign() {
        let m = SignedLogValue::from_f64(-2.0);
        assert!((m.powi(3).to_f64() + 8.0).abs() < 1e-14);
        assert!((m.powi(-2).to_f64() - 0.25).abs() < 1e-15);
    }

    fn mag() -> impl Strategy<Value = f64> {
        (prop_oneof![Just(-1.0), Just(1.0)], -690.0f64..690.0).prop_map(|(s, e)| s * e.exp())
    }

    proptest! {
        #[test]
        fn round_trip(x in mag()) {
            let back = SignedLogValue::from_f64(x).to_f64();
            prop_assert!((back - x).abs() <= 1e-13 * x.abs());
        }

        #[test]
        fn product_matches_f64(a in -1e100f64..1e100, b in -1e100f64..1e100) {
            let p = (SignedLogValue::from_f64(a) * SignedLogValue::from_f64(b)).to_f64();
            prop_assert!((p - a * b).abs() <= 1e-12 * (a * b).abs());
        }

        #[test]
        fn sum_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let s = (SignedLogValue::from_f64(a) + SignedLogValue::from_f64(b)).to_f64();
            // Cancellation in the log domain loses digits relative to the operands.
            prop_assert!((s - (a + b)).abs() <= 1e-12 * (a.abs() + b.abs()));
        }
    }
}
