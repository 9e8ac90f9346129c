//! Principal branch of the Lambert W function on `[-1/e, inf)`.

use crate::error::{LotteryError, Result};

/// `-1/e`, the branch point.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;
/// Arguments this far below the branch point are clamped onto it.
pub const BRANCH_TOLERANCE: f64 = 1e-12;

const MAX_ITERATIONS: usize = 50;

/// `W(z)` together with the defining-equation residual `|w e^w - z|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambertEval {
    pub z: f64,
    pub w: f64,
    pub residual: f64,
}

pub fn lambert_w0(z: f64) -> Result<LambertEval> {
    if z.is_nan() || z < BRANCH_POINT - BRANCH_TOLERANCE {
        return Err(LotteryError::domain("z", z, "[-1/e, inf)"));
    }
    let w = if z <= BRANCH_POINT {
        -1.0
    } else if z == 0.0 {
        0.0
    } else if z == f64::INFINITY {
        f64::INFINITY
    } else {
        halley(z, initial_guess(z))
    };
    let residual = if w.is_finite() {
        (w * w.exp() - z).abs()
    } else {
        0.0
    };
    Ok(LambertEval { z, w, residual })
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.32 {
        // Series in p = sqrt(2(ez + 1)) about the branch point.
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else if z <= 1.0 {
        z * (1.0 - z)
    } else if z <= std::f64::consts::E {
        // Winitzki's approximation; z(1-z) goes below -1 on this stretch.
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    } else {
        let l = z.ln();
        l - l.ln()
    }
}

fn halley(z: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}
