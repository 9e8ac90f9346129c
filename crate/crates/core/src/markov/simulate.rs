//! Seeded stochastic simulators of the lottery.
//!
//! Every trajectory runs on its own `Xoshiro256PlusPlus` stream. The stream for
//! trial `i` under master seed `s` is seeded with the `(i+1)`-th output of a
//! SplitMix64 generator started at `s` (see [`trial_seed`]), so any trial can
//! be replayed on its own and results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{LotteryError, Result};
use crate::numeric::pairwise_sum;
use crate::params::InstanceParams;

pub type SimRng = Xoshiro256PlusPlus;

const SPLITMIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed of trial `trial` under master seed `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    splitmix64_mix(seed.wrapping_add(SPLITMIX_GAMMA.wrapping_mul(trial.wrapping_add(1))))
}

/// Monte Carlo estimate of the expected final density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Final tracked-ticket count after `inst.t` draws. Each draw removes a
/// tracked ticket with probability `S/(N+S)`.
pub fn simulate_trajectory(inst: &InstanceParams, seed: u64) -> u64 {
    let mut rng = SimRng::seed_from_u64(seed);
    run_trajectory(inst, &mut rng)
}

fn run_trajectory(inst: &InstanceParams, rng: &mut SimRng) -> u64 {
    let mut s = inst.s0;
    for _ in 0..inst.t {
        if s == 0 {
            break;
        }
        // Uniform ticket among N + S; the first S indices are the tracked ones.
        if rng.gen_range(0..inst.n + s) < s {
            s -= 1;
        }
    }
    s
}

pub fn monte_carlo_m(inst: &InstanceParams, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials == 0 {
        return Err(LotteryError::Invalid("trials must be at least 1".into()));
    }
    let n = inst.n as f64;
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = simulate_trajectory(inst, trial_seed(seed, i)) as f64;
            s / (n + s)
        })
        .collect();

    let count = trials as f64;
    let mean = pairwise_sum(&samples) / count;
    let std_error = if trials > 1 {
        let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&sq) / (count - 1.0) / count).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_error,
        trials,
        seed,
    })
}

/// Set-level simulation: tickets `1..=2*n_half`, the odd ones tracked. Each
/// draw picks a live ticket uniformly; tracked tickets are removed when drawn,
/// untracked ones stay. Returns the number of tracked tickets left.
pub fn simulate_set_lottery(n_half: u64, t: u64, seed: u64) -> Result<u64> {
    if n_half == 0 {
        return Err(LotteryError::domain("N_half", 0.0, "N_half >= 1"));
    }
    let total =
        usize::try_from(2 * n_half).map_err(|_| LotteryError::Overflow { what: "2 * N_half" })?;
    let mut rng = SimRng::seed_from_u64(seed);
    let mut live: Vec<u64> = (1..=total as u64).collect();
    let mut tracked = vec![false; total + 1];
    for x in (1..=total).step_by(2) {
        tracked[x] = true;
    }
    let mut remaining = n_half;
    for _ in 0..t {
        if remaining == 0 {
            break;
        }
        let idx = rng.gen_range(0..live.len());
        let x = live[idx] as usize;
        if tracked[x] {
            tracked[x] = false;
            live.swap_remove(idx);
            remaining -= 1;
        }
    }
    Ok(remaining)
}

/// Outcome of a chi-squared test that two count histograms share a distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homogeneity {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Chi-squared homogeneity test on two histograms over the same outcomes.
/// Adjacent outcomes are pooled until every expected count is at least 5.
pub fn homogeneity_test(a: &[u64], b: &[u64]) -> Result<Homogeneity> {
    if a.len() != b.len() {
        return Err(LotteryError::Invalid(format!(
            "histograms differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(LotteryError::Invalid("empty histogram".into()));
    }
    let total = (na + nb) as f64;
    let min_share = 5.0 / (na.min(nb) as f64 / total);

    let mut cells: Vec<(u64, u64)> = Vec::new();
    let mut pending = (0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        pending = (pending.0 + x, pending.1 + y);
        if (pending.0 + pending.1) as f64 >= min_share {
            cells.push(pending);
            pending = (0, 0);
        }
    }
    if pending.0 + pending.1 > 0 {
        match cells.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => cells.push(pending),
        }
    }
    if cells.len() < 2 {
        return Ok(Homogeneity {
            statistic: 0.0,
            dof: 0,
            p_value: 1.0,
        });
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(x, y)| {
            let col = (x + y) as f64;
            let ea = col * na as f64 / total;
            let eb = col * nb as f64 / total;
            (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb
        })
        .sum();
    let dof = cells.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| LotteryError::Invalid(e.to_string()))?;
    Ok(Homogeneity {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}
