//! The finitely-iterated lottery as a Markov chain on the number `k` of
//! tracked tickets still in play.
//!
//! From state `k` a draw hits a tracked ticket with probability `k/(N+k)` and
//! the chain moves to `k-1`; otherwise it stays. The exact evolution here is
//! the ground truth every other evaluation path is checked against.

mod simulate;

pub use simulate::{
    homogeneity_test, monte_carlo_m, simulate_set_lottery, simulate_trajectory, trial_seed,
    Homogeneity, McEstimate, SimRng,
};

use num_rational::BigRational;

use crate::error::{LotteryError, Result};
use crate::numeric::Field;
use crate::params::InstanceParams;

/// Largest `N` accepted by exact-rational evaluation.
pub const RATIONAL_MAX_N: u64 = 64;
/// Largest step count accepted by exact-rational evaluation.
pub const RATIONAL_MAX_T: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NumericMode {
    #[default]
    Float64,
    ExactRational,
}

impl NumericMode {
    /// Cost guard for the exact-rational mode; float mode always passes.
    pub fn check_cost(self, n: u64, t: u64) -> Result<()> {
        match self {
            NumericMode::Float64 => Ok(()),
            NumericMode::ExactRational if n <= RATIONAL_MAX_N && t <= RATIONAL_MAX_T => Ok(()),
            NumericMode::ExactRational => Err(LotteryError::CostGuard {
                n,
                t,
                max_n: RATIONAL_MAX_N,
                max_t: RATIONAL_MAX_T,
            }),
        }
    }
}

/// Distribution of the tracked-ticket count. `probs[k]` is `P(S = k)` for
/// `k = 0..=K`; the support bound `K` is fixed at construction because the
/// chain never moves up.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T = f64> {
    n: u64,
    probs: Vec<T>,
}

impl<T: Field> StateVector<T> {
    pub fn point_mass(n: u64, k: u64) -> Self {
        let mut probs = vec![T::zero(); k as usize + 1];
        probs[k as usize] = T::one();
        Self { n, probs }
    }

    /// Wrap an explicit distribution. Entries must be non-negative.
    pub fn from_probs(n: u64, probs: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(LotteryError::domain("N", 0.0, "N >= 1"));
        }
        if probs.is_empty() || probs.iter().any(|p| p.is_negative()) {
            return Err(LotteryError::Invalid(
                "state vector needs at least one entry and no negative probabilities".into(),
            ));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn support_bound(&self) -> u64 {
        self.probs.len() as u64 - 1
    }

    pub fn prob(&self, k: u64) -> T {
        self.probs.get(k as usize).cloned().unwrap_or_else(T::zero)
    }

    pub fn total_mass(&self) -> T {
        self.probs.iter().fold(T::zero(), |acc, p| acc + p.clone())
    }

    pub fn to_f64(&self) -> StateVector<f64> {
        StateVector {
            n: self.n,
            probs: self.probs.iter().map(Field::lossy_f64).collect(),
        }
    }
}

/// Per-state stay probabilities `N/(N+k)` and move probabilities `k/(N+k)`.
struct Kernel<T> {
    stay: Vec<T>,
    leave: Vec<T>,
}

impl<T: Field> Kernel<T> {
    fn new(n: u64, bound: u64) -> Self {
        let stay = (0..=bound).map(|k| T::ratio(n, n + k)).collect();
        let leave = (0..=bound).map(|k| T::ratio(k, n + k)).collect();
        Self { stay, leave }
    }

    /// One step in place. Ascending `k` reads `probs[k+1]` before it is
    /// overwritten, so no scratch buffer is needed.
    fn apply(&self, probs: &mut [T]) {
        let last = probs.len() - 1;
        for k in 0..last {
            let inflow = probs[k + 1].clone() * self.leave[k + 1].clone();
            probs[k] = probs[k].clone() * self.stay[k].clone() + inflow;
        }
        probs[last] = probs[last].clone() * self.stay[last].clone();
    }
}

/// One application of the transition matrix.
pub fn transition_step<T: Field>(state: &StateVector<T>) -> StateVector<T> {
    let kernel = Kernel::new(state.n, state.support_bound());
    let mut next = state.clone();
    kernel.apply(&mut next.probs);
    next
}

/// Distribution after `inst.t` draws, starting from all mass on `inst.s0`.
pub fn evolve<T: Field>(inst: &InstanceParams) -> StateVector<T> {
    let mut state = StateVector::point_mass(inst.n, inst.s0);
    let kernel = Kernel::new(inst.n, inst.s0);
    for _ in 0..inst.t {
        if state.probs[0] == T::one() {
            break;
        }
        kernel.apply(&mut state.probs);
    }
    state
}

pub fn evolve_exact(inst: &InstanceParams, mode: NumericMode) -> Result<StateVector<f64>> {
    mode.check_cost(inst.n, inst.t)?;
    Ok(match mode {
        NumericMode::Float64 => evolve::<f64>(inst),
        NumericMode::ExactRational => evolve::<BigRational>(inst).to_f64(),
    })
}

/// `E[k/(N+k)]` under the given distribution.
pub fn expected_density<T: Field>(state: &StateVector<T>) -> T {
    let n = state.n;
    state
        .probs
        .iter()
        .enumerate()
        .skip(1)
        .fold(T::zero(), |acc, (k, p)| {
            acc + p.clone() * T::ratio(k as u64, n + k as u64)
        })
}

/// Expected final density by dynamic programming over the chain.
pub fn m_exact(inst: &InstanceParams, mode: NumericMode) -> Result<f64> {
    mode.check_cost(inst.n, inst.t)?;
    Ok(match mode {
        NumericMode::Float64 => expected_density(&evolve::<f64>(inst)),
        NumericMode::ExactRational => expected_density(&evolve::<BigRational>(inst)).lossy_f64(),
    })
}

/// Exact-rational expected final density.
pub fn m_exact_rational(inst: &InstanceParams) -> Result<BigRational> {
    NumericMode::ExactRational.check_cost(inst.n, inst.t)?;
    Ok(expected_density(&evolve::<BigRational>(inst)))
}
