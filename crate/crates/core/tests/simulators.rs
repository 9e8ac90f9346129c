use finetti::markov::{homogeneity_test, simulate_set_lottery, simulate_trajectory, trial_seed};
use finetti::params::InstanceParams;

/// Two-sided 4-sigma tail of a standard normal.
const P_THRESHOLD: f64 = 6.334e-5;
const SAMPLES: u64 = 100_000;

fn histograms(n_half: u64, t: u64) -> (Vec<u64>, Vec<u64>) {
    let inst = InstanceParams::from_counts(n_half, n_half, t).unwrap();
    let mut set = vec![0u64; n_half as usize + 1];
    let mut chain = vec![0u64; n_half as usize + 1];
    for i in 0..SAMPLES {
        set[simulate_set_lottery(n_half, t, trial_seed(1, i)).unwrap() as usize] += 1;
        chain[simulate_trajectory(&inst, trial_seed(2, i)) as usize] += 1;
    }
    (set, chain)
}

#[test]
fn set_and_chain_simulators_agree() {
    for (n_half, t) in [(1, 1), (2, 3), (3, 6), (5, 10)] {
        let (set, chain) = histograms(n_half, t);
        let h = homogeneity_test(&set, &chain).unwrap();
        assert!(h.dof >= 1);
        assert!(h.p_value > P_THRESHOLD, "N_half={n_half} T={t}: {h:?}");
    }
}

#[test]
fn homogeneity_detects_a_shifted_chain() {
    // One extra draw in the chain is a visible difference at this sample size.
    let (set, _) = histograms(3, 4);
    let (_, chain) = histograms(3, 5);
    let h = homogeneity_test(&set, &chain).unwrap();
    assert!(h.p_value < P_THRESHOLD, "{h:?}");
}
