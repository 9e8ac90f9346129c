use finetti::markov::{m_exact, monte_carlo_m, simulate_set_lottery, NumericMode};
use finetti::params::{instantiate, ScaledParams};

fn main() -> finetti::error::Result<()> {
    let inst = instantiate(ScaledParams::new(1.0, 1.0)?, 100)?;
    let exact = m_exact(&inst, NumericMode::Float64)?;
    for trials in [1_000, 10_000, 100_000] {
        let est = monte_carlo_m(&inst, trials, 42)?;
        println!(
            "{trials:>7} trials: {:.6} +- {:.6}  (exact {exact:.6}, {:+.2} s.e.)",
            est.mean,
            est.std_error,
            (est.mean - exact) / est.std_error
        );
    }

    // Literal tickets 1..=10, odd ones tracked, 10 draws.
    let left: Vec<u64> = (0..8)
        .map(|seed| simulate_set_lottery(5, 10, seed))
        .collect::<Result<_, _>>()?;
    println!("tracked tickets left in eight set-level runs: {left:?}");
    Ok(())
}
