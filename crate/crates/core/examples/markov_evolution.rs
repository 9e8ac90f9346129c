// Exact distribution of the tracked count, in rationals and in floats.

use finetti::markov::{evolve, expected_density, m_exact, NumericMode, StateVector};
use finetti::params::{instantiate, InstanceParams, ScaledParams};
use num_rational::BigRational;

fn main() -> finetti::error::Result<()> {
    let inst = InstanceParams::from_counts(2, 2, 2)?;
    let exact: StateVector<BigRational> = evolve(&inst);
    for (k, p) in exact.probs().iter().enumerate() {
        println!("P(S = {k}) = {p}");
    }
    println!("m = {}", expected_density(&exact));

    println!();
    println!("{:>6} {:>8} {:>8} {:>20}", "N", "S0", "T", "m_N");
    let s = ScaledParams::new(1.0, 2.0)?;
    for n in [1, 4, 16, 64, 256, 1024] {
        let inst = instantiate(s, n)?;
        println!(
            "{n:>6} {:>8} {:>8} {:>20.16}",
            inst.s0,
            inst.t,
            m_exact(&inst, NumericMode::Float64)?
        );
    }
    Ok(())
}
