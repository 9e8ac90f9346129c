//! The alternating binomial sum next to the chain it solves.
//!
//! The terms cancel hard once `pi` is large; `condition` reports how hard and
//! `path` says whether plain compensated summation was enough.

use finetti::markov::{m_exact, NumericMode};
use finetti::params::{instantiate, ScaledParams};
use finetti::spectral::{closed_form_terms, evaluate_closed_form};

fn main() -> finetti::error::Result<()> {
    let inst = instantiate(ScaledParams::new(1.0, 1.0)?, 6)?;
    for t in closed_form_terms(&inst) {
        println!("k = {}  term = {:+.12}", t.k, t.value.to_f64());
    }

    println!();
    for (pi, beta) in [(0.5, 2.0), (1.0, 1.0), (2.0, 0.5)] {
        for n in [10, 50, 200] {
            let inst = instantiate(ScaledParams::new(pi, beta)?, n)?;
            let eval = evaluate_closed_form(&inst, NumericMode::Float64)?;
            let dp = m_exact(&inst, NumericMode::Float64)?;
            println!(
                "pi={pi} beta={beta} N={n:>3}: {:.15}  |diff| {:.1e}  condition {:.1e}  {:?}",
                eval.value,
                (eval.value - dp).abs(),
                eval.condition,
                eval.path
            );
        }
    }
    Ok(())
}
