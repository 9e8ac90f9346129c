//! Partial sums of the tree series against `W(z)/(1+W(z))`.

use finetti::limits::{lambert_w0, tree_series, w_ratio};

fn main() -> finetti::error::Result<()> {
    let edge = (-1.0f64).exp();
    for z in [0.05, 0.2, 0.35, edge * 0.999, edge, 0.5] {
        let s = tree_series(z, 1e-12, 1_000_000);
        let w = lambert_w0(z)?;
        println!(
            "z = {z:.6}  W = {:.12} (residual {:.1e})  W/(1+W) = {:.12}  series = {:.12} after {} terms, converged {}",
            w.w,
            w.residual,
            w_ratio(z)?,
            s.value,
            s.terms_used,
            s.converged
        );
    }
    Ok(())
}
