//! Limit densities for half the numbers tracked.
//!
//! ```text
//! cargo run --example reported_constants
//! ```

use finetti::limits::{mu_ratio, mu_series, sufficient_condition};
use finetti::params::{to_scaled, RatioParams};

fn main() -> finetti::error::Result<()> {
    for alpha in [1.0, 0.5, 1.5] {
        let mu = mu_ratio(0.5, alpha)?;
        let s = to_scaled(RatioParams::new(0.5, alpha)?)?;
        let series = mu_series(s.pi, s.beta, 1e-12)?;
        let tail = if series.converged {
            format!(
                "series {:.6} after {} terms",
                series.value, series.terms_used
            )
        } else {
            format!(
                "series not convergent (stopped after {} terms)",
                series.terms_used
            )
        };
        println!(
            "p = 0.5, alpha = {alpha}: mu = {mu:.6}  condition {}  {tail}",
            sufficient_condition(0.5, alpha)?
        );
    }
    Ok(())
}
