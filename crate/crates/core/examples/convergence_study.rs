//! Convergence of `m_N` to its limit, with and without the ratio-test condition.
//!
//! Writes the CSV to stdout and, given a path argument, an SVG chart.
//!
//! ```text
//! cargo run --release --example convergence_study -- study.svg
//! ```

use std::io;

use finetti::harness::{render_svg, run_study, write_records, Method, MethodOptions, StudyConfig};

fn main() -> finetti::error::Result<()> {
    let config = StudyConfig {
        p_list: vec![0.5],
        alpha_list: vec![0.75, 1.0, 1.5],
        n_list: vec![16, 32, 64, 128, 256, 512, 1024, 2048],
        methods: vec![Method::Dp],
        options: MethodOptions::default(),
    };
    let rows = run_study(&config)?;
    write_records(io::stdout().lock(), &rows, true)?;

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, render_svg(&rows))?;
        eprintln!("chart written to {path}");
    }
    Ok(())
}
