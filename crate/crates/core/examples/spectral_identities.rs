// Truncated eigen-decomposition of the transition matrix, checked exactly.

use finetti::markov::NumericMode;
use finetti::spectral::{
    eigenvalue, verify_eigen_residual, verify_inverse_identity, TruncatedMatrix,
};
use num_rational::BigRational;

fn main() -> finetti::error::Result<()> {
    let n = 2;
    let v = TruncatedMatrix::<BigRational>::eigenvectors(n, 4);
    let vinv = TruncatedMatrix::<BigRational>::inverse_eigenvectors(n, 4);
    println!(
        "eigenvalues: {:?}",
        (0..=4).map(|k| eigenvalue(n, k)).collect::<Vec<_>>()
    );
    println!("V (N = {n}):");
    for r in 0..v.dim() {
        let row: Vec<String> = (0..v.dim())
            .map(|c| format!("{:>8}", v.get(r, c).to_string()))
            .collect();
        println!("  {}", row.join(" "));
    }
    let id = vinv.mul(&v);
    println!(
        "Vinv V is the identity: {}",
        (0..id.dim()).all(|i| {
            (0..id.dim()).all(|j| *id.get(i, j) == BigRational::from_integer((i == j).into()))
        })
    );

    println!();
    for n in [1, 2, 3, 5, 10] {
        println!(
            "N = {n:>2}: eigen residual exact {} float {:.1e}, inverse residual exact {} float {:.1e}",
            verify_eigen_residual(n, 16, NumericMode::ExactRational)?,
            verify_eigen_residual(n, 16, NumericMode::Float64)?,
            verify_inverse_identity(n, 16, NumericMode::ExactRational)?,
            verify_inverse_identity(n, 16, NumericMode::Float64)?,
        );
    }
    Ok(())
}
