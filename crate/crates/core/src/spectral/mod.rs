//! Analytic eigen-structure of the transition matrix `M_N` and the closed-form
//! expected density built from it.
//!
//! Matrices use the chain's column convention: `M(j, k)` is the probability of
//! moving from state `k` to state `j`, and column `k` of `V` is the eigenvector
//! for eigenvalue `N/(N+k)`. In that convention `M` is upper bidiagonal and
//! both `V` and its inverse are upper triangular.

mod closed_form;
mod signed_log;

pub use closed_form::{
    closed_form_m, closed_form_rational, closed_form_term, closed_form_terms, evaluate_closed_form,
    ClosedFormEvaluation, ClosedFormTerm, SummationPath,
};
pub use signed_log::SignedLogValue;

use num_rational::BigRational;
use num_traits::pow;
use statrs::function::factorial::ln_binomial;

use crate::error::{LotteryError, Result};
use crate::markov::NumericMode;
use crate::numeric::{binomial, Field};

/// Largest truncation accepted by [`verify_eigen_residual`].
pub const EIGEN_MAX_TRUNCATION: usize = 64;
/// Largest truncation accepted by [`verify_inverse_identity`].
pub const INVERSE_MAX_TRUNCATION: usize = 32;
/// Above this truncation the inverse check must run in exact arithmetic.
pub const INVERSE_MAX_FLOAT_TRUNCATION: usize = 16;

/// `N/(N+k)`.
pub fn eigenvalue(n: u64, k: u64) -> f64 {
    eigenvalue_in::<f64>(n, k)
}

pub fn eigenvalue_in<T: Field>(n: u64, k: u64) -> T {
    T::ratio(n, n + k)
}

fn alternating<T: Field>(parity: u64, x: T) -> T {
    if parity.is_multiple_of(2) {
        x
    } else {
        -x
    }
}

/// Entry `row` of the eigenvector for eigenvalue `N/(N+k)`, normalized so the
/// entry at `row = k` is one:
/// `(-1)^(k-row) ((N+k)/N)^(k-row) (N+row)/(N+k) C(k, row)`, zero below the diagonal.
pub fn eigenvector_entry<T: Field>(n: u64, k: u64, row: u64) -> T {
    if row > k {
        return T::zero();
    }
    let d = k - row;
    let mag =
        pow(T::ratio(n + k, n), d as usize) * T::ratio(n + row, n + k) * binomial::<T>(k, row);
    alternating(d, mag)
}

/// Same entry in signed-log form, for indices where the magnitude overflows.
pub fn eigenvector_entry_log(n: u64, k: u64, row: u64) -> SignedLogValue {
    if row > k {
        return SignedLogValue::ZERO;
    }
    let d = k - row;
    let (nf, kf, rf) = (n as f64, k as f64, row as f64);
    let log_mag = d as f64 * (kf / nf).ln_1p() + ((nf + rf) / (nf + kf)).ln() + ln_binomial(k, row);
    SignedLogValue::from_parts(if d.is_multiple_of(2) { 1 } else { -1 }, log_mag)
}

/// Row `row`, column `col` of the inverse eigenvector matrix:
/// `((N+row)/N)^(col-row) C(col, row)` for `col >= row`, zero otherwise.
pub fn inverse_entry<T: Field>(n: u64, row: u64, col: u64) -> T {
    if col < row {
        return T::zero();
    }
    pow(T::ratio(n + row, n), (col - row) as usize) * binomial::<T>(col, row)
}

pub fn inverse_entry_log(n: u64, row: u64, col: u64) -> SignedLogValue {
    if col < row {
        return SignedLogValue::ZERO;
    }
    let log_mag = (col - row) as f64 * (row as f64 / n as f64).ln_1p() + ln_binomial(col, row);
    SignedLogValue::from_parts(1, log_mag)
}

/// Entry `m` of the row vector `nu^T V`, where `nu(k) = k/(N+k)`:
/// `(-1)^(m-1) (m/N)^m N/(N+m)`, and zero at `m = 0`.
pub fn nu_v_entry(n: u64, m: u64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let (nf, mf) = (n as f64, m as f64);
    let log_mag = mf * (mf / nf).ln() - (mf / nf).ln_1p();
    SignedLogValue::from_parts(if m % 2 == 1 { 1 } else { -1 }, log_mag).to_f64()
}

pub fn nu_v_entry_in<T: Field>(n: u64, m: u64) -> T {
    if m == 0 {
        return T::zero();
    }
    alternating(m - 1, pow(T::ratio(m, n), m as usize) * T::ratio(n, n + m))
}

/// A leading `(K+1) x (K+1)` block of one of the infinite matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix<T> {
    n: u64,
    order: usize,
    entries: Vec<T>,
}

impl<T: Field> TruncatedMatrix<T> {
    pub fn from_fn(n: u64, order: usize, f: impl Fn(u64, u64) -> T) -> Self {
        let dim = order + 1;
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r as u64, c as u64));
            }
        }
        Self { n, order, entries }
    }

    /// Transition matrix block: `N/(N+k)` on the diagonal, `k/(N+k)` at `(k-1, k)`.
    pub fn transition(n: u64, order: usize) -> Self {
        Self::from_fn(n, order, |r, c| {
            if r == c {
                T::ratio(n, n + c)
            } else if c > 0 && r == c - 1 {
                T::ratio(c, n + c)
            } else {
                T::zero()
            }
        })
    }

    /// Eigenvector matrix block; column `k` is the `k`-th eigenvector.
    pub fn eigenvectors(n: u64, order: usize) -> Self {
        Self::from_fn(n, order, |r, c| eigenvector_entry(n, c, r))
    }

    pub fn inverse_eigenvectors(n: u64, order: usize) -> Self {
        Self::from_fn(n, order, |r, c| inverse_entry(n, r, c))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Truncation order `K`; the block has `K+1` rows and columns.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        let dim = self.dim();
        self.entries[row * dim + col] = value;
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.dim()).all(|r| (0..r).all(|c| self.get(r, c).is_zero()))
    }

    /// Nonzeros only on the diagonal and first superdiagonal.
    pub fn is_upper_bidiagonal(&self) -> bool {
        (0..self.dim())
            .all(|r| (0..self.dim()).all(|c| c == r || c == r + 1 || self.get(r, c).is_zero()))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "block sizes differ");
        let dim = self.dim();
        let mut entries = vec![T::zero(); dim * dim];
        for r in 0..dim {
            for m in 0..dim {
                let a = self.get(r, m);
                if a.is_zero() {
                    continue;
                }
                for c in 0..dim {
                    let b = rhs.get(m, c);
                    if !b.is_zero() {
                        entries[r * dim + c] = entries[r * dim + c].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Self {
            n: self.n,
            order: self.order,
            entries,
        }
    }
}

fn max_abs<T: Field>(values: impl Iterator<Item = T>) -> T {
    values
        .map(|v| v.abs())
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

/// `max_k ||M V_k - lambda_k V_k||_inf / ||V_k||_inf` over the columns of the
/// block. Exact arithmetic gives exactly zero; in floats the column scaling
/// keeps the number meaningful although entries grow like `((N+K)/N)^K`.
pub fn eigen_residual<T: Field>(m: &TruncatedMatrix<T>, v: &TruncatedMatrix<T>) -> f64 {
    let dim = m.dim();
    let mut worst = 0.0f64;
    for k in 0..dim {
        let lambda = eigenvalue_in::<T>(m.n(), k as u64);
        let residual = max_abs((0..dim).map(|r| {
            let mv = (0..dim).fold(T::zero(), |acc, j| {
                let a = m.get(r, j);
                if a.is_zero() {
                    acc
                } else {
                    acc + a.clone() * v.get(j, k).clone()
                }
            });
            mv - lambda.clone() * v.get(r, k).clone()
        }));
        let scale = max_abs((0..dim).map(|r| v.get(r, k).clone()));
        if !residual.is_zero() {
            worst = worst.max((residual / scale).lossy_f64());
        }
    }
    worst
}

/// `max_{i,j} |(Vinv V)(i,j) - delta_ij| / sum_m |Vinv(i,m)| |V(m,j)|`.
/// Triangularity makes the truncated product exact, so this is zero in exact
/// arithmetic.
pub fn inverse_residual<T: Field>(inverse: &TruncatedMatrix<T>, v: &TruncatedMatrix<T>) -> f64 {
    let dim = v.dim();
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut sum = T::zero();
            let mut scale = T::zero();
            for m in 0..dim {
                let prod = inverse.get(i, m).clone() * v.get(m, j).clone();
                scale = scale + prod.abs();
                sum = sum + prod;
            }
            let deviation = if i == j { sum - T::one() } else { sum };
            if !deviation.is_zero() {
                let scale = if scale.is_zero() { T::one() } else { scale };
                worst = worst.max((deviation.abs() / scale).lossy_f64());
            }
        }
    }
    worst
}

/// Check `M V_k = lambda_k V_k` on the `(K+1) x (K+1)` block, `1 <= K <= 64`.
pub fn verify_eigen_residual(n: u64, order: usize, mode: NumericMode) -> Result<f64> {
    check_n(n)?;
    if !(1..=EIGEN_MAX_TRUNCATION).contains(&order) {
        return Err(LotteryError::Invalid(format!(
            "eigen truncation must be in 1..={EIGEN_MAX_TRUNCATION}, got {order}"
        )));
    }
    Ok(match mode {
        NumericMode::Float64 => eigen_residual(
            &TruncatedMatrix::<f64>::transition(n, order),
            &TruncatedMatrix::eigenvectors(n, order),
        ),
        NumericMode::ExactRational => eigen_residual(
            &TruncatedMatrix::<BigRational>::transition(n, order),
            &TruncatedMatrix::eigenvectors(n, order),
        ),
    })
}

/// Check that the closed-form inverse is a left inverse of `V` on the block.
pub fn verify_inverse_identity(n: u64, order: usize, mode: NumericMode) -> Result<f64> {
    check_n(n)?;
    if !(1..=INVERSE_MAX_TRUNCATION).contains(&order) {
        return Err(LotteryError::Invalid(format!(
            "inverse truncation must be in 1..={INVERSE_MAX_TRUNCATION}, got {order}"
        )));
    }
    Ok(match mode {
        NumericMode::Float64 if order > INVERSE_MAX_FLOAT_TRUNCATION => {
            return Err(LotteryError::Invalid(format!(
                "inverse truncation above {INVERSE_MAX_FLOAT_TRUNCATION} requires exact rational mode"
            )))
        }
        NumericMode::Float64 => inverse_residual(
            &TruncatedMatrix::<f64>::inverse_eigenvectors(n, order),
            &TruncatedMatrix::eigenvectors(n, order),
        ),
        NumericMode::ExactRational => inverse_residual(
            &TruncatedMatrix::<BigRational>::inverse_eigenvectors(n, order),
            &TruncatedMatrix::eigenvectors(n, order),
        ),
    })
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(LotteryError::domain("N", 0.0, "N >= 1"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(7, 0), 1.0);
        assert_eq!(eigenvalue(2, 2), 0.5);
        assert_eq!(eigenvalue(1000, 1), 1000.0 / 1001.0);
        assert_eq!(eigenvalue_in::<Q>(2, 2), rational(1, 2));
    }

    #[test]
    fn eigenvector_examples() {
        for n in [1, 2, 9] {
            for k in 0..6 {
                assert!(eigenvector_entry::<Q>(n, k, k).is_one());
                assert!(eigenvector_entry::<Q>(n, k, k + 1).is_zero());
            }
        }
        assert_eq!(eigenvector_entry::<Q>(2, 1, 0), -Q::one());
    }

    #[test]
    fn inverse_examples() {
        for n in [1, 2, 9] {
            for k in 0..6 {
                assert!(inverse_entry::<Q>(n, k, k).is_one());
            }
        }
        assert!(inverse_entry::<Q>(2, 0, 1).is_one());
        assert!(inverse_entry::<Q>(4, 3, 1).is_zero());
    }

    #[test]
    fn log_entries_agree_with_exact() {
        for n in [1u64, 3, 10] {
            for k in 0..12u64 {
                for r in 0..14u64 {
                    let exact = eigenvector_entry::<Q>(n, k, r).lossy_f64();
                    let log = eigenvector_entry_log(n, k, r).to_f64();
                    assert!(
                        (exact - log).abs() <= 1e-12 * exact.abs(),
                        "V({r},{k}) N={n}"
                    );
                    let exact = inverse_entry::<Q>(n, r, k).lossy_f64();
                    let log = inverse_entry_log(n, r, k).to_f64();
                    assert!(
                        (exact - log).abs() <= 1e-12 * exact.abs(),
                        "Vinv({r},{k}) N={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn nu_v_examples() {
        assert_eq!(nu_v_entry(5, 0), 0.0);
        assert!((nu_v_entry(1, 1) - 0.5).abs() < 1e-15);
        assert!((nu_v_entry(2, 2) + 0.5).abs() < 1e-15);
        assert_eq!(nu_v_entry_in::<Q>(2, 2), rational(1, 2) * -Q::one());
    }

    #[test]
    fn nu_v_matches_direct_product() {
        for n in [1u64, 2, 5, 13] {
            for m in 0..=16u64 {
                let direct = (0..=m).fold(Q::zero(), |acc, k| {
                    acc + rational(k, n + k) * eigenvector_entry::<Q>(n, m, k)
                });
                assert_eq!(direct, nu_v_entry_in::<Q>(n, m), "N={n} m={m}");
                assert!(
                    (nu_v_entry(n, m) - direct.lossy_f64()).abs()
                        <= 1e-13 * direct.lossy_f64().abs().max(1e-300)
                );
            }
        }
    }

    #[test]
    fn matrix_shapes() {
        let m = TruncatedMatrix::<Q>::transition(3, 10);
        assert!(m.is_upper_bidiagonal());
        // Columns are probability distributions.
        for c in 0..m.dim() {
            let s = (0..m.dim()).fold(Q::zero(), |a, r| a + m.get(r, c).clone());
            assert!(s.is_one());
        }
        assert!(TruncatedMatrix::<Q>::eigenvectors(3, 10).is_upper_triangular());
        assert!(TruncatedMatrix::<Q>::inverse_eigenvectors(3, 10).is_upper_triangular());
    }

    #[test]
    fn eigen_residual_examples() {
        assert_eq!(
            verify_eigen_residual(1, 8, NumericMode::ExactRational).unwrap(),
            0.0
        );
        assert_eq!(
            verify_eigen_residual(10, 32, NumericMode::ExactRational).unwrap(),
            0.0
        );
        assert!(verify_eigen_residual(3, 16, NumericMode::Float64).unwrap() <= 1e-12);
        assert!(verify_eigen_residual(3, 0, NumericMode::Float64).is_err());
        assert!(verify_eigen_residual(3, 65, NumericMode::Float64).is_err());
    }

    #[test]
    fn inverse_identity_examples() {
        assert_eq!(
            verify_inverse_identity(2, 8, NumericMode::ExactRational).unwrap(),
            0.0
        );
        assert_eq!(
            verify_inverse_identity(1, 16, NumericMode::ExactRational).unwrap(),
            0.0
        );
        assert!(verify_inverse_identity(5, 12, NumericMode::Float64).unwrap() <= 1e-9);
        assert!(verify_inverse_identity(5, 17, NumericMode::Float64).is_err());
        assert_eq!(
            verify_inverse_identity(4, 32, NumericMode::ExactRational).unwrap(),
            0.0
        );
        assert!(verify_inverse_identity(4, 33, NumericMode::ExactRational).is_err());
    }

    #[test]
    fn corrupted_eigenvector_is_detected() {
        let m = TruncatedMatrix::<Q>::transition(2, 6);
        let mut v = TruncatedMatrix::<Q>::eigenvectors(2, 6);
        let flipped = -v.get(0, 1).clone();
        v.set(0, 1, flipped);
        assert!(eigen_residual(&m, &v) > 0.1);
    }

    #[test]
    fn decomposition_reproduces_matrix_power() {
        // M^t = V diag(lambda^t) Vinv on the block, exactly.
        let (n, order, t) = (3u64, 7usize, 5usize);
        let m = TruncatedMatrix::<Q>::transition(n, order);
        let v = TruncatedMatrix::<Q>::eigenvectors(n, order);
        let vinv = TruncatedMatrix::<Q>::inverse_eigenvectors(n, order);
        let lambda_t = TruncatedMatrix::from_fn(n, order, |r, c| {
            if r == c {
                pow(eigenvalue_in::<Q>(n, r), t)
            } else {
                Q::zero()
            }
        });
        let mut power =
            TruncatedMatrix::from_fn(n, order, |r, c| if r == c { Q::one() } else { Q::zero() });
        for _ in 0..t {
            power = m.mul(&power);
        }
        assert_eq!(v.mul(&lambda_t).mul(&vinv), power);
    }
}
