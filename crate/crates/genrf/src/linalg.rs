//! Shared dense linear algebra: the covariate projection, least squares,
//! rank checks, and symmetric eigenvalue extraction.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::{real, Real};

/// Ratio of smallest to largest singular value below which a design matrix
/// is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// True when the smallest singular value stays above `RANK_TOL` times the
/// largest (full column rank, numerically).
pub fn full_column_rank<R: Real>(m: &DMatrix<R>) -> bool {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().fold(R::zero(), |a, s| a.max(*s));
    if largest == R::zero() {
        return false;
    }
    let smallest = sv.iter().fold(largest, |a, s| a.min(*s));
    sv.len() == m.ncols() && smallest > real::<R>(RANK_TOL) * largest
}

/// Residual-maker B = I - X (X'X)^-1 X', computed from the thin QR of X so
/// the normal equations are never formed. B is symmetric and idempotent with
/// trace n - q.
pub fn projection_matrix<R: Real>(x: &DMatrix<R>) -> Result<DMatrix<R>, Error> {
    let n = x.nrows();
    let qr = x.clone().qr();
    let r = qr.r();
    let mut largest = R::zero();
    for i in 0..r.nrows().min(r.ncols()) {
        largest = largest.max(r[(i, i)].abs());
    }
    for i in 0..r.nrows().min(r.ncols()) {
        if !(r[(i, i)].abs() > real::<R>(RANK_TOL) * largest) {
            return Err(Error::RankDeficient { tol: RANK_TOL });
        }
    }
    let q = qr.q();
    let mut b = DMatrix::<R>::identity(n, n) - &q * q.transpose();
    // Force exact symmetry so the eigensolver sees a symmetric matrix.
    symmetrize(&mut b);
    Ok(b)
}

/// Least-squares coefficients (X'X)^-1 X' y via the thin QR of X.
pub fn least_squares<R: Real>(x: &DMatrix<R>, y: &DVector<R>) -> Result<DVector<R>, Error> {
    let qr = x.clone().qr();
    qr.solve(y)
        .ok_or(Error::RankDeficient { tol: RANK_TOL })
        .map(|m| DVector::from_column_slice(m.as_slice()))
}

pub fn symmetrize<R: Real>(m: &mut DMatrix<R>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)]) * real(0.5);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Eigenvalues of a symmetric matrix, descending. Errors if the solve
/// produces non-finite values.
pub fn symmetric_eigenvalues_desc<R: Real>(m: &DMatrix<R>) -> Result<Vec<R>, Error> {
    let ev = m.clone().symmetric_eigenvalues();
    let mut vals: Vec<R> = ev.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigenvalue decomposition produced non-finite values".into()));
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_design(n: usize, q: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, q, |_, j| if j == 0 { 1.0 } else { rng.random::<f64>() * 2.0 - 1.0 })
    }

    #[test]
    fn intercept_only_projection_is_centering() {
        let x = DMatrix::from_element(2, 1, 1.0);
        let b = projection_matrix(&x).unwrap();
        let expect = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((b[(i, j)] - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn projection_annihilates_design_and_is_idempotent() {
        let x = random_design(12, 3, 1);
        let b = projection_matrix(&x).unwrap();
        let bx = &b * &x;
        assert!(bx.amax() < 1e-9 * x.amax());
        let b2 = &b * &b;
        assert!((b2 - &b).amax() < 1e-10);
    }

    #[test]
    fn projection_trace_matches_hat_matrix_oracle() {
        // Independent construction through explicit normal equations.
        let x = random_design(8, 3, 42);
        let xtx = x.transpose() * &x;
        let hat = &x * xtx.try_inverse().unwrap() * x.transpose();
        let b_oracle = DMatrix::<f64>::identity(8, 8) - hat;
        let b = projection_matrix(&x).unwrap();
        assert!((&b - &b_oracle).amax() < 1e-10);
        assert!((b.trace() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn rank_deficient_design_rejected() {
        let mut x = random_design(10, 2, 3);
        let dup = x.column(1).into_owned();
        x = DMatrix::from_columns(&[x.column(0).into_owned(), dup.clone(), dup]);
        assert!(!full_column_rank(&x));
        assert!(projection_matrix(&x).is_err());
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let x = random_design(30, 3, 9);
        let truth = DVector::from_column_slice(&[0.7, -1.3, 2.1]);
        let y = &x * &truth;
        let fit = least_squares(&x, &y).unwrap();
        assert!((fit - truth).amax() < 1e-10);
    }

    #[test]
    fn eigenvalues_sorted_descending() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let ev = symmetric_eigenvalues_desc(&m).unwrap();
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = ev.iter().sum();
        assert!((trace - 6.0).abs() < 1e-12);
    }
}
