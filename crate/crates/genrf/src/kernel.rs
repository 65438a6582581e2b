//! Weighted identity-by-state similarity between subjects.
//!
//! A pair of subjects scores, per variant, the number of alleles they share
//! (2, 1, or 0), scaled by the variant weight; the pairwise score is the sum
//! over variants. The similarity matrix holds those scores off the diagonal
//! and zeros on the diagonal.

use nalgebra::DMatrix;

use crate::data::{GenotypeMatrix, WeightVector};
use crate::error::Error;
use crate::{real, Real};

/// n x n symmetric similarity matrix with a zero diagonal and off-diagonal
/// entries in [0, 2 * sum(w)].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<R: Real> {
    s: DMatrix<R>,
}

impl<R: Real> SimilarityMatrix<R> {
    /// Validate an externally built matrix: symmetric, zero diagonal,
    /// nonnegative finite entries.
    pub fn from_matrix(s: DMatrix<R>) -> Result<Self, Error> {
        if s.nrows() != s.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "similarity matrix is {} x {}",
                s.nrows(),
                s.ncols()
            )));
        }
        for i in 0..s.nrows() {
            if s[(i, i)] != R::zero() {
                return Err(Error::InvalidInput("similarity diagonal must be zero".into()));
            }
            for j in (i + 1)..s.ncols() {
                let v = s[(i, j)];
                if !v.is_finite() || v < R::zero() || v != s[(j, i)] {
                    return Err(Error::InvalidInput(
                        "similarity must be symmetric, finite, and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(Self { s })
    }

    pub(crate) fn from_matrix_unchecked(s: DMatrix<R>) -> Self {
        Self { s }
    }

    pub fn matrix(&self) -> &DMatrix<R> {
        &self.s
    }

    pub fn n(&self) -> usize {
        self.s.nrows()
    }
}

/// Shared-allele score of one subject pair: sum_k w_k * (2 - |g_ik - g_jk|).
/// With unit weights this counts shared alleles across the region, so a
/// single locus scores 2 for identical genotypes, 1 for one shared allele,
/// and 0 for opposite homozygotes.
pub fn ibs_pair<R: Real>(g_i: &[u8], g_j: &[u8], w: &WeightVector<R>) -> Result<R, Error> {
    if g_i.len() != g_j.len() || g_i.len() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "ibs_pair lengths: {} vs {} with {} weights",
            g_i.len(),
            g_j.len(),
            w.len()
        )));
    }
    let two: R = real(2.0);
    let mut acc = R::zero();
    for ((a, b), wk) in g_i.iter().zip(g_j.iter()).zip(w.as_slice().iter()) {
        let shared = two - real::<R>((*a as i32 - *b as i32).abs() as f64);
        acc += *wk * shared;
    }
    Ok(acc)
}

/// Pairwise similarity over all subjects; the diagonal is forced to zero.
pub fn similarity_matrix<R: Real>(
    geno: &GenotypeMatrix,
    w: &WeightVector<R>,
) -> Result<SimilarityMatrix<R>, Error> {
    if w.len() != geno.n_variants() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} variants",
            w.len(),
            geno.n_variants()
        )));
    }
    let n = geno.n_subjects();
    let mut s = DMatrix::<R>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = ibs_pair(geno.row(i), geno.row(j), w)?;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(SimilarityMatrix::from_matrix_unchecked(s))
}
