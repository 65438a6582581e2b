//! Comparator tests: the p-degree-of-freedom linear-regression F-test over
//! variant main effects, and a variance-component score test driven by the
//! same identity-by-state kernel (the diagonal is the only difference from
//! the similarity matrix: self-similarity instead of zero).

use nalgebra::{DMatrix, DVector};

use crate::data::{GenotypeMatrix, WeightVector};
use crate::dist::f_sf;
use crate::error::Error;
use crate::kernel::{ibs_pair, similarity_matrix, SimilarityMatrix};
use crate::linalg;
use crate::quadform::{tail_prob_weighted_chisq, MixtureSpec, TailMethod};
use crate::random_field::EIGEN_DROP_RATIO;
use crate::{real, Real};

/// n x n positive-semidefinite kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix<R: Real> {
    k: DMatrix<R>,
}

impl<R: Real> KernelMatrix<R> {
    /// Validate an externally built kernel: symmetric and numerically PSD
    /// (smallest eigenvalue >= -1e-8 times the largest magnitude).
    pub fn from_matrix(k: DMatrix<R>) -> Result<Self, Error> {
        if k.nrows() != k.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "kernel matrix is {} x {}",
                k.nrows(),
                k.ncols()
            )));
        }
        for i in 0..k.nrows() {
            for j in i..k.ncols() {
                if !k[(i, j)].is_finite() || k[(i, j)] != k[(j, i)] {
                    return Err(Error::InvalidInput("kernel must be symmetric and finite".into()));
                }
            }
        }
        let ev = linalg::symmetric_eigenvalues_desc(&k)?;
        let largest = ev.iter().fold(R::zero(), |a, v| a.max(v.abs()));
        let smallest = ev.last().copied().unwrap_or(R::zero());
        if smallest < -real::<R>(1e-8) * largest {
            return Err(Error::InvalidInput("kernel is not positive semidefinite".into()));
        }
        Ok(Self { k })
    }

    /// The weighted-IBS kernel shares all off-diagonal entries with the
    /// similarity matrix; the diagonal is the self-similarity 2 * sum(w).
    pub fn from_similarity(s: &SimilarityMatrix<R>, w: &WeightVector<R>) -> Self {
        let mut k = s.matrix().clone();
        let diag = real::<R>(2.0) * w.sum();
        for i in 0..k.nrows() {
            k[(i, i)] = diag;
        }
        Self { k }
    }

    pub fn matrix(&self) -> &DMatrix<R> {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }
}

/// Weighted-IBS kernel straight from genotypes. PSD by construction (each
/// locus contributes a PSD block), so no eigenvalue check is run here.
pub fn ibs_kernel_matrix<R: Real>(
    geno: &GenotypeMatrix,
    w: &WeightVector<R>,
) -> Result<KernelMatrix<R>, Error> {
    let s = similarity_matrix(geno, w)?;
    // Diagonal equals ibs_pair of a row with itself.
    debug_assert_eq!(
        ibs_pair(geno.row(0), geno.row(0), w).unwrap(),
        real::<R>(2.0) * w.sum()
    );
    Ok(KernelMatrix::from_similarity(&s, w))
}

/// Everything the F-test reports.
#[derive(Debug, Clone)]
pub struct FTestOutcome<R: Real> {
    pub f_stat: R,
    pub df1: usize,
    pub df2: usize,
    pub p_value: R,
    /// Genotype columns retained after dropping constants and duplicates.
    pub n_retained: usize,
}

/// Classical F-test of all variant main effects jointly, comparing the
/// covariate-only fit against the fit with genotype columns appended.
/// Constant and duplicate genotype columns are dropped first (tight linkage
/// makes them exactly collinear); the retained count is reported.
pub fn linear_f_test<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    geno: &GenotypeMatrix,
) -> Result<FTestOutcome<R>, Error> {
    let n = geno.n_subjects();
    if y.len() != n || x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {} entries, X has {} rows, genotypes have {n} subjects",
            y.len(),
            x.nrows()
        )));
    }
    let p = geno.n_variants();
    let mut retained: Vec<usize> = Vec::with_capacity(p);
    for k in 0..p {
        let first = geno.get(0, k);
        let constant = (1..n).all(|i| geno.get(i, k) == first);
        if constant {
            continue;
        }
        let duplicate = retained
            .iter()
            .any(|&kk| (0..n).all(|i| geno.get(i, k) == geno.get(i, kk)));
        if !duplicate {
            retained.push(k);
        }
    }
    if retained.is_empty() {
        return Err(Error::InvalidInput(
            "no genotype columns left after dropping constants and duplicates".into(),
        ));
    }
    let g = DMatrix::<R>::from_fn(n, retained.len(), |i, j| real(geno.get(i, retained[j]) as f64));
    f_test_on_columns(y, x, &g)
}

/// F-test core on real-valued predictor columns (column hygiene done by the
/// caller). Exposed separately so recoding invariances can be exercised on
/// arbitrary real designs.
pub fn f_test_on_columns<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    g: &DMatrix<R>,
) -> Result<FTestOutcome<R>, Error> {
    let n = y.len();
    let q = x.ncols();
    let p_used = g.ncols();
    if n <= q + p_used {
        return Err(Error::InvalidInput(format!(
            "need n > q + p: n = {n}, q = {q}, p = {p_used}"
        )));
    }
    let mut full = DMatrix::<R>::zeros(n, q + p_used);
    full.view_mut((0, 0), (n, q)).copy_from(x);
    full.view_mut((0, q), (n, p_used)).copy_from(g);
    if !linalg::full_column_rank(&full) {
        return Err(Error::RankDeficient { tol: linalg::RANK_TOL });
    }
    let beta0 = linalg::least_squares(x, y)?;
    let rss0 = (y - x * beta0).norm_squared();
    let beta1 = linalg::least_squares(&full, y)?;
    let rss1 = (y - full * beta1).norm_squared();
    let gain = (rss0 - rss1).max(R::zero());
    let df1 = p_used;
    let df2 = n - q - p_used;
    let tiny = real::<R>(16.0) * R::default_epsilon() * y.norm_squared().max(R::one());
    let (f_stat, p_value) = if rss1 <= tiny {
        if gain <= tiny {
            (R::zero(), R::one())
        } else {
            (real(f64::INFINITY), R::zero())
        }
    } else {
        let f = (gain / real(df1 as f64)) / (rss1 / real(df2 as f64));
        (f, f_sf(f, real(df1 as f64), real(df2 as f64)))
    };
    Ok(FTestOutcome { f_stat, df1, df2, p_value, n_retained: p_used })
}

/// Everything the score test reports.
#[derive(Debug, Clone)]
pub struct ScoreTestOutcome<R: Real> {
    /// Quadratic-form statistic r' K r of the null-model residuals.
    pub q_stat: R,
    /// Residual variance estimate r'r / (n - q).
    pub sigma_sq_hat: R,
    pub p_value: R,
    pub method_note: String,
}

/// Variance-component score test: the residual quadratic form r' K r is
/// referred to its exact null law, a weighted chi-square mixture with
/// weights sigma_hat^2 times the spectrum of B K B.
pub fn skat_score_test<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    k: &KernelMatrix<R>,
) -> Result<ScoreTestOutcome<R>, Error> {
    let n = y.len();
    if x.nrows() != n || k.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {n} entries, X is {} x {}, K is {} x {}",
            x.nrows(),
            x.ncols(),
            k.n(),
            k.n()
        )));
    }
    let q = x.ncols();
    if n <= q + 1 {
        return Err(Error::InvalidInput(format!(
            "need more subjects than covariates: n = {n}, q = {q}"
        )));
    }
    let b = linalg::projection_matrix(x)?;
    let resid = &b * y;
    let rss = resid.norm_squared();
    let tiny = real::<R>(16.0) * R::default_epsilon() * y.norm_squared().max(R::one());
    if rss <= tiny {
        return Err(Error::DegenerateStatistic("residual variance is zero".into()));
    }
    let sigma_sq_hat = rss / real((n - q) as f64);
    let q_stat = resid.dot(&(k.matrix() * &resid));
    let mut bkb = &b * k.matrix() * &b;
    linalg::symmetrize(&mut bkb);
    let eigenvalues = linalg::symmetric_eigenvalues_desc(&bkb)?;
    let max_abs = eigenvalues.iter().fold(R::zero(), |a, v| a.max(v.abs()));
    if max_abs == R::zero() {
        return Ok(ScoreTestOutcome {
            q_stat,
            sigma_sq_hat,
            p_value: R::one(),
            method_note: "degenerate: kernel spectrum is zero after projection".into(),
        });
    }
    let cutoff = real::<R>(EIGEN_DROP_RATIO) * max_abs;
    let scaled: Vec<R> = eigenvalues
        .iter()
        .filter(|v| v.abs() >= cutoff)
        .map(|v| *v * sigma_sq_hat)
        .collect();
    let spec = MixtureSpec::new(scaled, q_stat)?;
    let tail = tail_prob_weighted_chisq(&spec);
    let method_note = match tail.method {
        TailMethod::Inversion => "cf-inversion".to_string(),
        TailMethod::MomentMatch => {
            "approximate: moment-matched tail (quadrature did not converge)".to_string()
        }
    };
    Ok(ScoreTestOutcome { q_stat, sigma_sq_hat, p_value: tail.value, method_note })
}
