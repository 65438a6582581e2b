//! The random-field association test and its generative counterpart.
//!
//! The statistic is the fitted autocorrelation of the trait across the
//! genetic similarity graph after covariate adjustment:
//!
//! gamma_hat = (BY)' S (BY) / (BY)' S^2 (BY),  B = I - X (X'X)^-1 X'.
//!
//! Its exact p-value under the null is P(Z' (S - eta S^2) Z > 0) at the
//! observed eta, with Z ~ N(0, B); since B is an idempotent projection this
//! equals N(0, B^2). The probability reduces to the tail of a weighted
//! chi-square mixture with weights from the spectrum of B (S - eta S^2) B,
//! handled by [`crate::quadform`]. Large gamma_hat gives small p: the test is
//! one-sided because the dependence coefficient is nonnegative by model
//! construction.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Error;
use crate::kernel::SimilarityMatrix;
use crate::linalg;
use crate::quadform::{tail_prob_weighted_chisq, MixtureSpec, TailMethod};
use crate::{real, Real};

/// Eigenvalues below this ratio of the largest magnitude are treated as the
/// projection's structural zeros and excluded from the mixture.
pub const EIGEN_DROP_RATIO: f64 = 1e-8;

/// Everything the test produces for one dataset.
#[derive(Debug, Clone)]
pub struct TestResult<R: Real> {
    /// Observed autocorrelation statistic (NaN when degenerate).
    pub gamma_hat: R,
    /// Null-model least-squares covariate fit.
    pub beta_hat: DVector<R>,
    /// Full spectrum of B (S - eta S^2) B, descending.
    pub eigenvalues: Vec<R>,
    pub p_value: R,
    /// Count of near-zero eigenvalues excluded from the mixture.
    pub n_eigen_dropped: usize,
    pub method_note: String,
}

/// Parameters of the joint generative model
/// Y = X beta + v, v ~ N(0, zeta^2 (I - gamma S)^-1).
#[derive(Debug, Clone)]
pub struct FieldParams<R: Real> {
    pub gamma: R,
    pub beta: DVector<R>,
    pub zeta_sq: R,
}

impl<R: Real> FieldParams<R> {
    pub fn new(gamma: R, beta: DVector<R>, zeta_sq: R) -> Result<Self, Error> {
        if !(zeta_sq > R::zero()) || !zeta_sq.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidInput("need finite gamma and zeta_sq > 0".into()));
        }
        Ok(Self { gamma, beta, zeta_sq })
    }
}

struct StatisticParts<R: Real> {
    gamma_hat: R,
    beta_hat: DVector<R>,
    projection: DMatrix<R>,
    numerator: R,
    denominator: R,
}

fn check_dims<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    s: &SimilarityMatrix<R>,
) -> Result<(), Error> {
    let n = y.len();
    if x.nrows() != n || s.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has {n} entries, X is {} x {}, S is {} x {}",
            x.nrows(),
            x.ncols(),
            s.n(),
            s.n()
        )));
    }
    if n <= x.ncols() + 1 {
        return Err(Error::InvalidInput(format!(
            "need more subjects than covariates: n = {n}, q = {}",
            x.ncols()
        )));
    }
    Ok(())
}

fn statistic_parts<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    s: &SimilarityMatrix<R>,
) -> Result<StatisticParts<R>, Error> {
    check_dims(y, x, s)?;
    let projection = linalg::projection_matrix(x)?;
    let beta_hat = linalg::least_squares(x, y)?;
    let resid = &projection * y;
    let smoothed = s.matrix() * &resid;
    let numerator = resid.dot(&smoothed);
    let denominator = smoothed.dot(&smoothed);
    let scale = s.matrix().norm_squared() * resid.norm_squared();
    let floor = real::<R>(16.0) * R::default_epsilon() * scale;
    if !(denominator > floor) {
        return Err(Error::DegenerateStatistic(format!(
            "similarity-weighted residuals vanish (denominator {:e} vs scale {:e})",
            denominator.to_f64().unwrap_or(f64::NAN),
            scale.to_f64().unwrap_or(f64::NAN),
        )));
    }
    Ok(StatisticParts {
        gamma_hat: numerator / denominator,
        beta_hat,
        projection,
        numerator,
        denominator,
    })
}

/// The autocorrelation statistic and the null-model covariate fit.
///
/// Errors with [`Error::DegenerateStatistic`] when S (BY) is numerically
/// zero; callers that want a test rather than a statistic should use
/// [`genrf_test`], which maps that case to p = 1.
pub fn genrf_statistic<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    s: &SimilarityMatrix<R>,
) -> Result<(R, DVector<R>), Error> {
    statistic_parts(y, x, s).map(|p| (p.gamma_hat, p.beta_hat))
}

/// Run the full test: statistic, spectrum, and exact mixture p-value.
pub fn genrf_test<R: Real>(
    y: &DVector<R>,
    x: &DMatrix<R>,
    s: &SimilarityMatrix<R>,
) -> Result<TestResult<R>, Error> {
    let parts = match statistic_parts(y, x, s) {
        Ok(p) => p,
        Err(Error::DegenerateStatistic(note)) => {
            return Ok(TestResult {
                gamma_hat: real(f64::NAN),
                beta_hat: linalg::least_squares(x, y)?,
                eigenvalues: Vec::new(),
                p_value: R::one(),
                n_eigen_dropped: 0,
                method_note: format!("degenerate: {note}; no evidence against the null"),
            });
        }
        Err(e) => return Err(e),
    };
    let eta = parts.gamma_hat;
    let s_mat = s.matrix();
    let shifted = s_mat - s_mat * s_mat * eta;
    let mut m = &parts.projection * shifted * &parts.projection;
    linalg::symmetrize(&mut m);
    let eigenvalues = linalg::symmetric_eigenvalues_desc(&m)?;
    let max_abs = eigenvalues.iter().fold(R::zero(), |a, v| a.max(v.abs()));
    if max_abs == R::zero() {
        return Ok(TestResult {
            gamma_hat: eta,
            beta_hat: parts.beta_hat,
            n_eigen_dropped: eigenvalues.len(),
            eigenvalues,
            p_value: R::one(),
            method_note: "degenerate: mixture spectrum is numerically zero".into(),
        });
    }
    let cutoff = real::<R>(EIGEN_DROP_RATIO) * max_abs;
    let kept: Vec<R> = eigenvalues.iter().copied().filter(|v| v.abs() >= cutoff).collect();
    let n_eigen_dropped = eigenvalues.len() - kept.len();
    let spec = MixtureSpec::new(kept, R::zero())?;
    let tail = tail_prob_weighted_chisq(&spec);
    let method_note = match tail.method {
        TailMethod::Inversion => "cf-inversion".to_string(),
        TailMethod::MomentMatch => {
            "approximate: moment-matched tail (quadrature did not converge)".to_string()
        }
    };
    Ok(TestResult {
        gamma_hat: eta,
        beta_hat: parts.beta_hat,
        eigenvalues,
        p_value: tail.value,
        n_eigen_dropped,
        method_note,
    })
}

/// One draw of the joint model Y = X beta + v, v ~ N(0, zeta^2 (I - gamma S)^-1).
///
/// Requires I - gamma S positive definite; the error reports the admissible
/// upper bound 1 / lambda_max(S).
pub fn sample_genrf_field<R: Real, G: Rng + ?Sized>(
    params: &FieldParams<R>,
    x: &DMatrix<R>,
    s: &SimilarityMatrix<R>,
    rng: &mut G,
) -> Result<DVector<R>, Error> {
    let n = s.n();
    if x.nrows() != n || x.ncols() != params.beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "X is {} x {} against n = {n}, beta length {}",
            x.nrows(),
            x.ncols(),
            params.beta.len()
        )));
    }
    let eig = s.matrix().clone().symmetric_eigen();
    let lambda_max =
        eig.eigenvalues.iter().fold(real::<R>(f64::NEG_INFINITY), |a: R, v| a.max(*v));
    let mut scales = DVector::<R>::zeros(n);
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        let denom = R::one() - params.gamma * *lam;
        if !(denom > R::zero()) {
            return Err(Error::NotPositiveDefinite {
                gamma: params.gamma.to_f64().unwrap_or(f64::NAN),
                bound: (R::one() / lambda_max).to_f64().unwrap_or(f64::NAN),
            });
        }
        scales[i] = (params.zeta_sq / denom).sqrt();
    }
    let z = DVector::<R>::from_fn(n, |_, _| {
        let draw: f64 = StandardNormal.sample(rng);
        real(draw)
    });
    let v = &eig.eigenvectors * z.component_mul(&scales);
    Ok(x * &params.beta + v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::data::WeightVector;
    use crate::kernel::similarity_matrix;
    use crate::simulate::gen_genotypes;

    fn exchange_pair() -> (DVector<f64>, DMatrix<f64>, SimilarityMatrix<f64>) {
        let y = DVector::from_column_slice(&[0.0, 2.0]);
        let x = DMatrix::from_element(2, 1, 1.0);
        let s =
            SimilarityMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))
                .unwrap();
        (y, x, s)
    }

    #[test]
    fn two_subject_exchange_statistic() {
        let (y, x, s) = exchange_pair();
        // n = 2 with one covariate trips the subject floor; check the raw parts
        // by hand instead through a 3-subject embedding below, and the exact
        // 2 x 2 algebra directly here.
        let b = linalg::projection_matrix(&x).unwrap();
        let r = &b * &y;
        assert_eq!(r.as_slice(), &[-1.0, 1.0]);
        let sr = s.matrix() * &r;
        assert_eq!(sr.as_slice(), &[1.0, -1.0]);
        assert_eq!(r.dot(&sr), -2.0);
        assert_eq!(sr.dot(&sr), 2.0);
    }

    fn seeded_dataset(
        n: usize,
        p: usize,
        seed: u64,
    ) -> (DVector<f64>, DMatrix<f64>, SimilarityMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geno = gen_genotypes(n, p, 0.3, 0.4, &mut rng).unwrap();
        let s = similarity_matrix(&geno, &WeightVector::unit(p)).unwrap();
        let y = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let x = DMatrix::from_fn(n, 2, |_, j| {
            if j == 0 {
                1.0
            } else {
                StandardNormal.sample(&mut rng)
            }
        });
        (y, x, s)
    }

    #[test]
    fn statistic_matches_golden_section_minimizer() {
        // Oracle: minimize ||(I - g S) BY||^2 over g numerically.
        let (y, x, s) = seeded_dataset(20, 5, 11);
        let (gamma_hat, _) = genrf_statistic(&y, &x, &s).unwrap();
        let b = linalg::projection_matrix(&x).unwrap();
        let r = &b * &y;
        let obj = |g: f64| -> f64 {
            let fitted = &r - s.matrix() * &r * g;
            fitted.norm_squared()
        };
        let sr = s.matrix() * &r;
        let reach = 2.0 * r.norm() / sr.norm() + 1.0;
        // Coarse grid to bracket, then golden-section refinement.
        let mut best = (-reach, obj(-reach));
        let grid = 2000;
        for i in 0..=grid {
            let g = -reach + 2.0 * reach * i as f64 / grid as f64;
            let v = obj(g);
            if v < best.1 {
                best = (g, v);
            }
        }
        let (mut lo, mut hi) = (best.0 - 2.0 * reach / grid as f64, best.0 + 2.0 * reach / grid as f64);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        while hi - lo > 1e-12 {
            let a = hi - phi * (hi - lo);
            let b2 = lo + phi * (hi - lo);
            if obj(a) < obj(b2) {
                hi = b2;
            } else {
                lo = a;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!(
            (gamma_hat - oracle).abs() <= 1e-7 * (1.0 + gamma_hat.abs()),
            "{gamma_hat} vs {oracle}"
        );
    }

    #[test]
    fn covariate_shift_leaves_statistic_unchanged() {
        let (y, x, s) = seeded_dataset(15, 4, 3);
        let (g0, _) = genrf_statistic(&y, &x, &s).unwrap();
        let shift = &x * DVector::from_column_slice(&[5.0, -2.0]);
        let y2 = &y + shift;
        let (g1, _) = genrf_statistic(&y2, &x, &s).unwrap();
        assert!((g0 - g1).abs() < 1e-10);
    }

    #[test]
    fn optimum_identity_holds() {
        // numerator - gamma_hat * denominator vanishes by construction.
        let (y, x, s) = seeded_dataset(25, 6, 7);
        let parts = statistic_parts(&y, &x, &s).unwrap();
        let slack = (parts.numerator - parts.gamma_hat * parts.denominator).abs();
        assert!(slack <= 1e-12 * parts.denominator.abs());
    }

    #[test]
    fn eigen_trace_identity() {
        let (y, x, s) = seeded_dataset(18, 5, 21);
        let res = genrf_test(&y, &x, &s).unwrap();
        let b = linalg::projection_matrix(&x).unwrap();
        let sm = s.matrix();
        let m = &b * (sm - sm * sm * res.gamma_hat) * &b;
        let sum: f64 = res.eigenvalues.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-6 * m.trace().abs().max(1.0));
        assert!(res.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn zero_similarity_degenerates_to_p_one() {
        let y = DVector::from_column_slice(&[0.3, -1.0, 0.7, 0.1]);
        let x = DMatrix::from_element(4, 1, 1.0);
        let s = SimilarityMatrix::from_matrix(DMatrix::zeros(4, 4)).unwrap();
        let res = genrf_test(&y, &x, &s).unwrap();
        assert_eq!(res.p_value, 1.0);
        assert!(res.method_note.starts_with("degenerate"));
        assert!(res.gamma_hat.is_nan());
    }

    #[test]
    fn p_value_in_unit_interval_and_one_sided() {
        let (y, x, s) = seeded_dataset(30, 8, 5);
        let res = genrf_test(&y, &x, &s).unwrap();
        assert!(res.p_value >= 0.0 && res.p_value <= 1.0);
        assert_eq!(res.method_note, "cf-inversion");
        // Injecting a similarity-aligned signal must shrink the p-value.
        let b = linalg::projection_matrix(&x).unwrap();
        let mut bsb = &b * s.matrix() * &b;
        linalg::symmetrize(&mut bsb);
        let top = bsb.symmetric_eigen();
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for (i, v) in top.eigenvalues.iter().enumerate() {
            if *v > best {
                best = *v;
                best_i = i;
            }
        }
        let dir = top.eigenvectors.column(best_i).into_owned();
        let y_strong = &y + s.matrix() * dir * 5.0;
        let strong = genrf_test(&y_strong, &x, &s).unwrap();
        assert!(strong.p_value < res.p_value);
        assert!(strong.gamma_hat > res.gamma_hat);
    }

    #[test]
    fn sampler_respects_the_definiteness_bound() {
        let (_, x, s) = seeded_dataset(10, 4, 2);
        let lam_max = s
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        let params =
            FieldParams::new(1.01 / lam_max, DVector::from_element(2, 0.0), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match sample_genrf_field(&params, &x, &s, &mut rng) {
            Err(Error::NotPositiveDefinite { bound, .. }) => {
                assert!((bound - 1.0 / lam_max).abs() < 1e-12);
            }
            other => panic!("expected definiteness rejection, got {other:?}"),
        }
    }

    #[test]
    fn sampler_mean_and_scale_sanity() {
        let (_, x, s) = seeded_dataset(12, 4, 9);
        let beta = DVector::from_column_slice(&[2.0, 0.5]);
        let params = FieldParams::new(0.0, beta.clone(), 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reps = 4000;
        let mut mean = DVector::<f64>::zeros(12);
        let mut var = 0.0;
        for _ in 0..reps {
            let y = sample_genrf_field(&params, &x, &s, &mut rng).unwrap();
            let centered = &y - &x * &beta;
            mean += &centered;
            var += centered.norm_squared();
        }
        mean /= reps as f64;
        var /= (reps * 12) as f64;
        assert!(mean.amax() < 0.15, "max mean deviation {}", mean.amax());
        assert!((var - 4.0).abs() < 0.2, "variance {var}");
    }
}
