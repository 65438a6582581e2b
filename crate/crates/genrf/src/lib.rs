//! Joint association testing for quantitative traits against sets of genetic
//! variants, built around a random-field view of the trait.
//!
//! The central test regresses each subject's trait value on every other
//! subject's, weighted by genetic similarity, and rejects when the fitted
//! autocorrelation is larger than chance allows. The library provides:
//!
//! - [`data`]: validated genotype / phenotype / covariate containers and
//!   tab-separated file ingestion,
//! - [`kernel`]: the weighted identity-by-state similarity matrix,
//! - [`random_field`]: the association statistic, its exact mixture
//!   chi-square p-value, and a sampler for the joint model,
//! - [`quadform`]: tail probabilities of weighted sums of one-degree
//!   chi-square variables (numerical characteristic-function inversion),
//! - [`baselines`]: the p-df linear-regression F-test and a
//!   variance-component score test sharing the same kernel,
//! - [`simulate`]: seeded, reproducible Monte Carlo power studies.
//!
//! All matrix math is generic over the scalar type through [`Real`]; the
//! crate-root aliases fix `f64`, which is what the file loaders, the
//! simulation harness, and the CLI use.

pub mod baselines;
pub mod data;
pub mod dist;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod quadform;
pub mod random_field;
pub mod record;
pub mod simulate;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::Error;

/// Floating-point scalar usable for the matrix math: `f32` or `f64`.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy {}
impl<T: RealField + FromPrimitive + ToPrimitive + Copy> Real for T {}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn real<R: Real>(v: f64) -> R {
    nalgebra::convert(v)
}

/// Default scalar for the loaders, the harness, and the CLI.
pub type Scalar = f64;

/// Weighted identity-by-state similarity matrix over the default scalar.
pub type Similarity = kernel::SimilarityMatrix<Scalar>;
/// Positive-semidefinite kernel matrix over the default scalar.
pub type Kernel = baselines::KernelMatrix<Scalar>;
/// Per-variant weight vector over the default scalar.
pub type Weights = kernel::WeightVector<Scalar>;
/// Association test result over the default scalar.
pub type GenrfResult = random_field::TestResult<Scalar>;

pub use data::{AlignedDataset, CovariateMatrix, GenotypeMatrix, PhenotypeVector, TraitKind};
pub use record::{Method, ResultRecord};
pub use simulate::{PhenotypeModel, StudyReport, StudyScenario};
