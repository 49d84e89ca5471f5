//! Structural identification of a fitted VECM with short- and long-run
//! zero restrictions, and bootstrap t-ratios for the identified impacts.

mod bootstrap;
mod identify;
mod pattern;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::orth_complement;
use crate::vecm::{VecmError, VecmModel};

pub use bootstrap::{bootstrap_tvalues, stars, BootstrapResult};
pub use identify::{
    check_identification, identify, identify_raw, Identification, IdentificationReport, IdentifyOptions,
};
pub use pattern::RestrictionPattern;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvecError {
    #[error("rank r = {r} must satisfy 1 ≤ r < K = {k}")]
    InvalidRank { k: usize, r: usize },
    #[error("α⊥′(I − ΣΓᵢ)β⊥ is singular; the model violates the I(1) conditions")]
    NonInvertibleCore,
    #[error("restrictions do not identify B (Jacobian rank {rank} < {required})")]
    NotIdentified { rank: usize, required: usize },
    #[error("scoring did not converge from any of {starts} starts")]
    NoConvergence { starts: usize },
    #[error("residual covariance is not positive definite")]
    SingularSigma,
    #[error("restriction pattern: {0}")]
    Pattern(String),
    #[error("bootstrap needs at least 100 replications, got {0}")]
    TooFewReplications(usize),
    #[error("{failed} of {total} bootstrap replications failed (limit 20%)")]
    ResampleFailure { failed: usize, total: usize },
    #[error(transparent)]
    Vecm(#[from] VecmError),
}

/// Restrictions needed to pin down B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestrictionCount {
    /// `K(K−1)/2` beyond `BB′ = Σ`.
    pub total: usize,
    /// `(K−r)(K−r−1)/2`, among the permanent shocks.
    pub extra_permanent: usize,
    /// `r(r−1)/2`, among the transitory shocks.
    pub extra_transitory: usize,
}

pub fn count_restrictions(k: usize, r: usize) -> Result<RestrictionCount, SvecError> {
    if r == 0 || r >= k {
        return Err(SvecError::InvalidRank { k, r });
    }
    Ok(RestrictionCount {
        total: k * (k - 1) / 2,
        extra_permanent: (k - r) * (k - r - 1) / 2,
        extra_transitory: r * (r - 1) / 2,
    })
}

/// `Ξ = β⊥(α⊥′(I − ΣΓᵢ)β⊥)⁻¹α⊥′`.
pub fn long_run_multiplier(model: &VecmModel) -> Result<DMatrix<f64>, SvecError> {
    long_run_from(&model.alpha, &model.beta, &model.gamma_core())
}

pub(crate) fn long_run_from(
    alpha: &DMatrix<f64>,
    beta: &DMatrix<f64>,
    core: &DMatrix<f64>,
) -> Result<DMatrix<f64>, SvecError> {
    let (k, r) = beta.shape();
    if r == 0 || r >= k {
        return Err(SvecError::InvalidRank { k, r });
    }
    let a_perp = orth_complement(alpha);
    let b_perp = orth_complement(beta);
    if a_perp.ncols() != k - r || b_perp.ncols() != k - r {
        return Err(SvecError::NonInvertibleCore);
    }
    let m = a_perp.transpose() * core * &b_perp;
    let s = crate::linalg::singular_values(&m);
    if s.last().copied().unwrap_or(0.0) <= 1e-12 * s[0].max(f64::MIN_POSITIVE) {
        return Err(SvecError::NonInvertibleCore);
    }
    let inv = m.try_inverse().ok_or(SvecError::NonInvertibleCore)?;
    Ok(b_perp * inv * a_perp.transpose())
}

/// An identified structural VECM.
#[derive(Debug, Clone, PartialEq)]
pub struct SvecModel {
    /// Contemporaneous impact matrix, `u_t = B ε_t`.
    pub b: DMatrix<f64>,
    pub xi: DMatrix<f64>,
    /// Long-run impact `Ξ·B`.
    pub xi_b: DMatrix<f64>,
    pub loglik: f64,
    pub converged: bool,
    /// Scoring iterations of the retained start.
    pub iterations: usize,
    /// Largest absolute entry of the projected gradient at the optimum.
    pub gradient: f64,
    pub starts_converged: usize,
    pub pattern: RestrictionPattern,
    pub tvalues_b: Option<DMatrix<f64>>,
    pub tvalues_xi_b: Option<DMatrix<f64>>,
}

impl SvecModel {
    pub fn with_bootstrap(mut self, boot: &BootstrapResult) -> Self {
        self.tvalues_b = Some(boot.tvalues_b.clone());
        self.tvalues_xi_b = Some(boot.tvalues_xi_b.clone());
        self
    }
}
