//! Lag selection, Johansen reduced-rank regression, rank tests and tests of
//! linear restrictions on the cointegration space.

mod johansen;
mod lag;
mod restriction;
mod sl;
mod tables;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use johansen::{build_regressors, johansen, solve_reduced_rank, JohansenFit, Regressors};
pub use lag::{select_lag, InfoCriterion};
pub(crate) use restriction::restricted_beta;
pub use restriction::{normalize_beta, test_beta_restriction, BetaRestriction, BetaTestResult};
pub use sl::{sl_test, SlResult};
pub use tables::{sl_critical_values, trace_critical_values, CriticalPair, SignificanceLevel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CointegrationError {
    #[error("sample too short: {0}")]
    TooShort(String),
    #[error("product-moment matrices are singular")]
    SingularMoments,
    #[error("K - r = {k_minus_r} is outside the embedded tables (1..=10)")]
    OutOfTable { k_minus_r: usize },
    #[error("restriction inconsistent with the model: {0}")]
    InconsistentRestriction(String),
    #[error("model has no cointegration estimates")]
    NotEstimated,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl From<LinalgError> for CointegrationError {
    fn from(_: LinalgError) -> Self {
        CointegrationError::SingularMoments
    }
}

/// Deterministic terms of the error-correction model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Deterministic {
    /// No deterministic terms at all.
    None,
    /// Intercept outside the cointegration relations (drift allowed).
    #[default]
    UnrestrictedConstant,
    /// Intercept confined to the cointegration relations.
    RestrictedConstant,
}

impl Deterministic {
    pub fn label(self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::UnrestrictedConstant => "constant",
            Deterministic::RestrictedConstant => "restricted constant",
        }
    }
}

/// Smallest `r` whose statistic falls below its critical value, or `K` if
/// every null is rejected. `stats[r]` and `critical[r]` refer to H₀: rank ≤ r.
pub fn select_rank(stats: &[f64], critical: &[CriticalPair], level: SignificanceLevel) -> usize {
    stats
        .iter()
        .zip(critical)
        .position(|(s, cv)| *s < cv.at(level))
        .unwrap_or(stats.len())
}

/// Ranks chosen at the two reported significance levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDecision {
    pub five: usize,
    pub one: usize,
}

impl RankDecision {
    pub fn from_stats(stats: &[f64], critical: &[CriticalPair]) -> Self {
        Self {
            five: select_rank(stats, critical, SignificanceLevel::Five),
            one: select_rank(stats, critical, SignificanceLevel::One),
        }
    }
}

/// Johansen trace test results for H₀: rank ≤ r, r = 0..K−1.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTestResult {
    /// Descending, each in [0, 1).
    pub eigenvalues: Vec<f64>,
    pub trace_stats: Vec<f64>,
    pub critical_values: Vec<CriticalPair>,
    pub selected_rank: RankDecision,
    pub deterministic: Deterministic,
    /// Saikkonen–Lütkepohl statistics, when computed alongside.
    pub sl: Option<SlResult>,
}
