//! Augmented Dickey–Fuller unit-root tests.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{least_squares, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitRootError {
    #[error("series too short: {nobs} observations for {regressors} regressors and {max_lags} lags")]
    TooShort {
        nobs: usize,
        regressors: usize,
        max_lags: usize,
    },
    #[error("ADF regression is singular (constant or degenerate series)")]
    SingularRegression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdfDeterministic {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl AdfDeterministic {
    fn n_terms(self) -> usize {
        match self {
            Self::None => 0,
            Self::Constant => 1,
            Self::ConstantTrend => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Constant => "constant",
            Self::ConstantTrend => "constant+trend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSelection {
    /// Use exactly `max_lags` lagged differences.
    Fixed,
    Aic,
    Sc,
}

/// Significance levels reported by the tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    One,
    Five,
    Ten,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::One => "1%",
            Level::Five => "5%",
            Level::Ten => "10%",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfCriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

impl AdfCriticalValues {
    pub fn at(&self, level: Level) -> f64 {
        match level {
            Level::One => self.one,
            Level::Five => self.five,
            Level::Ten => self.ten,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags_used: usize,
    /// Observations in the final regression.
    pub nobs: usize,
    pub deterministic: AdfDeterministic,
    pub critical_values: AdfCriticalValues,
    /// Most stringent level at which the unit root is rejected.
    pub reject_at: Option<Level>,
}

impl AdfResult {
    pub fn rejects_at(&self, level: Level) -> bool {
        self.statistic < self.critical_values.at(level)
    }
}

// MacKinnon (2010) response surfaces for the single-series tau statistic:
// cv(n) = b0 + b1/n + b2/n² + b3/n³.
const TAU_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const TAU_CONST: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const TAU_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Finite-sample critical values for `nobs` regression observations.
pub fn adf_critical_values(deterministic: AdfDeterministic, nobs: usize) -> AdfCriticalValues {
    let table = match deterministic {
        AdfDeterministic::None => &TAU_NONE,
        AdfDeterministic::Constant => &TAU_CONST,
        AdfDeterministic::ConstantTrend => &TAU_TREND,
    };
    let inv = 1.0 / nobs as f64;
    let eval = |b: &[f64; 4]| b[0] + b[1] * inv + b[2] * inv * inv + b[3] * inv * inv * inv;
    AdfCriticalValues {
        one: eval(&table[0]),
        five: eval(&table[1]),
        ten: eval(&table[2]),
    }
}

struct AdfFit {
    statistic: f64,
    rss: f64,
    nobs: usize,
    nparams: usize,
}

/// ADF regression using `lags` lagged differences, with observations starting
/// at difference index `start` (≥ `lags`).
fn fit_adf(
    x: &[f64],
    deterministic: AdfDeterministic,
    lags: usize,
    start: usize,
) -> Result<AdfFit, UnitRootError> {
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let n = dx.len() - start;
    let nparams = deterministic.n_terms() + 1 + lags;
    let mut design = DMatrix::zeros(n, nparams);
    let mut y = DMatrix::zeros(n, 1);
    for (row, t) in (start..dx.len()).enumerate() {
        y[(row, 0)] = dx[t];
        let mut c = 0;
        if deterministic != AdfDeterministic::None {
            design[(row, c)] = 1.0;
            c += 1;
        }
        if deterministic == AdfDeterministic::ConstantTrend {
            design[(row, c)] = (t + 1) as f64;
            c += 1;
        }
        design[(row, c)] = x[t];
        for j in 1..=lags {
            design[(row, c + j)] = dx[t - j];
        }
    }
    let fit = least_squares(&y, &design).map_err(|e| match e {
        LinalgError::Singular => UnitRootError::SingularRegression,
        _ => UnitRootError::SingularRegression,
    })?;
    let rss: f64 = fit.resid.iter().map(|e| e * e).sum();
    let dof = n - nparams;
    let s2 = rss / dof as f64;
    let tss: f64 = y.iter().map(|v| v * v).sum();
    if !(s2 > 0.0) || rss <= 1e-24 * tss.max(f64::MIN_POSITIVE) {
        return Err(UnitRootError::SingularRegression);
    }
    let rho_idx = deterministic.n_terms();
    let se = (s2 * fit.xtx_inv[(rho_idx, rho_idx)]).sqrt();
    Ok(AdfFit {
        statistic: fit.coef[(rho_idx, 0)] / se,
        rss,
        nobs: n,
        nparams,
    })
}

/// Augmented Dickey–Fuller test on `series`.
///
/// The regression is `Δx_t = [c + δt] + ρ x_{t−1} + Σ φ_i Δx_{t−i} + e_t` and
/// the statistic is the t-ratio on `ρ`. With [`LagSelection::Aic`] or
/// [`LagSelection::Sc`] the lag order is chosen over `0..=max_lags` on the
/// common sample that drops the first `max_lags` differences, then the
/// chosen model is refitted on its full sample.
pub fn adf_test(
    series: &[f64],
    deterministic: AdfDeterministic,
    max_lags: usize,
    selection: LagSelection,
) -> Result<AdfResult, UnitRootError> {
    let regressors = deterministic.n_terms() + 1 + max_lags;
    let t = series.len();
    if t < max_lags + 2 || t - max_lags - 2 <= regressors {
        return Err(UnitRootError::TooShort {
            nobs: t,
            regressors,
            max_lags,
        });
    }
    let lags = match selection {
        LagSelection::Fixed => max_lags,
        LagSelection::Aic | LagSelection::Sc => {
            let mut best = (f64::INFINITY, 0);
            for k in 0..=max_lags {
                let fit = fit_adf(series, deterministic, k, max_lags)?;
                let n = fit.nobs as f64;
                let penalty = match selection {
                    LagSelection::Aic => 2.0,
                    _ => n.ln(),
                };
                let ic = (fit.rss / n).ln() + penalty * fit.nparams as f64 / n;
                if ic < best.0 {
                    best = (ic, k);
                }
            }
            best.1
        }
    };
    let fit = fit_adf(series, deterministic, lags, lags)?;
    let critical_values = adf_critical_values(deterministic, fit.nobs);
    let reject_at = [Level::One, Level::Five, Level::Ten]
        .into_iter()
        .find(|&l| fit.statistic < critical_values.at(l));
    Ok(AdfResult {
        statistic: fit.statistic,
        lags_used: lags,
        nobs: fit.nobs,
        deterministic,
        critical_values,
        reject_at,
    })
}

/// Level and first-difference ADF results with the implied integration order.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationReport {
    pub level: AdfResult,
    pub difference: AdfResult,
    pub verdict: &'static str,
}

/// Classify a series as I(0), I(1) or I(2+) at `level` significance.
pub fn integration_order(
    series: &[f64],
    deterministic: AdfDeterministic,
    max_lags: usize,
    selection: LagSelection,
    level: Level,
) -> Result<IntegrationReport, UnitRootError> {
    let lev = adf_test(series, deterministic, max_lags, selection)?;
    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let dif = adf_test(&diff, deterministic, max_lags, selection)?;
    let verdict = if lev.rejects_at(level) {
        "I(0)"
    } else if dif.rejects_at(level) {
        "I(1)"
    } else {
        "I(2+)"
    };
    Ok(IntegrationReport {
        level: lev,
        difference: dif,
        verdict,
    })
}
