use nalgebra::{DMatrix, DVector};

use super::johansen::{trace_from_eigenvalues, JohansenFit};
use super::{sl_critical_values, CointegrationError, CriticalPair, Deterministic, RankDecision};
use crate::dataset::TimePanel;
use crate::linalg::{inverse, least_squares};

/// Saikkonen–Lütkepohl rank test results for H₀: rank ≤ r, r = 0..K−1.
#[derive(Debug, Clone, PartialEq)]
pub struct SlResult {
    pub stats: Vec<f64>,
    pub critical_values: Vec<CriticalPair>,
    pub selected_rank: RankDecision,
    /// GLS intercept estimate used under each null.
    pub intercepts: Vec<DVector<f64>>,
}

/// Level-VAR coefficients and residual covariance of the model under
/// H₀: rank = r0, with an intercept confined to the cointegration relations.
fn null_model(
    x: &DMatrix<f64>,
    p: usize,
    r0: usize,
) -> Result<(Vec<DMatrix<f64>>, DMatrix<f64>), CointegrationError> {
    let (t, k) = x.shape();
    let n = t - p;
    let mut dx = DMatrix::zeros(t - 1, k);
    for r in 1..t {
        for c in 0..k {
            dx[(r - 1, c)] = x[(r, c)] - x[(r - 1, c)];
        }
    }
    let y = dx.rows(p - 1, n).into_owned();
    let mut design = DMatrix::zeros(n, r0 + k * (p - 1));
    let mut beta = DMatrix::zeros(k, r0);
    if r0 > 0 {
        let fit = JohansenFit::estimate(x, p, Deterministic::RestrictedConstant)?;
        let b = fit.beta(r0);
        let ec = &fit.regressors.z1 * &b;
        design.columns_mut(0, r0).copy_from(&ec);
        beta = b.rows(0, k).into_owned();
    }
    for lag in 1..p {
        design
            .view_mut((0, r0 + (lag - 1) * k), (n, k))
            .copy_from(&dx.rows(p - 1 - lag, n));
    }
    let (coef, resid) = if design.ncols() == 0 {
        (DMatrix::zeros(0, k), y.clone())
    } else {
        let ls = least_squares(&y, &design)?;
        (ls.coef, ls.resid)
    };
    let sigma = resid.transpose() * &resid / n as f64;
    let alpha = coef.rows(0, r0).transpose();
    let pi = &alpha * beta.transpose();
    let gammas: Vec<DMatrix<f64>> = (1..p)
        .map(|i| coef.rows(r0 + (i - 1) * k, k).transpose())
        .collect();
    let mut a = Vec::with_capacity(p);
    for i in 1..=p {
        let mut ai = if i == 1 {
            DMatrix::identity(k, k) + &pi
        } else {
            DMatrix::zeros(k, k)
        };
        if i < p {
            ai += &gammas[i - 1];
        }
        if i >= 2 {
            ai -= &gammas[i - 2];
        }
        a.push(ai);
    }
    Ok((a, sigma))
}

/// GLS estimate of the intercept `μ₀` in `x_t = μ₀ + x⁰_t`, treating the
/// pre-sample values of `x` as zero.
fn gls_intercept(
    x: &DMatrix<f64>,
    a: &[DMatrix<f64>],
    sigma: &DMatrix<f64>,
) -> Result<DVector<f64>, CointegrationError> {
    let (t, k) = x.shape();
    let si = inverse(sigma)?;
    let mut lhs = DMatrix::zeros(k, k);
    let mut rhs = DVector::zeros(k);
    for tt in 0..t {
        let mut y = x.row(tt).transpose();
        let mut h = DMatrix::identity(k, k);
        for (j, aj) in a.iter().enumerate().take(tt.min(a.len())) {
            y -= aj * x.row(tt - j - 1).transpose();
            h -= aj;
        }
        let hs = h.transpose() * &si;
        lhs += &hs * &h;
        rhs += &hs * y;
    }
    let inv = inverse(&lhs)?;
    Ok(inv * rhs)
}

/// Rank test after GLS removal of the intercept: for each null rank `r0`
/// the adjusted series `x − μ̂₀` enters a Johansen regression without
/// deterministic terms.
pub fn sl_test(panel: &TimePanel, p: usize) -> Result<SlResult, CointegrationError> {
    let x = panel.values();
    let (t, k) = x.shape();
    if p == 0 {
        return Err(CointegrationError::InvalidArgument("lag order p must be ≥ 1".into()));
    }
    if t <= p || t - p <= 2 * k {
        return Err(CointegrationError::TooShort(format!(
            "T = {t}, p = {p}, K = {k}: need T − p > 2K"
        )));
    }
    let mut stats = Vec::with_capacity(k);
    let mut critical_values = Vec::with_capacity(k);
    let mut intercepts = Vec::with_capacity(k);
    for r0 in 0..k {
        let (a, sigma) = null_model(x, p, r0)?;
        let mu = gls_intercept(x, &a, &sigma)?;
        let adjusted = DMatrix::from_fn(t, k, |r, c| x[(r, c)] - mu[c]);
        let fit = JohansenFit::estimate(&adjusted, p, Deterministic::None)?;
        let trace = trace_from_eigenvalues(fit.rank_eigenvalues(), fit.t_eff);
        stats.push(trace[r0]);
        critical_values.push(sl_critical_values(k - r0)?);
        intercepts.push(mu);
    }
    let selected_rank = RankDecision::from_stats(&stats, &critical_values);
    Ok(SlResult {
        stats,
        critical_values,
        selected_rank,
        intercepts,
    })
}
