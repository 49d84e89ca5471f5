use nalgebra::DMatrix;

use super::CointegrationError;
use crate::dataset::TimePanel;
use crate::linalg::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfoCriterion {
    Aic,
    Hq,
    /// Schwarz.
    #[default]
    Sc,
}

impl InfoCriterion {
    pub fn label(self) -> &'static str {
        match self {
            InfoCriterion::Aic => "AIC",
            InfoCriterion::Hq => "HQ",
            InfoCriterion::Sc => "SC",
        }
    }

    fn penalty(self, n: f64) -> f64 {
        match self {
            InfoCriterion::Aic => 2.0 / n,
            InfoCriterion::Hq => 2.0 * n.ln().ln() / n,
            InfoCriterion::Sc => n.ln() / n,
        }
    }
}

/// VAR order in levels (with intercept) minimizing `ln|Σ̃_p| + c_T·pK²`,
/// each candidate fitted on the common sample that drops the first `max_p`
/// observations.
pub fn select_lag(
    panel: &TimePanel,
    max_p: usize,
    criterion: InfoCriterion,
) -> Result<usize, CointegrationError> {
    if max_p == 0 {
        return Err(CointegrationError::InvalidArgument("max_p must be ≥ 1".into()));
    }
    let x = panel.values();
    let (t, k) = x.shape();
    if t <= max_p * k + 1 || t - max_p * k - 1 <= k {
        return Err(CointegrationError::TooShort(format!(
            "T = {t}, K = {k}, max_p = {max_p}: need T − max_p·K − 1 > K"
        )));
    }
    if max_p == 1 {
        return Ok(1);
    }
    let n = t - max_p;
    let y = x.rows(max_p, n).into_owned();
    let mut best = (f64::INFINITY, 1);
    for p in 1..=max_p {
        let mut design = DMatrix::zeros(n, 1 + p * k);
        design.column_mut(0).fill(1.0);
        for lag in 1..=p {
            design
                .view_mut((0, 1 + (lag - 1) * k), (n, k))
                .copy_from(&x.rows(max_p - lag, n));
        }
        let fit = least_squares(&y, &design)?;
        let sigma = fit.resid.transpose() * &fit.resid / n as f64;
        let logdet = sigma
            .cholesky()
            .map(|c| 2.0 * c.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
            .ok_or(CointegrationError::SingularMoments)?;
        let ic = logdet + criterion.penalty(n as f64) * (p * k * k) as f64;
        if ic < best.0 {
            best = (ic, p);
        }
    }
    Ok(best.1)
}
