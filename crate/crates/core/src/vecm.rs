//! Reduced-form VECM estimation for a given cointegration rank.
//!
//! The model is written `ΔX_t = αβ′X_{t−1} + Σᵢ Γᵢ ΔX_{t−i} + ν + u_t`, so the
//! error-correction matrix is `Π = αβ′` and a stable adjustment shows up as
//! negative entries of α.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::cointegration::{normalize_beta, BetaRestriction, CointegrationError, Deterministic, JohansenFit};
use crate::dataset::TimePanel;
use crate::linalg::{least_squares, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VecmError {
    #[error("cointegration rank {r} outside 1..={max} (use a VAR in differences for r = 0)")]
    RankOutOfRange { r: usize, max: usize },
    #[error("lag order must be ≥ 1, got {0}")]
    InvalidLag(usize),
    #[error("short-run regression design is singular")]
    SingularDesign,
    #[error(transparent)]
    Cointegration(#[from] CointegrationError),
}

impl From<LinalgError> for VecmError {
    fn from(_: LinalgError) -> Self {
        VecmError::SingularDesign
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecmModel {
    pub names: Vec<String>,
    pub k: usize,
    /// Lag order of the levels VAR.
    pub p: usize,
    pub r: usize,
    pub deterministic: Deterministic,
    /// K×r loadings.
    pub alpha: DMatrix<f64>,
    /// K×r cointegration vectors.
    pub beta: DMatrix<f64>,
    /// Constant inside the relations `β′X + c` (restricted constant only).
    pub beta_const: Option<DVector<f64>>,
    /// Γ₁..Γ_{p−1}.
    pub gammas: Vec<DMatrix<f64>>,
    /// Unrestricted intercept ν.
    pub nu: Option<DVector<f64>>,
    /// Residual covariance with divisor T − p.
    pub sigma: DMatrix<f64>,
    /// (T−p)×K.
    pub residuals: DMatrix<f64>,
    pub t_eff: usize,
    pub nobs: usize,
    /// First `p` observations of the levels, used to start simulations.
    pub initial: DMatrix<f64>,
    pub johansen: JohansenFit,
}

impl VecmModel {
    /// `Π = αβ′`.
    pub fn pi(&self) -> DMatrix<f64> {
        &self.alpha * self.beta.transpose()
    }

    /// Intercept of the equivalent levels VAR.
    pub fn level_intercept(&self) -> DVector<f64> {
        match (&self.nu, &self.beta_const) {
            (Some(nu), _) => nu.clone(),
            (None, Some(c)) => &self.alpha * c,
            (None, None) => DVector::zeros(self.k),
        }
    }

    /// `I − Σ Γᵢ`, the matrix entering the long-run multiplier.
    pub fn gamma_core(&self) -> DMatrix<f64> {
        let mut g = DMatrix::identity(self.k, self.k);
        for gi in &self.gammas {
            g -= gi;
        }
        g
    }
}

/// Estimate a VECM on a panel of levels.
pub fn fit_vecm(
    panel: &TimePanel,
    p: usize,
    r: usize,
    deterministic: Deterministic,
    beta_restriction: Option<&BetaRestriction>,
) -> Result<VecmModel, VecmError> {
    estimate(panel.values(), panel.names().to_vec(), p, r, deterministic, beta_restriction)
}

/// As [`fit_vecm`] on a raw T×K matrix.
pub fn estimate(
    x: &DMatrix<f64>,
    names: Vec<String>,
    p: usize,
    r: usize,
    deterministic: Deterministic,
    beta_restriction: Option<&BetaRestriction>,
) -> Result<VecmModel, VecmError> {
    let (t, k) = x.shape();
    if p == 0 {
        return Err(VecmError::InvalidLag(p));
    }
    if r == 0 || r >= k {
        return Err(VecmError::RankOutOfRange { r, max: k.saturating_sub(1) });
    }
    let fit = JohansenFit::estimate(x, p, deterministic)?;
    let beta_full = match beta_restriction {
        Some(res) => crate::cointegration::restricted_beta(&fit, res, r)?.1,
        None => fit.beta(r),
    };
    let beta_full = normalize_beta(&beta_full, k);
    let reg = &fit.regressors;
    let n = t - p;
    let ec = &reg.z1 * &beta_full;
    let m = reg.z2.ncols();
    let mut design = DMatrix::zeros(n, r + m);
    design.columns_mut(0, r).copy_from(&ec);
    design.columns_mut(r, m).copy_from(&reg.z2);
    let ls = least_squares(&reg.z0, &design)?;
    let alpha = ls.coef.rows(0, r).transpose();
    let gammas: Vec<DMatrix<f64>> = (1..p)
        .map(|i| ls.coef.rows(r + (i - 1) * k, k).transpose())
        .collect();
    let nu = (deterministic == Deterministic::UnrestrictedConstant)
        .then(|| ls.coef.row(r + m - 1).transpose());
    let beta_const = (deterministic == Deterministic::RestrictedConstant)
        .then(|| beta_full.row(k).transpose());
    let sigma = ls.resid.transpose() * &ls.resid / n as f64;
    Ok(VecmModel {
        names,
        k,
        p,
        r,
        deterministic,
        alpha,
        beta: beta_full.rows(0, k).into_owned(),
        beta_const,
        gammas,
        nu,
        sigma,
        residuals: ls.resid,
        t_eff: n,
        nobs: t,
        initial: x.rows(0, p).into_owned(),
        johansen: fit,
    })
}

/// Levels-VAR coefficients A₁..A_p: `A₁ = I + αβ′ + Γ₁`,
/// `Aᵢ = Γᵢ − Γᵢ₋₁`, `A_p = −Γ_{p−1}`.
pub fn to_level_var(model: &VecmModel) -> Vec<DMatrix<f64>> {
    level_coefficients(&model.pi(), &model.gammas)
}

pub(crate) fn level_coefficients(pi: &DMatrix<f64>, gammas: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    let k = pi.nrows();
    let p = gammas.len() + 1;
    (1..=p)
        .map(|i| {
            let mut a = if i == 1 {
                DMatrix::identity(k, k) + pi
            } else {
                DMatrix::zeros(k, k)
            };
            if i < p {
                a += &gammas[i - 1];
            }
            if i >= 2 {
                a -= &gammas[i - 2];
            }
            a
        })
        .collect()
}

/// Run the levels-VAR recursion from `initial` (p×K) with the given
/// innovations (n×K), returning the (p+n)×K path.
pub fn simulate_levels(
    a: &[DMatrix<f64>],
    intercept: &DVector<f64>,
    initial: &DMatrix<f64>,
    innovations: &DMatrix<f64>,
) -> DMatrix<f64> {
    let p = a.len();
    let k = intercept.len();
    let n = innovations.nrows();
    let mut out = DMatrix::zeros(p + n, k);
    out.rows_mut(0, p).copy_from(initial);
    for t in p..p + n {
        let mut x = intercept.clone() + innovations.row(t - p).transpose();
        for (j, aj) in a.iter().enumerate() {
            x += aj * out.row(t - j - 1).transpose();
        }
        out.row_mut(t).copy_from(&x.transpose());
    }
    out
}
