//! Impulse responses and forecast-error variance decompositions of an
//! identified model.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::svec::SvecModel;
use crate::vecm::{to_level_var, VecmModel};

/// Horizons reported in variance-decomposition tables.
pub const DEFAULT_FEVD_HORIZONS: [usize; 6] = [1, 2, 5, 10, 15, 20];
pub const TABLE_HORIZON: usize = 20;
pub const PLOT_HORIZON: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("no horizons requested")]
    EmptyHorizons,
    #[error("horizons must be ≥ 1")]
    ZeroHorizon,
    #[error("variable {variable} has zero forecast-error variance")]
    DegenerateVariance { variable: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrfResult {
    /// `responses[h][(i, j)]`: response of variable i to shock j after h periods.
    pub responses: Vec<DMatrix<f64>>,
    pub accumulated: bool,
}

impl IrfResult {
    pub fn horizon(&self) -> usize {
        self.responses.len() - 1
    }

    /// Path of variable `i` after shock `j`.
    pub fn path(&self, i: usize, j: usize) -> Vec<f64> {
        self.responses.iter().map(|m| m[(i, j)]).collect()
    }
}

/// Moving-average matrices of the levels VAR:
/// `Φ₀ = I`, `Φ_h = Σ_{j=1}^{min(h,p)} A_j Φ_{h−j}`.
pub fn ma_coefficients(a: &[DMatrix<f64>], horizon: usize) -> Vec<DMatrix<f64>> {
    let k = a[0].nrows();
    let mut phi = Vec::with_capacity(horizon + 1);
    phi.push(DMatrix::identity(k, k));
    for h in 1..=horizon {
        let mut m = DMatrix::zeros(k, k);
        for (j, aj) in a.iter().enumerate().take(h) {
            m += aj * &phi[h - j - 1];
        }
        phi.push(m);
    }
    phi
}

/// Responses `Θ_h = Φ_h·B`, optionally cumulated over horizons.
pub fn irf_from(a: &[DMatrix<f64>], b: &DMatrix<f64>, horizon: usize, accumulated: bool) -> IrfResult {
    let mut responses: Vec<DMatrix<f64>> = ma_coefficients(a, horizon).iter().map(|p| p * b).collect();
    if accumulated {
        for h in 1..responses.len() {
            let prev = responses[h - 1].clone();
            responses[h] += prev;
        }
    }
    IrfResult {
        responses,
        accumulated,
    }
}

pub fn irf(svec: &SvecModel, vecm: &VecmModel, horizon: usize, accumulated: bool) -> IrfResult {
    irf_from(&to_level_var(vecm), &svec.b, horizon, accumulated)
}

/// Responses of the first differences, `Θ_h − Θ_{h−1}`.
pub fn differenced(irf: &IrfResult) -> IrfResult {
    assert!(!irf.accumulated, "difference of level responses only");
    let mut out = Vec::with_capacity(irf.responses.len());
    for h in 0..irf.responses.len() {
        let m = if h == 0 {
            irf.responses[0].clone()
        } else {
            &irf.responses[h] - &irf.responses[h - 1]
        };
        out.push(m);
    }
    IrfResult {
        responses: out,
        accumulated: false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FevdResult {
    pub horizons: Vec<usize>,
    /// `shares[n][(i, j)]`: share of variable i's `horizons[n]`-step
    /// forecast-error variance due to shock j.
    pub shares: Vec<DMatrix<f64>>,
}

impl FevdResult {
    pub fn at(&self, horizon: usize) -> Option<&DMatrix<f64>> {
        self.horizons.iter().position(|&h| h == horizon).map(|i| &self.shares[i])
    }
}

/// Decomposition from precomputed responses; an `h`-step forecast error
/// involves `Θ₀..Θ_{h−1}`.
pub fn fevd_from_responses(
    responses: &[DMatrix<f64>],
    horizons: &[usize],
) -> Result<FevdResult, DynamicsError> {
    if horizons.is_empty() {
        return Err(DynamicsError::EmptyHorizons);
    }
    if horizons.contains(&0) {
        return Err(DynamicsError::ZeroHorizon);
    }
    let (k, m) = responses[0].shape();
    let mut shares = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let mut acc = DMatrix::zeros(k, m);
        for theta in &responses[..h] {
            acc += theta.component_mul(theta);
        }
        for i in 0..k {
            let total: f64 = acc.row(i).sum();
            if total <= 0.0 || !total.is_finite() {
                return Err(DynamicsError::DegenerateVariance { variable: i });
            }
            acc.row_mut(i).unscale_mut(total);
        }
        shares.push(acc);
    }
    Ok(FevdResult {
        horizons: horizons.to_vec(),
        shares,
    })
}

pub fn fevd(svec: &SvecModel, vecm: &VecmModel, horizons: &[usize]) -> Result<FevdResult, DynamicsError> {
    let hmax = horizons.iter().copied().max().ok_or(DynamicsError::EmptyHorizons)?;
    let r = irf(svec, vecm, hmax.saturating_sub(1), false);
    fevd_from_responses(&r.responses, horizons)
}
