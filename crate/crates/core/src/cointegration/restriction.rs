use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::johansen::{solve_reduced_rank, JohansenFit};
use super::{CointegrationError, Deterministic};
use crate::linalg::{null_space, numeric_rank};
use crate::vecm::VecmModel;

/// Linear restriction `β = H·φ` on the K×r cointegration matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaRestriction {
    /// K×s design matrix of full column rank.
    pub h: DMatrix<f64>,
    pub description: String,
}

impl BetaRestriction {
    pub fn from_design(h: DMatrix<f64>, description: impl Into<String>) -> Result<Self, CointegrationError> {
        let s = h.ncols();
        if s == 0 || s > h.nrows() || numeric_rank(&h, 1e-10) != s {
            return Err(CointegrationError::InconsistentRestriction(format!(
                "H ({}x{}) must have full column rank s ≤ K",
                h.nrows(),
                s
            )));
        }
        Ok(Self {
            h,
            description: description.into(),
        })
    }

    /// Restriction given as `Rᵀβ = 0` with R of size K×q.
    pub fn from_constraints(r: &DMatrix<f64>, description: impl Into<String>) -> Result<Self, CointegrationError> {
        let h = null_space(&r.transpose(), 1e-10);
        Self::from_design(h, description)
    }

    /// β proportional to the columns of `beta` (s = r): fixes the space.
    pub fn fixed(beta: &DMatrix<f64>) -> Result<Self, CointegrationError> {
        Self::from_design(beta.clone(), "beta fixed")
    }

    pub fn unrestricted(k: usize) -> Self {
        Self {
            h: DMatrix::identity(k, k),
            description: "unrestricted".into(),
        }
    }

    /// Wage-setting relation over `(p, y-n, w-p, n, u)`: no price or
    /// employment level, and real wage and productivity with equal and
    /// opposite weights, i.e. `β ∝ (0, −1, 1, 0, c)`.
    pub fn wage_setting() -> Self {
        let mut h = DMatrix::zeros(5, 2);
        h[(1, 0)] = -1.0;
        h[(2, 0)] = 1.0;
        h[(4, 1)] = 1.0;
        Self {
            h,
            description: "(w-p) - (y-n) + c*u stationary".into(),
        }
    }

    pub fn s(&self) -> usize {
        self.h.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaTestResult {
    pub lr: f64,
    pub df: usize,
    pub p_value: f64,
    /// Restricted β (K×r), normalized on its first nonzero coefficient.
    pub beta: DMatrix<f64>,
    pub restricted_eigenvalues: Vec<f64>,
    pub unrestricted_eigenvalues: Vec<f64>,
}

/// Design matrix acting on `[X; 1]` when the constant is restricted: the
/// constant's loading stays free.
fn extended_design(h: &DMatrix<f64>, deterministic: Deterministic) -> DMatrix<f64> {
    if deterministic != Deterministic::RestrictedConstant {
        return h.clone();
    }
    let (k, s) = h.shape();
    let mut out = DMatrix::zeros(k + 1, s + 1);
    out.view_mut((0, 0), (k, s)).copy_from(h);
    out[(k, s)] = 1.0;
    out
}

/// Restricted eigenproblem on `HᵀS₁₁H`; returns eigenvalues and the first
/// `r` columns of `H·φ` (rows cover the constant when it is restricted).
pub(crate) fn restricted_beta(
    fit: &JohansenFit,
    restriction: &BetaRestriction,
    r: usize,
) -> Result<(Vec<f64>, DMatrix<f64>), CointegrationError> {
    if restriction.h.nrows() != fit.k {
        return Err(CointegrationError::InconsistentRestriction(format!(
            "H has {} rows, system has {} variables",
            restriction.h.nrows(),
            fit.k
        )));
    }
    if restriction.s() < r {
        return Err(CointegrationError::InconsistentRestriction(format!(
            "s = {} < r = {r}",
            restriction.s()
        )));
    }
    let h = extended_design(&restriction.h, fit.deterministic);
    let s01 = &fit.s01 * &h;
    let s11 = h.transpose() * &fit.s11 * &h;
    let rr = solve_reduced_rank(&fit.s00, &s01, &s11)?;
    let beta = &h * rr.vectors.columns(0, r);
    Ok((rr.eigenvalues, beta))
}

/// Normalize the K×r matrix so that the r×r block formed by its first
/// linearly independent rows is the identity. For r = 1 the first nonzero
/// coefficient becomes 1. Extra rows (e.g. a restricted constant) follow.
pub fn normalize_beta(beta: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let r = beta.ncols();
    let scale = beta.rows(0, k).abs().max();
    let mut rows: Vec<usize> = Vec::with_capacity(r);
    for i in 0..k {
        if rows.len() == r {
            break;
        }
        let mut cand = rows.clone();
        cand.push(i);
        let block = beta.select_rows(cand.iter());
        if numeric_rank(&block, 1e-8) == cand.len() && block.abs().max() > 1e-12 * scale {
            rows.push(i);
        }
    }
    if rows.len() < r {
        return beta.clone();
    }
    let block = beta.select_rows(rows.iter());
    match block.try_inverse() {
        Some(inv) => beta * inv,
        None => beta.clone(),
    }
}

/// Likelihood-ratio test of `β = Hφ`:
/// `LR = T Σ_{i≤r} [ln(1−λᵢ*) − ln(1−λᵢ)]`, χ² with `r(K−s)` degrees of freedom.
pub fn test_beta_restriction(
    model: &VecmModel,
    restriction: &BetaRestriction,
) -> Result<BetaTestResult, CointegrationError> {
    let r = model.r;
    if r == 0 {
        return Err(CointegrationError::NotEstimated);
    }
    let fit = &model.johansen;
    let (restricted, beta_full) = restricted_beta(fit, restriction, r)?;
    let unrestricted = fit.eigenvalues[..r].to_vec();
    let t = fit.t_eff as f64;
    let lr: f64 = (0..r)
        .map(|i| t * ((1.0 - restricted[i]).ln() - (1.0 - unrestricted[i]).ln()))
        .sum();
    let df = r * (fit.k - restriction.s());
    let p_value = if df == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(df as f64).expect("df > 0");
        1.0 - chi.cdf(lr.max(0.0))
    };
    let beta = normalize_beta(&beta_full, fit.k).rows(0, fit.k).into_owned();
    Ok(BetaTestResult {
        lr,
        df,
        p_value,
        beta,
        restricted_eigenvalues: restricted[..r].to_vec(),
        unrestricted_eigenvalues: unrestricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wage_setting_design() {
        let b = BetaRestriction::wage_setting();
        assert_eq!(b.s(), 2);
        // (0,-1,1,0,0.433) lies in the span of H.
        let target = DMatrix::from_column_slice(5, 1, &[0.0, -1.0, 1.0, 0.0, 0.433]);
        let phi = DMatrix::from_column_slice(2, 1, &[1.0, 0.433]);
        assert_eq!(&b.h * phi, target);
    }

    #[test]
    fn constraints_to_design() {
        // β₁ = 0 and β₂ + β₃ = 0 in a 4-variable system.
        let r = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let b = BetaRestriction::from_constraints(&r, "test").unwrap();
        assert_eq!(b.s(), 2);
        assert!((r.transpose() * &b.h).abs().max() < 1e-12);
    }

    #[test]
    fn rank_deficient_design_rejected() {
        let h = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(BetaRestriction::from_design(h, "bad").is_err());
    }

    #[test]
    fn normalization_on_first_nonzero() {
        let b = DMatrix::from_column_slice(4, 1, &[0.0, -2.0, 2.0, 1.0]);
        let n = normalize_beta(&b, 4);
        assert_eq!(n.as_slice(), &[0.0, 1.0, -1.0, -0.5]);
        let b2 = DMatrix::from_column_slice(3, 2, &[2.0, 0.0, 1.0, 0.0, 4.0, 2.0]);
        let n2 = normalize_beta(&b2, 3);
        assert!((n2.rows(0, 2) - DMatrix::<f64>::identity(2, 2)).abs().max() < 1e-15);
    }
}
