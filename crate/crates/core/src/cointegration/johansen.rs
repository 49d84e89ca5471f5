use nalgebra::DMatrix;

use super::{trace_critical_values, CointegrationError, Deterministic, RankDecision, RankTestResult};
use crate::dataset::TimePanel;
use crate::linalg::{cholesky_lower, residualize, sorted_symmetric_eigen};

/// Regressor blocks of the error-correction form over the effective sample
/// `t = p..T−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Regressors {
    /// ΔX_t, n×K.
    pub z0: DMatrix<f64>,
    /// X_{t−1} (with a trailing column of ones for a restricted constant).
    pub z1: DMatrix<f64>,
    /// ΔX_{t−1}, …, ΔX_{t−p+1} followed by a column of ones for an
    /// unrestricted constant.
    pub z2: DMatrix<f64>,
}

pub fn build_regressors(x: &DMatrix<f64>, p: usize, deterministic: Deterministic) -> Regressors {
    let (t, k) = x.shape();
    let n = t - p;
    let k1 = k + usize::from(deterministic == Deterministic::RestrictedConstant);
    let m = k * (p - 1) + usize::from(deterministic == Deterministic::UnrestrictedConstant);
    let mut z0 = DMatrix::zeros(n, k);
    let mut z1 = DMatrix::zeros(n, k1);
    let mut z2 = DMatrix::zeros(n, m);
    for (row, tt) in (p..t).enumerate() {
        for c in 0..k {
            z0[(row, c)] = x[(tt, c)] - x[(tt - 1, c)];
            z1[(row, c)] = x[(tt - 1, c)];
            for lag in 1..p {
                z2[(row, (lag - 1) * k + c)] = x[(tt - lag, c)] - x[(tt - lag - 1, c)];
            }
        }
        if k1 > k {
            z1[(row, k)] = 1.0;
        }
        if m > k * (p - 1) {
            z2[(row, m - 1)] = 1.0;
        }
    }
    Regressors { z0, z1, z2 }
}

/// Solution of the reduced-rank eigenproblem `|λ S₁₁ − S₁₀ S₀₀⁻¹ S₀₁| = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRank {
    pub eigenvalues: Vec<f64>,
    /// Columns normalized so that `vᵀ S₁₁ v = I`.
    pub vectors: DMatrix<f64>,
}

/// Solve the eigenproblem by whitening with the Cholesky factor of `S₁₁`.
pub fn solve_reduced_rank(
    s00: &DMatrix<f64>,
    s01: &DMatrix<f64>,
    s11: &DMatrix<f64>,
) -> Result<ReducedRank, CointegrationError> {
    let l1 = cholesky_lower(s11).map_err(|_| CointegrationError::SingularMoments)?;
    let l0 = cholesky_lower(s00).map_err(|_| CointegrationError::SingularMoments)?;
    // N = L0⁻¹ S01 L1⁻ᵀ, so that L1⁻¹ S10 S00⁻¹ S01 L1⁻ᵀ = NᵀN.
    let a = l0
        .solve_lower_triangular(s01)
        .ok_or(CointegrationError::SingularMoments)?;
    let nt = l1
        .solve_lower_triangular(&a.transpose())
        .ok_or(CointegrationError::SingularMoments)?;
    let m = &nt * nt.transpose();
    let asym = (&m - m.transpose()).abs().max();
    if asym > 1e-12 * m.abs().max().max(1.0) {
        return Err(CointegrationError::SingularMoments);
    }
    let (values, v) = sorted_symmetric_eigen(&m);
    let vectors = l1
        .transpose()
        .solve_upper_triangular(&v)
        .ok_or(CointegrationError::SingularMoments)?;
    let eigenvalues = values.into_iter().map(|l| l.clamp(0.0, 1.0 - 1e-15)).collect();
    Ok(ReducedRank {
        eigenvalues,
        vectors,
    })
}

/// Johansen reduced-rank regression, kept for reuse by the VECM estimator
/// and the restriction tests.
#[derive(Debug, Clone, PartialEq)]
pub struct JohansenFit {
    pub k: usize,
    pub p: usize,
    pub deterministic: Deterministic,
    /// Effective sample size T − p.
    pub t_eff: usize,
    /// All eigenvalues (K, or K+1 with a restricted constant), descending.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    pub s00: DMatrix<f64>,
    pub s01: DMatrix<f64>,
    pub s11: DMatrix<f64>,
    pub regressors: Regressors,
}

impl JohansenFit {
    pub fn estimate(
        x: &DMatrix<f64>,
        p: usize,
        deterministic: Deterministic,
    ) -> Result<Self, CointegrationError> {
        let (t, k) = x.shape();
        if p == 0 {
            return Err(CointegrationError::InvalidArgument("lag order p must be ≥ 1".into()));
        }
        if t <= p || t - p <= 2 * k {
            return Err(CointegrationError::TooShort(format!(
                "T = {t}, p = {p}, K = {k}: need T − p > 2K"
            )));
        }
        let regressors = build_regressors(x, p, deterministic);
        let r0 = residualize(&regressors.z0, &regressors.z2)?;
        let r1 = residualize(&regressors.z1, &regressors.z2)?;
        let n = (t - p) as f64;
        let s00 = r0.transpose() * &r0 / n;
        let s01 = r0.transpose() * &r1 / n;
        let s11 = r1.transpose() * &r1 / n;
        let rr = solve_reduced_rank(&s00, &s01, &s11)?;
        Ok(Self {
            k,
            p,
            deterministic,
            t_eff: t - p,
            eigenvalues: rr.eigenvalues,
            vectors: rr.vectors,
            s00,
            s01,
            s11,
            regressors,
        })
    }

    /// The K eigenvalues that carry the rank information.
    pub fn rank_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.k]
    }

    /// Trace statistics `−T Σ_{i>r} ln(1 − λᵢ)` for r = 0..K−1.
    pub fn trace_stats(&self) -> Vec<f64> {
        trace_from_eigenvalues(self.rank_eigenvalues(), self.t_eff)
    }

    /// First `r` eigenvectors (unnormalized cointegration vectors).
    pub fn beta(&self, r: usize) -> DMatrix<f64> {
        self.vectors.columns(0, r).into_owned()
    }

    pub fn rank_test(&self) -> Result<RankTestResult, CointegrationError> {
        let trace_stats = self.trace_stats();
        let critical_values = (0..self.k)
            .map(|r| trace_critical_values(self.k - r, self.deterministic))
            .collect::<Result<Vec<_>, _>>()?;
        let selected_rank = RankDecision::from_stats(&trace_stats, &critical_values);
        Ok(RankTestResult {
            eigenvalues: self.rank_eigenvalues().to_vec(),
            trace_stats,
            critical_values,
            selected_rank,
            deterministic: self.deterministic,
            sl: None,
        })
    }
}

/// Accumulated from the smallest eigenvalue upwards so that consecutive
/// statistics differ by exactly one term.
pub(crate) fn trace_from_eigenvalues(eigenvalues: &[f64], t_eff: usize) -> Vec<f64> {
    let k = eigenvalues.len();
    let mut out = vec![0.0; k];
    let mut acc = 0.0;
    for i in (0..k).rev() {
        acc += -(t_eff as f64) * (1.0 - eigenvalues[i]).ln();
        out[i] = acc;
    }
    out
}

/// Johansen trace test on a panel with `p` lags in levels.
pub fn johansen(
    panel: &TimePanel,
    p: usize,
    deterministic: Deterministic,
) -> Result<(RankTestResult, JohansenFit), CointegrationError> {
    let fit = JohansenFit::estimate(panel.values(), p, deterministic)?;
    Ok((fit.rank_test()?, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::NormalStream;

    fn walks(seed: u64, t: usize, k: usize) -> DMatrix<f64> {
        let mut s = NormalStream::new(seed);
        let mut x = DMatrix::zeros(t, k);
        for r in 1..t {
            for c in 0..k {
                x[(r, c)] = x[(r - 1, c)] + s.normal();
            }
        }
        x
    }

    #[test]
    fn regressor_layout() {
        let x = DMatrix::from_fn(6, 2, |r, c| (r * r + c) as f64);
        let z = build_regressors(&x, 2, Deterministic::UnrestrictedConstant);
        assert_eq!(z.z0.shape(), (4, 2));
        assert_eq!(z.z2.shape(), (4, 3));
        // first effective row is t = 2
        assert_eq!(z.z0[(0, 0)], 4.0 - 1.0);
        assert_eq!(z.z1[(0, 1)], 2.0);
        assert_eq!(z.z2[(0, 0)], 1.0 - 0.0);
        assert_eq!(z.z2[(0, 2)], 1.0);
        let z = build_regressors(&x, 1, Deterministic::RestrictedConstant);
        assert_eq!(z.z1.shape(), (5, 3));
        assert_eq!(z.z2.ncols(), 0);
    }

    #[test]
    fn eigenvectors_are_s11_orthonormal() {
        let x = walks(11, 120, 3);
        let fit = JohansenFit::estimate(&x, 2, Deterministic::UnrestrictedConstant).unwrap();
        let g = fit.vectors.transpose() * &fit.s11 * &fit.vectors;
        assert!((g - DMatrix::identity(3, 3)).abs().max() < 1e-9);
        assert!(fit.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(fit.eigenvalues.iter().all(|&l| (0.0..1.0).contains(&l)));
    }

    #[test]
    fn trace_differences_are_single_terms() {
        let x = walks(12, 200, 4);
        let fit = JohansenFit::estimate(&x, 1, Deterministic::UnrestrictedConstant).unwrap();
        let tr = fit.trace_stats();
        for j in 0..3 {
            let term = -(fit.t_eff as f64) * (1.0 - fit.eigenvalues[j]).ln();
            assert!((tr[j] - tr[j + 1] - term).abs() <= 1e-12 * tr[0]);
            assert!(tr[j] > tr[j + 1]);
        }
    }

    #[test]
    fn restricted_constant_has_extra_null_root() {
        let x = walks(13, 150, 3);
        let fit = JohansenFit::estimate(&x, 1, Deterministic::RestrictedConstant).unwrap();
        assert_eq!(fit.eigenvalues.len(), 4);
        assert_eq!(fit.rank_test().unwrap().eigenvalues.len(), 3);
    }

    #[test]
    fn too_short_and_bad_lag() {
        let x = walks(1, 10, 5);
        assert!(matches!(
            JohansenFit::estimate(&x, 1, Deterministic::UnrestrictedConstant),
            Err(CointegrationError::TooShort(_))
        ));
        let x = walks(1, 50, 2);
        assert!(JohansenFit::estimate(&x, 0, Deterministic::UnrestrictedConstant).is_err());
    }

    #[test]
    fn constant_column_is_singular() {
        let mut x = walks(2, 60, 2);
        x.column_mut(1).fill(3.0);
        assert_eq!(
            JohansenFit::estimate(&x, 1, Deterministic::UnrestrictedConstant).unwrap_err(),
            CointegrationError::SingularMoments
        );
    }
}
