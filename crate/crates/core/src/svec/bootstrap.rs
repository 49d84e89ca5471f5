use nalgebra::DMatrix;
use rayon::prelude::*;

use super::identify::identify_raw;
use super::{long_run_multiplier, IdentifyOptions, SvecError, SvecModel};
use crate::cointegration::BetaRestriction;
use crate::rng::{derive_seed, NormalStream};
use crate::vecm::{estimate, simulate_levels, to_level_var, VecmModel};

/// Replications below this count are refused.
pub const MIN_REPS: usize = 100;
const MAX_FAILURE_SHARE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    pub tvalues_b: DMatrix<f64>,
    pub tvalues_xi_b: DMatrix<f64>,
    pub sd_b: DMatrix<f64>,
    pub sd_xi_b: DMatrix<f64>,
    pub reps: usize,
    pub failed: usize,
}

/// Significance stars for a t-ratio at 10/5/1%.
pub fn stars(t: f64) -> &'static str {
    let a = t.abs();
    if a >= 2.576 {
        "***"
    } else if a >= 1.96 {
        "**"
    } else if a >= 1.645 {
        "*"
    } else {
        ""
    }
}

/// One bootstrap draw: resample centered residuals, rebuild the sample
/// through the levels recursion from the observed initial values, refit
/// with β held at its estimate and re-identify starting from the point B.
fn replicate(
    model: &VecmModel,
    svec: &SvecModel,
    centered: &DMatrix<f64>,
    fixed_beta: &BetaRestriction,
    seed: u64,
) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = centered.nrows();
    let k = model.k;
    let mut stream = NormalStream::new(seed);
    let mut innov = DMatrix::zeros(n, k);
    for t in 0..n {
        let i = stream.index(n);
        innov.row_mut(t).copy_from(&centered.row(i));
    }
    let a = to_level_var(model);
    let x = simulate_levels(&a, &model.level_intercept(), &model.initial, &innov);
    let refit = estimate(
        &x,
        model.names.clone(),
        model.p,
        model.r,
        model.deterministic,
        Some(fixed_beta),
    )
    .ok()?;
    let xi = long_run_multiplier(&refit).ok()?;
    let options = IdentifyOptions {
        restarts: 2,
        seed: derive_seed(seed, 1),
        start: Some(svec.b.clone()),
        ..IdentifyOptions::default()
    };
    let mut fit = identify_raw(&refit.sigma, &xi, refit.t_eff, &svec.pattern, &options).ok()?;
    for j in 0..k {
        if fit.b.column(j).dot(&svec.b.column(j)) < 0.0 {
            fit.b.column_mut(j).neg_mut();
        }
    }
    let xi_b = &xi * &fit.b;
    Some((fit.b, xi_b))
}

fn std_dev(draws: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let (r, c) = draws[0].shape();
    let n = draws.len() as f64;
    let mut mean = DMatrix::zeros(r, c);
    for d in draws {
        mean += *d;
    }
    mean /= n;
    let mut ss = DMatrix::zeros(r, c);
    for d in draws {
        let e = *d - &mean;
        ss += e.component_mul(&e);
    }
    (ss / (n - 1.0)).map(f64::sqrt)
}

fn ratios(point: &DMatrix<f64>, sd: &DMatrix<f64>, zero: &[Vec<bool>]) -> DMatrix<f64> {
    DMatrix::from_fn(point.nrows(), point.ncols(), |i, j| {
        if zero[i][j] || sd[(i, j)] == 0.0 {
            0.0
        } else {
            point[(i, j)] / sd[(i, j)]
        }
    })
}

/// Recursive-design residual bootstrap of the identified impacts.
/// Replications run in parallel; each draws from its own seeded stream and
/// the results are reduced in replication order.
pub fn bootstrap_tvalues(
    model: &VecmModel,
    svec: &SvecModel,
    reps: usize,
    seed: u64,
) -> Result<BootstrapResult, SvecError> {
    if reps < MIN_REPS {
        return Err(SvecError::TooFewReplications(reps));
    }
    let mean = model.residuals.row_mean();
    let centered = DMatrix::from_fn(model.residuals.nrows(), model.k, |t, j| {
        model.residuals[(t, j)] - mean[j]
    });
    let fixed_beta = BetaRestriction::fixed(&model.beta).map_err(|e| SvecError::Vecm(e.into()))?;
    let draws: Vec<Option<(DMatrix<f64>, DMatrix<f64>)>> = (0..reps)
        .into_par_iter()
        .map(|i| replicate(model, svec, &centered, &fixed_beta, derive_seed(seed, i as u64)))
        .collect();
    let ok: Vec<&(DMatrix<f64>, DMatrix<f64>)> = draws.iter().flatten().collect();
    let failed = reps - ok.len();
    if failed as f64 > MAX_FAILURE_SHARE * reps as f64 {
        return Err(SvecError::ResampleFailure { failed, total: reps });
    }
    let bs: Vec<&DMatrix<f64>> = ok.iter().map(|d| &d.0).collect();
    let xs: Vec<&DMatrix<f64>> = ok.iter().map(|d| &d.1).collect();
    let sd_b = std_dev(&bs);
    let sd_xi_b = std_dev(&xs);
    Ok(BootstrapResult {
        tvalues_b: ratios(&svec.b, &sd_b, &svec.pattern.b_zero),
        tvalues_xi_b: ratios(&svec.xi_b, &sd_xi_b, &svec.pattern.xi_b_zero),
        sd_b,
        sd_xi_b,
        reps,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(1.0), "");
        assert_eq!(stars(-1.7), "*");
        assert_eq!(stars(1.96), "**");
        assert_eq!(stars(-3.0), "***");
    }

    #[test]
    fn sd_uses_n_minus_one() {
        let a = DMatrix::from_element(1, 1, 1.0);
        let b = DMatrix::from_element(1, 1, 3.0);
        let sd = std_dev(&[&a, &b]);
        assert!((sd[(0, 0)] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn masked_ratios_are_zero() {
        let p = DMatrix::from_element(1, 2, 1.0);
        let sd = DMatrix::from_element(1, 2, 0.5);
        let t = ratios(&p, &sd, &[vec![true, false]]);
        assert_eq!(t[(0, 0)], 0.0);
        assert_eq!(t[(0, 1)], 2.0);
    }
}
