//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use svecm::rng::NormalStream;
use svecm::vecm::simulate_levels;
use svecm::wsps::{simulate, ShockSequence, ShockSigmas, WsPsParams};
use svecm::TimePanel;

pub fn alpha3() -> DMatrix<f64> {
    DMatrix::from_column_slice(3, 1, &[-0.2, 0.1, 0.0])
}

pub fn beta3() -> DMatrix<f64> {
    DMatrix::from_column_slice(3, 1, &[1.0, -1.0, 0.5])
}

/// Levels-VAR matrices of the K = 3, r = 1 system with an optional Γ₁.
pub fn levels3(gamma: Option<&DMatrix<f64>>) -> Vec<DMatrix<f64>> {
    let pi = alpha3() * beta3().transpose();
    match gamma {
        None => vec![DMatrix::identity(3, 3) + pi],
        Some(g) => vec![DMatrix::identity(3, 3) + pi + g, -g],
    }
}

pub fn gamma3() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.3, 0.0, 0.1, 0.0, 0.2, 0.0, 0.1, 0.0, -0.2])
}

/// T observations of the K = 3 system; innovations `chol·z` with z standard normal.
pub fn sim3(t: usize, seed: u64, gamma: Option<&DMatrix<f64>>, chol: &DMatrix<f64>) -> TimePanel {
    let a = levels3(gamma);
    let p = a.len();
    let burn = 50;
    let mut s = NormalStream::new(seed);
    let z = DMatrix::from_fn(t + burn, 3, |_, _| s.normal());
    let u = z * chol.transpose();
    let x = simulate_levels(&a, &DVector::zeros(3), &DMatrix::zeros(p, 3), &u);
    let x = x.rows(p + burn, t).into_owned();
    TimePanel::from_matrix(&["x1", "x2", "x3"], 1, x).unwrap()
}

pub fn wsps(t: usize, seed: u64) -> TimePanel {
    let shocks = ShockSequence::draw(t, ShockSigmas::uniform(0.1), seed);
    simulate(&WsPsParams::default(), &shocks, [0.0; 5]).unwrap()
}

/// Gaussian elimination with partial pivoting; returns the solution and
/// the inverse diagonal of `m`.
pub fn solve_spd(m: &[Vec<f64>], rhs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = m.len();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = m[i].clone();
            row.push(rhs[i]);
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| aug[a][c].abs().total_cmp(&aug[b][c].abs())).unwrap();
        aug.swap(c, piv);
        let d = aug[c][c];
        for v in aug[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = aug[r][c];
                if f != 0.0 {
                    let pivot_row = aug[c].clone();
                    for (v, pv) in aug[r].iter_mut().zip(pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
    }
    let x = (0..n).map(|i| aug[i][n]).collect();
    let inv_diag = (0..n).map(|i| aug[i][n + 1 + i]).collect();
    (x, inv_diag)
}

/// Plain least squares `y ~ X` via normal equations: coefficients,
/// standard errors (divisor n − k) and residuals.
pub fn ols(y: &[f64], x: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = y.len();
    let k = x[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for t in 0..n {
        for i in 0..k {
            xty[i] += x[t][i] * y[t];
            for j in 0..k {
                xtx[i][j] += x[t][i] * x[t][j];
            }
        }
    }
    let (b, inv_diag) = solve_spd(&xtx, &xty);
    let resid: Vec<f64> = (0..n)
        .map(|t| y[t] - (0..k).map(|i| x[t][i] * b[i]).sum::<f64>())
        .collect();
    let s2 = resid.iter().map(|e| e * e).sum::<f64>() / (n - k) as f64;
    let se = inv_diag.iter().map(|d| (s2 * d).sqrt()).collect();
    (b, se, resid)
}

/// Reference ADF statistic with `k` lagged differences and a constant,
/// on the sample that starts after `k` differences.
pub fn adf_oracle(x: &[f64], k: usize) -> (f64, usize) {
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut y = Vec::new();
    let mut rows = Vec::new();
    for t in k..dx.len() {
        y.push(dx[t]);
        let mut row = vec![1.0, x[t]];
        for i in 1..=k {
            row.push(dx[t - i]);
        }
        rows.push(row);
    }
    let (b, se, _) = ols(&y, &rows);
    (b[1] / se[1], y.len())
}
