//! Wage-setting / price-setting labour-market simulator.
//!
//! Structural innovations `(ε^p, ε^s, ε^w, ε^d, ε^l)` move the system
//! `(p, y-n, w-p, n, u)` through the impact matrix `C` below, one row per
//! variable:
//!
//! ```text
//! Δp      = (1+γ₂)ε^p − ε^s + ε^w + γ₁ε^d
//! Δ(y−n)  = ε^s
//! Δ(w−p)  = −ε^p + ε^s
//! Δn      = −φ(1+γ₂)ε^p + (φ+a−1)ε^s − φε^w + φ(1−γ₁)ε^d
//! Δu      = [(φ(1+γ₂)−α)ε^p − (φ+a+α−1)ε^s + φε^w − φ(1−γ₁)ε^d + ε^l] / (1+b)
//! ```
//!
//! By default the wage shock is transitory in levels: its impact is
//! reversed the following period, so it never cumulates. The resulting
//! system has one cointegration relation and is an exact VECM(1). The
//! alternative [`WageShock::Permanent`] cumulates every increment, which
//! yields five independent stochastic trends.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{TimePanel, SHOCK_NAMES, SYSTEM_NAMES};
use crate::rng::NormalStream;

/// Column of `ε^w` in the system shock order.
pub const WAGE_SHOCK: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("every shock coefficient of Δu is zero")]
    AllZeroCoefficients,
    #[error("shock sequence has length {0}; need at least 1")]
    EmptySequence(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsPsParams {
    /// Demand elasticity φ.
    pub phi: f64,
    /// Production shift coefficient.
    pub a: f64,
    /// Labour-supply wage elasticity α.
    pub alpha_l: f64,
    /// Discouragement coefficient.
    pub b: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Hysteresis parameter; 0 means total hysteresis (unit root in u).
    pub lambda: f64,
}

impl Default for WsPsParams {
    fn default() -> Self {
        Self {
            phi: 0.5,
            a: 0.1,
            alpha_l: 0.1,
            b: 0.5,
            gamma1: 0.3,
            gamma2: 0.2,
            lambda: 0.0,
        }
    }
}

impl WsPsParams {
    pub fn validate(&self) -> Result<(), OracleError> {
        let finite = [
            self.phi,
            self.a,
            self.alpha_l,
            self.b,
            self.gamma1,
            self.gamma2,
            self.lambda,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(OracleError::InvalidParams("non-finite parameter".into()));
        }
        if self.phi <= 0.0 || self.alpha_l <= 0.0 || self.b <= 0.0 {
            return Err(OracleError::InvalidParams("φ, α and b must be positive".into()));
        }
        for (name, v) in [("γ1", self.gamma1), ("γ2", self.gamma2), ("λ", self.lambda)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(OracleError::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Persistence of unemployment, `(1+b−λ)/(1+b)`.
    pub fn rho(&self) -> f64 {
        (1.0 + self.b - self.lambda) / (1.0 + self.b)
    }
}

/// How the wage shock enters the levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum WageShock {
    /// Impact effect only, reversed the next period.
    #[default]
    Transitory,
    /// Cumulated like every other shock.
    Permanent,
}

/// Standard deviations of the structural innovations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockSigmas {
    pub p: f64,
    pub s: f64,
    pub w: f64,
    pub d: f64,
    pub l: f64,
}

impl Default for ShockSigmas {
    fn default() -> Self {
        Self::uniform(0.1)
    }
}

impl ShockSigmas {
    pub fn uniform(sigma: f64) -> Self {
        Self {
            p: sigma,
            s: sigma,
            w: sigma,
            d: sigma,
            l: sigma,
        }
    }

    /// In system shock order `(p, s, w, d, l)`.
    pub fn as_array(&self) -> [f64; 5] {
        [self.p, self.s, self.w, self.d, self.l]
    }
}

/// Drawn innovations, one entry per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockSequence {
    pub eps_d: Vec<f64>,
    pub eps_s: Vec<f64>,
    pub eps_p: Vec<f64>,
    pub eps_w: Vec<f64>,
    pub eps_l: Vec<f64>,
    pub sigmas: ShockSigmas,
    pub seed: Option<u64>,
}

impl ShockSequence {
    /// Draws from one [`NormalStream`], per period in the order
    /// `d, s, p, w, l`, each scaled by its σ.
    pub fn draw(t: usize, sigmas: ShockSigmas, seed: u64) -> Self {
        let mut stream = NormalStream::new(seed);
        let mut seq = Self::zeros(t);
        for i in 0..t {
            seq.eps_d[i] = sigmas.d * stream.normal();
            seq.eps_s[i] = sigmas.s * stream.normal();
            seq.eps_p[i] = sigmas.p * stream.normal();
            seq.eps_w[i] = sigmas.w * stream.normal();
            seq.eps_l[i] = sigmas.l * stream.normal();
        }
        seq.sigmas = sigmas;
        seq.seed = Some(seed);
        seq
    }

    pub fn zeros(t: usize) -> Self {
        Self {
            eps_d: vec![0.0; t],
            eps_s: vec![0.0; t],
            eps_p: vec![0.0; t],
            eps_w: vec![0.0; t],
            eps_l: vec![0.0; t],
            sigmas: ShockSigmas::default(),
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.eps_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_s.is_empty()
    }

    /// Period-`t` innovations in system shock order `(p, s, w, d, l)`.
    pub fn at(&self, t: usize) -> [f64; 5] {
        [self.eps_p[t], self.eps_s[t], self.eps_w[t], self.eps_d[t], self.eps_l[t]]
    }

    /// T×5 matrix in system shock order.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), 5, |t, j| self.at(t)[j])
    }
}

/// Impact matrix `C`: rows `(p, y-n, w-p, n, u)`, columns `(ε^p, ε^s, ε^w, ε^d, ε^l)`.
pub fn impact_matrix(params: &WsPsParams) -> DMatrix<f64> {
    let WsPsParams {
        phi,
        a,
        alpha_l: al,
        b,
        gamma1: g1,
        gamma2: g2,
        ..
    } = *params;
    let ib = 1.0 / (1.0 + b);
    #[rustfmt::skip]
    let c = DMatrix::from_row_slice(5, 5, &[
        1.0 + g2, -1.0, 1.0, g1, 0.0,
        0.0, 1.0, 0.0, 0.0, 0.0,
        -1.0, 1.0, 0.0, 0.0, 0.0,
        -phi * (1.0 + g2), phi + a - 1.0, -phi, phi * (1.0 - g1), 0.0,
        ib * (phi * (1.0 + g2) - al), -ib * (phi + a + al - 1.0), ib * phi, -ib * phi * (1.0 - g1), ib,
    ]);
    c
}

/// True contemporaneous impact of one-σ shocks, `C·diag(σ)`.
pub fn true_b(params: &WsPsParams, sigmas: &ShockSigmas) -> DMatrix<f64> {
    let s = sigmas.as_array();
    let mut c = impact_matrix(params);
    for j in 0..5 {
        c.column_mut(j).scale_mut(s[j]);
    }
    c
}

/// True long-run impact under a transitory wage shock: `true_b` with the
/// `ε^w` column set to zero.
pub fn true_long_run(params: &WsPsParams, sigmas: &ShockSigmas) -> DMatrix<f64> {
    let mut c = true_b(params, sigmas);
    c.column_mut(WAGE_SHOCK).fill(0.0);
    c
}

/// Per-period increments of `(p, y-n, w-p, n, u)` before any hysteresis
/// damping of u.
pub fn increments(params: &WsPsParams, shocks: &ShockSequence, mode: WageShock) -> DMatrix<f64> {
    let c = impact_matrix(params);
    let t = shocks.len();
    let mut out = DMatrix::zeros(t, 5);
    for i in 0..t {
        let e = nalgebra::DVector::from_row_slice(&shocks.at(i));
        let mut d = &c * e;
        if mode == WageShock::Transitory && i > 0 {
            d -= c.column(WAGE_SHOCK) * shocks.eps_w[i - 1];
        }
        out.row_mut(i).copy_from(&d.transpose());
    }
    out
}

/// Simulate levels with a transitory wage shock.
pub fn simulate(
    params: &WsPsParams,
    shocks: &ShockSequence,
    initial_levels: [f64; 5],
) -> Result<TimePanel, OracleError> {
    simulate_with(params, shocks, initial_levels, WageShock::Transitory)
}

/// Levels at `t = 0..T−1`; `initial_levels` are the pre-sample values, so
/// period 0 already carries the period-0 innovations. With λ > 0 the
/// unemployment deviation follows `dev_t = ρ·dev_{t−1} + Δu_t`.
pub fn simulate_with(
    params: &WsPsParams,
    shocks: &ShockSequence,
    initial_levels: [f64; 5],
    mode: WageShock,
) -> Result<TimePanel, OracleError> {
    params.validate()?;
    if shocks.is_empty() {
        return Err(OracleError::EmptySequence(0));
    }
    let inc = increments(params, shocks, mode);
    let rho = params.rho();
    let t = shocks.len();
    let mut x = DMatrix::zeros(t, 5);
    let mut level = initial_levels;
    let mut dev_u = 0.0;
    for i in 0..t {
        for j in 0..4 {
            level[j] += inc[(i, j)];
        }
        dev_u = rho * dev_u + inc[(i, 4)];
        level[4] = initial_levels[4] + dev_u;
        for j in 0..5 {
            x[(i, j)] = level[j];
        }
    }
    TimePanel::from_matrix(&SYSTEM_NAMES, 1, x).map_err(|e| OracleError::InvalidParams(e.to_string()))
}

/// Increments of output, employment, wage, price and unemployment.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub dy: Vec<f64>,
    pub dn: Vec<f64>,
    pub dw: Vec<f64>,
    pub dp: Vec<f64>,
    pub du: Vec<f64>,
}

/// Impact increments of the underlying variables from the structural
/// shocks. These are the realized increments when every shock is cumulated;
/// with a transitory wage shock the following period adds the reversal.
pub fn reconstruct_output_wage(params: &WsPsParams, shocks: &ShockSequence) -> Reconstruction {
    let WsPsParams {
        phi,
        a,
        alpha_l: al,
        b,
        gamma1: g1,
        gamma2: g2,
        ..
    } = *params;
    let t = shocks.len();
    let mut r = Reconstruction {
        dy: Vec::with_capacity(t),
        dn: Vec::with_capacity(t),
        dw: Vec::with_capacity(t),
        dp: Vec::with_capacity(t),
        du: Vec::with_capacity(t),
    };
    for i in 0..t {
        let (ed, es, ep, ew, el) = (
            shocks.eps_d[i],
            shocks.eps_s[i],
            shocks.eps_p[i],
            shocks.eps_w[i],
            shocks.eps_l[i],
        );
        r.dy.push(phi * (1.0 - g1) * ed - phi * (1.0 + g2) * ep - phi * ew + (phi + a) * es);
        r.dn.push(phi * (1.0 - g1) * ed - phi * (1.0 + g2) * ep - phi * ew + (phi + a - 1.0) * es);
        r.dw.push(ew + g1 * ed + g2 * ep);
        r.dp.push(ew + (1.0 + g2) * ep + g1 * ed - es);
        r.du.push(
            (-phi * (1.0 - g1) * ed + phi * ew + el + (phi * (1.0 + g2) - al) * ep
                - (phi + a + al - 1.0) * es)
                / (1.0 + b),
        );
    }
    r
}

/// Variance shares of Δu by shock, ordered `(ε^s, ε^p, ε^w, ε^d, ε^l)`:
/// `(c_j σ_j)² / Σ_k (c_k σ_k)²`.
pub fn analytic_fevd_u(params: &WsPsParams, sigmas: &ShockSigmas) -> Result<[f64; 5], OracleError> {
    let WsPsParams {
        phi,
        a,
        alpha_l: al,
        b,
        gamma1: g1,
        gamma2: g2,
        ..
    } = *params;
    let ib = 1.0 / (1.0 + b);
    let c = [
        -ib * (phi + a + al - 1.0),
        ib * (phi * (1.0 + g2) - al),
        ib * phi,
        -ib * phi * (1.0 - g1),
        ib,
    ];
    let s = [sigmas.s, sigmas.p, sigmas.w, sigmas.d, sigmas.l];
    let v: Vec<f64> = c.iter().zip(s).map(|(c, s)| (c * s).powi(2)).collect();
    let total: f64 = v.iter().sum();
    if total == 0.0 {
        return Err(OracleError::AllZeroCoefficients);
    }
    Ok([v[0] / total, v[1] / total, v[2] / total, v[3] / total, v[4] / total])
}

/// Machine-readable record written next to a simulated CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub params: WsPsParams,
    pub wage_shock: WageShock,
    pub seed: u64,
    pub nobs: usize,
    pub sigmas: ShockSigmas,
    pub initial_levels: [f64; 5],
    pub variables: Vec<String>,
    pub shocks: Vec<String>,
    /// Row-major.
    pub true_b: Vec<Vec<f64>>,
    /// Row-major; zero wage column only when the wage shock is transitory.
    pub true_long_run: Vec<Vec<f64>>,
}

impl Sidecar {
    pub fn new(
        params: WsPsParams,
        wage_shock: WageShock,
        seed: u64,
        nobs: usize,
        sigmas: ShockSigmas,
        initial_levels: [f64; 5],
    ) -> Self {
        let rows = |m: DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        let long_run = match wage_shock {
            WageShock::Transitory => true_long_run(&params, &sigmas),
            WageShock::Permanent => true_b(&params, &sigmas),
        };
        Self {
            params,
            wage_shock,
            seed,
            nobs,
            sigmas,
            initial_levels,
            variables: SYSTEM_NAMES.iter().map(|s| s.to_string()).collect(),
            shocks: SHOCK_NAMES.iter().map(|s| s.to_string()).collect(),
            true_b: rows(true_b(&params, &sigmas)),
            true_long_run: rows(long_run),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shocks_constant_levels() {
        let init = [1.0, 2.0, 3.0, 4.0, 0.05];
        let x = simulate(&WsPsParams::default(), &ShockSequence::zeros(20), init).unwrap();
        for t in 0..20 {
            for j in 0..5 {
                assert_eq!(x.values()[(t, j)], init[j]);
            }
        }
    }

    #[test]
    fn unit_productivity_shock() {
        let mut s = ShockSequence::zeros(5);
        s.eps_s[1] = 1.0;
        let x = simulate(&WsPsParams::default(), &s, [0.0; 5]).unwrap();
        let v = x.values();
        assert_eq!(v[(1, 1)] - v[(0, 1)], 1.0);
        assert_eq!(v[(1, 2)] - v[(0, 2)], 1.0);
        assert_eq!(v[(1, 0)] - v[(0, 0)], -1.0);
    }

    #[test]
    fn full_indexation_neutralizes_demand() {
        let params = WsPsParams {
            phi: 1.0,
            gamma1: 1.0,
            ..WsPsParams::default()
        };
        let mut s = ShockSequence::zeros(4);
        s.eps_d[2] = 1.0;
        let x = simulate(&params, &s, [0.0; 5]).unwrap();
        assert!(x.values().column(3).iter().all(|&v| v == 0.0));
        assert!(x.values().column(4).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wage_shock_reverses() {
        let mut s = ShockSequence::zeros(4);
        s.eps_w[1] = 1.0;
        let x = simulate(&WsPsParams::default(), &s, [0.0; 5]).unwrap();
        let c = impact_matrix(&WsPsParams::default());
        for j in 0..5 {
            assert_eq!(x.values()[(1, j)], c[(j, WAGE_SHOCK)]);
            assert_eq!(x.values()[(2, j)], 0.0);
        }
        let xp = simulate_with(&WsPsParams::default(), &s, [0.0; 5], WageShock::Permanent).unwrap();
        assert_eq!(xp.values()[(3, 0)], 1.0);
    }

    #[test]
    fn reconstruction_examples() {
        let p = WsPsParams::default();
        let mut s = ShockSequence::zeros(2);
        s.eps_w[0] = 1.0;
        s.eps_d[1] = 1.0;
        let q = WsPsParams { gamma1: 0.0, ..p };
        let r = reconstruct_output_wage(&q, &s);
        assert_eq!((r.dw[0], r.dp[0], r.dy[0]), (1.0, 1.0, -q.phi));
        assert_eq!((r.dy[1], r.dw[1]), (q.phi, 0.0));
    }

    #[test]
    fn reconstruction_matches_system() {
        let p = WsPsParams::default();
        let s = ShockSequence::draw(50, ShockSigmas::default(), 9);
        let r = reconstruct_output_wage(&p, &s);
        let inc = increments(&p, &s, WageShock::Permanent);
        for t in 0..50 {
            assert!((r.dy[t] - r.dn[t] - s.eps_s[t]).abs() < 1e-14);
            assert!((r.dw[t] - r.dp[t] - (s.eps_s[t] - s.eps_p[t])).abs() < 1e-14);
            assert!((r.dp[t] - inc[(t, 0)]).abs() < 1e-14);
            assert!((r.dn[t] - inc[(t, 3)]).abs() < 1e-14);
            assert!((r.du[t] - inc[(t, 4)]).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_shares() {
        let p = WsPsParams {
            phi: 1.0,
            a: 0.0,
            alpha_l: 0.5,
            b: 0.5,
            gamma1: 0.0,
            gamma2: 0.0,
            lambda: 0.0,
        };
        let sh = analytic_fevd_u(&p, &ShockSigmas::uniform(1.0)).unwrap();
        let expect = [1.0 / 14.0, 1.0 / 14.0, 4.0 / 14.0, 4.0 / 14.0, 4.0 / 14.0];
        for (a, b) in sh.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let only_s = ShockSigmas {
            s: 1.0,
            p: 0.0,
            w: 0.0,
            d: 0.0,
            l: 0.0,
        };
        assert_eq!(analytic_fevd_u(&p, &only_s).unwrap(), [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            analytic_fevd_u(&p, &ShockSigmas::uniform(0.0)),
            Err(OracleError::AllZeroCoefficients)
        );
    }

    #[test]
    fn default_unemployment_signs() {
        let c = impact_matrix(&WsPsParams::default());
        let signs: Vec<f64> = c.row(4).iter().map(|v| v.signum()).collect();
        assert_eq!(signs, vec![1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(c.rank(1e-10), 5);
    }

    #[test]
    fn rho_and_validation() {
        let mut p = WsPsParams::default();
        assert_eq!(p.rho(), 1.0);
        p.lambda = 0.5;
        assert!((p.rho() - 1.0 / 1.5).abs() < 1e-15);
        p.gamma1 = 1.5;
        assert!(p.validate().is_err());
    }

    #[test]
    fn sidecar_round_trip() {
        let sc = Sidecar::new(
            WsPsParams::default(),
            WageShock::Transitory,
            42,
            100,
            ShockSigmas::default(),
            [0.0; 5],
        );
        let back: Sidecar = serde_json::from_str(&sc.to_json()).unwrap();
        assert_eq!(back, sc);
        assert!(sc.true_long_run.iter().all(|r| r[WAGE_SHOCK] == 0.0));
    }
}
