use nalgebra::{DMatrix, DVector};

use super::{long_run_multiplier, RestrictionPattern, SvecError, SvecModel};
use crate::linalg::{cholesky_lower, commutation, null_space, numeric_rank, unvec, vec};
use crate::rng::NormalStream;
use crate::vecm::VecmModel;

/// Seed of the random feasible points used by [`check_identification`].
const CHECK_SEED: u64 = 0x1DE47;
const CHECK_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifyOptions {
    pub max_iter: usize,
    /// Bound on the projected gradient, measured relative to the scale of B.
    pub tol: f64,
    /// Random starts (in addition to `start`, when given).
    pub restarts: usize,
    pub seed: u64,
    /// Optional first starting value; projected onto the restrictions.
    pub start: Option<DMatrix<f64>>,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-10,
            restarts: 10,
            seed: 0,
            start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identification {
    Exactly,
    Over,
    Under,
}

impl Identification {
    pub fn label(self) -> &'static str {
        match self {
            Identification::Exactly => "exactly identified",
            Identification::Over => "over-identified",
            Identification::Under => "under-identified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationReport {
    pub verdict: Identification,
    /// Largest Jacobian rank over the random points.
    pub jacobian_rank: usize,
    /// K².
    pub required_rank: usize,
    /// Zeros declared in the two masks.
    pub zero_count: usize,
    /// Linearly independent restrictions among them.
    pub constraint_rank: usize,
    /// K(K−1)/2.
    pub order_condition: usize,
    pub redundant: usize,
}

impl IdentificationReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {} zero restrictions, {} independent ({} redundant), {} required; Jacobian rank {}/{}",
            self.verdict.label(),
            self.zero_count,
            self.constraint_rank,
            self.redundant,
            self.order_condition,
            self.jacobian_rank,
            self.required_rank
        )
    }
}

/// Elimination matrix: `vech(A) = L·vec(A)` for symmetric K×K `A`.
fn elimination(k: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(k * (k + 1) / 2, k * k);
    let mut row = 0;
    for j in 0..k {
        for i in j..k {
            l[(row, j * k + i)] = 1.0;
            row += 1;
        }
    }
    l
}

/// Rank check of `[∂vech(BB′)/∂vec(B); R]` at random points satisfying the
/// restrictions.
pub fn check_identification(
    pattern: &RestrictionPattern,
    model: &VecmModel,
) -> Result<IdentificationReport, SvecError> {
    pattern.validate()?;
    let xi = long_run_multiplier(model)?;
    check_identification_with(pattern, &xi)
}

pub fn check_identification_with(
    pattern: &RestrictionPattern,
    xi: &DMatrix<f64>,
) -> Result<IdentificationReport, SvecError> {
    let k = pattern.k();
    if xi.shape() != (k, k) {
        return Err(SvecError::Pattern(format!("pattern is {k}×{k}, Ξ is {:?}", xi.shape())));
    }
    let r = pattern.constraint_matrix(xi);
    let constraint_rank = if r.nrows() == 0 { 0 } else { numeric_rank(&r, 1e-9) };
    let s = null_space(&r, 1e-9);
    let lk = elimination(k);
    let ik = DMatrix::<f64>::identity(k, k);
    let dup = &lk * (DMatrix::<f64>::identity(k * k, k * k) + commutation(k, k));
    let mut stream = NormalStream::new(CHECK_SEED);
    let mut jacobian_rank = 0;
    for _ in 0..CHECK_POINTS {
        let gamma = DVector::from_fn(s.ncols(), |_, _| stream.normal());
        let b = unvec(&(&s * gamma), k, k);
        let top = &dup * b.kronecker(&ik);
        let mut j = DMatrix::zeros(top.nrows() + r.nrows(), k * k);
        j.rows_mut(0, top.nrows()).copy_from(&top);
        j.rows_mut(top.nrows(), r.nrows()).copy_from(&r);
        jacobian_rank = jacobian_rank.max(numeric_rank(&j, 1e-9));
    }
    let order_condition = k * (k - 1) / 2;
    let verdict = if jacobian_rank < k * k {
        Identification::Under
    } else if constraint_rank > order_condition {
        Identification::Over
    } else {
        Identification::Exactly
    };
    let zero_count = pattern.zero_count();
    Ok(IdentificationReport {
        verdict,
        jacobian_rank,
        required_rank: k * k,
        zero_count,
        constraint_rank,
        order_condition,
        redundant: zero_count - constraint_rank,
    })
}

/// `2 ln|det B| + tr((BB′)⁻¹Σ)`, which is `−2/T` times the log-likelihood
/// up to a constant. `None` for a (numerically) singular B.
fn objective(b: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Option<f64> {
    let lu = b.clone().lu();
    let det = lu.determinant();
    if !det.is_finite() || det == 0.0 {
        return None;
    }
    let bi = lu.try_inverse()?;
    let f = 2.0 * det.abs().ln() + (&bi * sigma * bi.transpose()).trace();
    f.is_finite().then_some(f)
}

struct StartOutcome {
    b: DMatrix<f64>,
    f: f64,
    converged: bool,
    iterations: usize,
    gradient: f64,
}

/// Scoring iterations on `vec(B) = S·γ` with step halving.
fn score(
    sigma: &DMatrix<f64>,
    s: &DMatrix<f64>,
    mut gamma: DVector<f64>,
    options: &IdentifyOptions,
) -> Option<StartOutcome> {
    let k = sigma.nrows();
    let kkk = commutation(k, k);
    let ik = DMatrix::<f64>::identity(k, k);
    let mut b = unvec(&(s * &gamma), k, k);
    let mut f = objective(&b, sigma)?;
    let mut grad_max = f64::INFINITY;
    for it in 0..=options.max_iter {
        let bi = b.clone().try_inverse()?;
        let bit = bi.transpose();
        let g = &bit * 2.0 - &bit * &bi * sigma * &bit * 2.0;
        let grad = s.transpose() * vec(&g);
        grad_max = grad.amax();
        let scale = b.amax();
        if grad_max * scale < options.tol {
            return Some(StartOutcome {
                b,
                f,
                converged: true,
                iterations: it,
                gradient: grad_max,
            });
        }
        if it == options.max_iter {
            break;
        }
        let bbt_inv = &bit * &bi;
        let info = (ik.kronecker(&bbt_inv) + bi.kronecker(&bit) * &kkk) * 2.0;
        let h = s.transpose() * info * s;
        let step = match h.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => h.lu().solve(&grad)?,
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &gamma - &step * lambda;
            let bc = unvec(&(s * &cand), k, k);
            if let Some(fc) = objective(&bc, sigma) {
                if fc <= f {
                    gamma = cand;
                    b = bc;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some(StartOutcome {
        b,
        f,
        converged: false,
        iterations: options.max_iter,
        gradient: grad_max,
    })
}

fn random_orthogonal(k: usize, stream: &mut NormalStream) -> DMatrix<f64> {
    let z = DMatrix::from_fn(k, k, |_, _| stream.normal());
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Flip columns so each shock's anchor entry is positive. A masked or zero
/// anchor falls back to the first free nonzero entry of the column.
fn normalize_signs(b: &mut DMatrix<f64>, pattern: &RestrictionPattern) {
    let k = b.nrows();
    for j in 0..k {
        let col_max = b.column(j).amax();
        let usable = |i: usize, b: &DMatrix<f64>| !pattern.b_zero[i][j] && b[(i, j)].abs() > 1e-12 * col_max;
        let anchor = pattern.sign_rows[j];
        let row = if usable(anchor, b) {
            Some(anchor)
        } else {
            (0..k).find(|&i| usable(i, b))
        };
        if let Some(i) = row {
            if b[(i, j)] < 0.0 {
                b.column_mut(j).neg_mut();
            }
        }
    }
}

/// Maximize the likelihood of `ε = B⁻¹u` subject to the pattern.
pub fn identify(
    model: &VecmModel,
    pattern: &RestrictionPattern,
    options: &IdentifyOptions,
) -> Result<SvecModel, SvecError> {
    pattern.validate()?;
    if pattern.k() != model.k {
        return Err(SvecError::Pattern(format!(
            "pattern is {}×{}, model has K = {}",
            pattern.k(),
            pattern.k(),
            model.k
        )));
    }
    let xi = long_run_multiplier(model)?;
    let report = check_identification_with(pattern, &xi)?;
    if report.verdict == Identification::Under {
        return Err(SvecError::NotIdentified {
            rank: report.jacobian_rank,
            required: report.required_rank,
        });
    }
    identify_raw(&model.sigma, &xi, model.t_eff, pattern, options)
}

/// Identification from a covariance and long-run multiplier, without the
/// rank check.
pub fn identify_raw(
    sigma: &DMatrix<f64>,
    xi: &DMatrix<f64>,
    t_eff: usize,
    pattern: &RestrictionPattern,
    options: &IdentifyOptions,
) -> Result<SvecModel, SvecError> {
    let k = sigma.nrows();
    let chol = cholesky_lower(sigma).map_err(|_| SvecError::SingularSigma)?;
    let r = pattern.constraint_matrix(xi);
    let s = null_space(&r, 1e-9);
    let mut stream = NormalStream::new(options.seed);
    let mut starts: Vec<DMatrix<f64>> = Vec::with_capacity(options.restarts + 1);
    if let Some(b0) = &options.start {
        starts.push(b0.clone());
    }
    for _ in 0..options.restarts {
        starts.push(&chol * random_orthogonal(k, &mut stream));
    }
    let n_starts = starts.len();
    let mut best: Option<StartOutcome> = None;
    let mut converged_count = 0;
    for b0 in starts {
        let gamma = s.transpose() * vec(&b0);
        let Some(out) = score(sigma, &s, gamma, options) else {
            continue;
        };
        if !out.converged {
            continue;
        }
        converged_count += 1;
        let better = match &best {
            None => true,
            Some(cur) => out.f < cur.f - 1e-10 * (1.0 + cur.f.abs()),
        };
        if better {
            best = Some(out);
        }
    }
    let best = best.ok_or(SvecError::NoConvergence { starts: n_starts })?;
    let mut b = best.b;
    for i in 0..k {
        for j in 0..k {
            if pattern.b_zero[i][j] {
                b[(i, j)] = 0.0;
            }
        }
    }
    normalize_signs(&mut b, pattern);
    let xi_b = xi * &b;
    let loglik = -(t_eff as f64) / 2.0 * (k as f64 * (2.0 * std::f64::consts::PI).ln() + best.f);
    Ok(SvecModel {
        b,
        xi: xi.clone(),
        xi_b,
        loglik,
        converged: true,
        iterations: best.iterations,
        gradient: best.gradient,
        starts_converged: converged_count,
        pattern: pattern.clone(),
        tvalues_b: None,
        tvalues_xi_b: None,
    })
}
