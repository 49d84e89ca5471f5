//! Acceptance suite: one PASS/FAIL line per criterion. The binary exits
//! nonzero when any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use svecm::cointegration::{sl_critical_values, RankDecision};
use svecm::dynamics::{differenced, fevd_from_responses, DEFAULT_FEVD_HORIZONS};
use svecm::pipeline::{run_pipeline, PipelineConfig};
use svecm::rng::NormalStream;
use svecm::svec::{identify, long_run_multiplier, IdentifyOptions, RestrictionPattern, SvecModel};
use svecm::unitroot::{integration_order, Level};
use svecm::vecm::{simulate_levels, VecmModel};
use svecm::wsps::{analytic_fevd_u, ShockSigmas, WsPsParams};
use svecm::{
    adf_test, fevd, fit_vecm, irf, johansen, save_csv, to_level_var, trace_critical_values, AdfDeterministic,
    Deterministic, LagSelection,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Reduced form plus structural fit of one WS-PS sample.
fn wsps_fit(t: usize, seed: u64) -> (VecmModel, SvecModel) {
    let panel = common::wsps(t, seed);
    let m = fit_vecm(&panel, 1, 1, Deterministic::UnrestrictedConstant, None).expect("vecm");
    let opts = IdentifyOptions {
        seed,
        ..IdentifyOptions::default()
    };
    let s = identify(&m, &RestrictionPattern::wsps_default(), &opts).expect("identify");
    (m, s)
}

fn criterion_1() -> Outcome {
    let trace = [(5, 69.61, 77.29), (4, 47.71, 54.23), (3, 29.80, 35.21), (2, 15.41, 19.62)];
    let sl = [(5, 54.59, 61.53), (4, 35.76, 41.58), (3, 20.96, 25.71), (2, 9.84, 13.48)];
    let mut bad = Vec::new();
    for (kr, five, one) in trace {
        let cv = trace_critical_values(kr, Deterministic::UnrestrictedConstant).unwrap();
        if cv.five != five || cv.one != one {
            bad.push(format!("trace K-r={kr}: {}/{}", cv.five, cv.one));
        }
    }
    for (kr, five, one) in sl {
        let cv = sl_critical_values(kr).unwrap();
        if cv.five != five || cv.one != one {
            bad.push(format!("S&L K-r={kr}: {}/{}", cv.five, cv.one));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "16/16 values exact".into() } else { bad.join("; ") })
}

fn criterion_2() -> Outcome {
    let stats = [99.39, 47.43, 20.45, 4.24];
    let cvs: Vec<_> = (0..4)
        .map(|r| trace_critical_values(5 - r, Deterministic::UnrestrictedConstant).unwrap())
        .collect();
    let d = RankDecision::from_stats(&stats, &cvs);
    outcome(d.five == 1 && d.one == 1, format!("r = {} at 5%, r = {} at 1%", d.five, d.one))
}

fn criterion_3() -> Outcome {
    let truth = common::beta3();
    let results: Vec<(usize, [f64; 3])> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let panel = common::sim3(2000, 30_000 + i, None, &DMatrix::identity(3, 3));
            let (test, _) = johansen(&panel, 1, Deterministic::UnrestrictedConstant).unwrap();
            let m = fit_vecm(&panel, 1, 1, Deterministic::UnrestrictedConstant, None).unwrap();
            let b = m.beta.column(0) / m.beta[(0, 0)];
            let err = [0, 1, 2].map(|j| (b[j] - truth[(j, 0)]).abs());
            (test.selected_rank.five, err)
        })
        .collect();
    let hits = results.iter().filter(|(r, _)| *r == 1).count();
    let medians: Vec<f64> = (0..3)
        .map(|j| {
            let mut v: Vec<f64> = results.iter().map(|(_, e)| e[j]).collect();
            v.sort_by(f64::total_cmp);
            (v[49] + v[50]) / 2.0
        })
        .collect();
    let pass = hits >= 90 && medians.iter().all(|&m| m < 0.05);
    outcome(
        pass,
        format!(
            "r = 1 in {hits}/100; median |beta error| = ({:.4}, {:.4}, {:.4})",
            medians[0], medians[1], medians[2]
        ),
    )
}

fn constraint_violation(m: &VecmModel, s: &SvecModel) -> (f64, f64, f64) {
    let fit = (&s.b * s.b.transpose() - &m.sigma).norm() / m.sigma.norm();
    let mut masked: f64 = 0.0;
    for i in 0..m.k {
        for j in 0..m.k {
            if s.pattern.b_zero[i][j] {
                masked = masked.max(s.b[(i, j)].abs());
            }
            if s.pattern.xi_b_zero[i][j] {
                masked = masked.max(s.xi_b[(i, j)].abs());
            }
        }
    }
    let xi = long_run_multiplier(m).unwrap();
    let orth = (m.beta.transpose() * &xi).amax().max((&xi * &m.alpha).amax());
    (fit, masked, orth)
}

fn criterion_4() -> Outcome {
    let mut fits: Vec<(VecmModel, SvecModel)> = (0..40u64).into_par_iter().map(|i| wsps_fit(500, 40_000 + i)).collect();
    let chol = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.4, 1.0]);
    for i in 0..20u64 {
        let panel = common::sim3(500, 41_000 + i, None, &chol);
        let m = fit_vecm(&panel, 1, 1, Deterministic::UnrestrictedConstant, None).unwrap();
        let s = identify(&m, &RestrictionPattern::recursive(3), &IdentifyOptions::default()).unwrap();
        fits.push((m, s));
    }
    let converged: Vec<_> = fits.iter().filter(|(_, s)| s.converged).collect();
    let (mut fit, mut masked, mut orth) = (0.0f64, 0.0f64, 0.0f64);
    for (m, s) in &converged {
        let (a, b, c) = constraint_violation(m, s);
        fit = fit.max(a);
        masked = masked.max(b);
        orth = orth.max(c);
    }
    let pass = !converged.is_empty() && fit < 1e-6 && masked < 1e-6 && orth < 1e-10;
    outcome(
        pass,
        format!(
            "{} of {} runs converged; max rel ||BB'-S|| = {fit:.2e}, max masked = {masked:.2e}, max |b'Xi|,|Xi a| = {orth:.2e}",
            converged.len(),
            fits.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let expected = [1.0, 1.0, 1.0, -1.0, 1.0];
    let hits = (0..100u64)
        .into_par_iter()
        .filter(|&i| {
            let (_, s) = wsps_fit(2000, 50_000 + i);
            (0..5).all(|j| s.b[(4, j)].signum() == expected[j])
        })
        .count();
    outcome(hits >= 90, format!("u row signs (+,+,+,-,+) in {hits}/100"))
}

fn criterion_6() -> Outcome {
    // Normalization on fitted models.
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let (m, s) = wsps_fit(500, 60_000 + i);
        let f = fevd(&s, &m, &DEFAULT_FEVD_HORIZONS).unwrap();
        for sh in &f.shares {
            for r in 0..5 {
                worst = worst.max((sh.row(r).sum() - 1.0).abs());
            }
        }
    }
    let norm_ok = worst < 1e-8;

    // Long-horizon shares of Δu against the analytic shares.
    let params = WsPsParams::default();
    let (m, s) = wsps_fit(50_000, 61_000);
    let h = 200;
    let d = differenced(&irf(&s, &m, h, false));
    let long = fevd_from_responses(&d.responses, &[h]).unwrap();
    let impact = fevd_from_responses(&d.responses, &[1]).unwrap();
    let a = analytic_fevd_u(&params, &ShockSigmas::uniform(0.1)).unwrap();
    // analytic order (s, p, w, d, l); model order (p, s, w, d, l)
    let analytic = [a[1], a[0], a[2], a[3], a[4]];
    let gap = |f: &DMatrix<f64>| (0..5).map(|j| (f[(4, j)] - analytic[j]).abs()).fold(0.0, f64::max);
    let long_gap = gap(&long.shares[0]);
    let impact_gap = gap(&impact.shares[0]);
    let fmt = |f: &DMatrix<f64>| (0..5).map(|j| format!("{:.3}", f[(4, j)])).collect::<Vec<_>>().join(", ");
    outcome(
        norm_ok && long_gap < 0.02,
        format!(
            "max |row sum - 1| = {worst:.1e}; du shares at h={h}: ({}), analytic ({}), max gap {long_gap:.3}; at h=1 gap {impact_gap:.3}",
            fmt(&long.shares[0]),
            analytic.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let (m, s) = wsps_fit(2000, 70_000);
    let a = to_level_var(&m);
    let r = irf(&s, &m, 200, false);
    let impact_exact = r.responses[0] == s.b;

    let w = 2;
    let peak = (0..=200).flat_map(|h| (0..5).map(move |i| (h, i))).map(|(h, i)| r.responses[h][(i, w)].abs()).fold(0.0, f64::max);
    let tail = (0..5).map(|i| r.responses[200][(i, w)].abs()).fold(0.0, f64::max);
    let decays = tail < 1e-3 * peak;

    let p = a.len();
    let mut sim_gap: f64 = 0.0;
    let h = 50;
    let base_init = DMatrix::from_fn(p, 5, |t, j| 0.1 * (t + j) as f64);
    let nu = m.level_intercept();
    let zero = DMatrix::zeros(h + 1, 5);
    let base = simulate_levels(&a, &nu, &base_init, &zero);
    for j in 0..5 {
        let mut u = DMatrix::zeros(h + 1, 5);
        u.row_mut(0).copy_from(&s.b.column(j).transpose());
        let shocked = simulate_levels(&a, &nu, &base_init, &u);
        for t in 0..=h {
            for i in 0..5 {
                let resp = shocked[(p + t, i)] - base[(p + t, i)];
                sim_gap = sim_gap.max((resp - r.responses[t][(i, j)]).abs());
            }
        }
    }
    let sim_ok = sim_gap < 1e-10;
    outcome(
        impact_exact && decays && sim_ok,
        format!(
            "Theta_0 == B: {impact_exact}; wage-shock tail/peak at H=200 = {:.1e}; max simulation gap h<=50 = {sim_gap:.1e}",
            tail / peak
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for (seed, k) in [(801u64, 0usize), (802, 1), (803, 2), (804, 4)] {
        let mut st = NormalStream::new(seed);
        let mut level = 0.0;
        let x: Vec<f64> = (0..200)
            .map(|_| {
                level += st.normal();
                level
            })
            .collect();
        let r = adf_test(&x, AdfDeterministic::Constant, k, LagSelection::Fixed).unwrap();
        let (stat, _) = common::adf_oracle(&x, k);
        worst = worst.max((r.statistic - stat).abs());
    }
    let oracle_ok = worst < 1e-8;

    let counts = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let panel = common::wsps(500, 80_000 + i);
            let mut c = [0usize; 5];
            for (j, slot) in c.iter_mut().enumerate() {
                let series: Vec<f64> = panel.column(j).iter().copied().collect();
                let rep = integration_order(&series, AdfDeterministic::Constant, 4, LagSelection::Aic, Level::Five).unwrap();
                *slot = usize::from(rep.verdict == "I(1)");
            }
            c
        })
        .reduce(|| [0; 5], |a, b| [0, 1, 2, 3, 4].map(|j| a[j] + b[j]));
    let i1_ok = counts.iter().all(|&c| c >= 90);
    outcome(
        oracle_ok && i1_ok,
        format!(
            "max |ADF - oracle| = {worst:.1e}; I(1) verdicts per variable (p, y-n, w-p, n, u) = {:?}/100",
            counts
        ),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    save_csv(&common::wsps(2000, 42), &data, "year").unwrap();
    let digest = |out: &str| {
        let mut cfg = PipelineConfig::new(&data, 42);
        cfg.out_dir = dir.path().join(out);
        let res = run_pipeline(&cfg).expect("pipeline");
        let bytes = std::fs::read(cfg.out_dir.join("report.txt")).unwrap();
        assert_eq!(bytes, res.report.as_bytes());
        Sha256::digest(&bytes)
    };
    let a = digest("run1");
    let b = digest("run2");
    let hex: String = a.iter().take(8).map(|b| format!("{b:02x}")).collect();
    outcome(a == b, format!("sha256 {hex}... identical: {}", a == b))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("critical values", criterion_1),
        ("rank decision replay", criterion_2),
        ("Monte Carlo rank and beta recovery", criterion_3),
        ("structural constraints", criterion_4),
        ("oracle sign recovery", criterion_5),
        ("FEVD normalization and oracle match", criterion_6),
        ("IRF properties", criterion_7),
        ("ADF oracle and I(1) property", criterion_8),
        ("determinism", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<38} {}  [{:.1}s] {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
