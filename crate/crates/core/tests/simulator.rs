//! Sample moments of the wage-setting/price-setting simulator.

use svecm::wsps::{
    analytic_fevd_u, increments, ShockSequence, ShockSigmas, WageShock, WsPsParams, WAGE_SHOCK,
};

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n
}

/// With every shock cumulating, the per-shock variance shares of Δu are
/// the squared-coefficient shares.
#[test]
fn empirical_du_shares_match_analytic() {
    let params = WsPsParams::default();
    let sigmas = ShockSigmas {
        p: 0.1,
        s: 0.2,
        w: 0.05,
        d: 0.15,
        l: 0.1,
    };
    let t = 50_000;
    let shocks = ShockSequence::draw(t, sigmas, 123);
    let du: Vec<f64> = increments(&params, &shocks, WageShock::Permanent).column(4).iter().copied().collect();
    let total = variance(&du);
    let analytic = analytic_fevd_u(&params, &sigmas).unwrap();
    let c = svecm::wsps::impact_matrix(&params);
    // analytic order (s, p, w, d, l); shock matrix order (p, s, w, d, l)
    let order = [1usize, 0, 2, 3, 4];
    let eps = shocks.matrix();
    for (k, &j) in order.iter().enumerate() {
        let part: Vec<f64> = eps.column(j).iter().map(|e| c[(4, j)] * e).collect();
        let share = variance(&part) / total;
        assert!((share - analytic[k]).abs() < 0.01, "shock {j}: {share} vs {}", analytic[k]);
    }
}

/// With the transitory wage shock, Δu carries ε_w twice (impact and
/// reversal), doubling its variance contribution.
#[test]
fn transitory_wage_shock_doubles_its_du_variance() {
    let params = WsPsParams::default();
    let only_w = ShockSigmas {
        p: 0.0,
        s: 0.0,
        w: 0.1,
        d: 0.0,
        l: 0.0,
    };
    let shocks = ShockSequence::draw(50_000, only_w, 9);
    let du = |mode| -> f64 {
        let v: Vec<f64> = increments(&params, &shocks, mode).column(4).iter().copied().collect();
        variance(&v)
    };
    let ratio = du(WageShock::Transitory) / du(WageShock::Permanent);
    assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    let c = svecm::wsps::impact_matrix(&params);
    assert!(c[(4, WAGE_SHOCK)] > 0.0);
}

#[test]
fn productivity_reveals_supply_shock() {
    let params = WsPsParams::default();
    let shocks = ShockSequence::draw(500, ShockSigmas::uniform(0.1), 4);
    for mode in [WageShock::Transitory, WageShock::Permanent] {
        let inc = increments(&params, &shocks, mode);
        for t in 0..500 {
            assert!((inc[(t, 1)] - shocks.eps_s[t]).abs() < 1e-14);
        }
    }
}
