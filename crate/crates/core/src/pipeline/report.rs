//! Plain-text tables for the report.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::cointegration::{BetaTestResult, RankTestResult};
use crate::dynamics::FevdResult;
use crate::svec::stars;
use crate::unitroot::IntegrationReport;

/// `y-n` → `(y − n)`; plain names unchanged.
pub fn pretty_name(name: &str) -> String {
    if name.contains('-') {
        format!("({})", name.replace('-', " − "))
    } else {
        name.to_string()
    }
}

pub fn render_adf(names: &[String], reports: &[IntegrationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>10} {:>5} {:>8} {:>10} {:>5} {:>8}  order",
        "variable", "level", "lags", "5% cv", "diff", "lags", "5% cv"
    );
    for (n, r) in names.iter().zip(reports) {
        let _ = writeln!(
            out,
            "{:<10} {:>10.4} {:>5} {:>8.4} {:>10.4} {:>5} {:>8.4}  {}",
            n,
            r.level.statistic,
            r.level.lags_used,
            r.level.critical_values.five,
            r.difference.statistic,
            r.difference.lags_used,
            r.difference.critical_values.five,
            r.verdict
        );
    }
    out
}

/// Eigenvalue, H₀, trace statistic with 5%/1% critical values, and the
/// S&L statistic with its critical values.
pub fn render_rank_table(res: &RankTestResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>10}  {:<7} {:>9} {:>7} {:>7}   {:>9} {:>7} {:>7}",
        "Eigenvalue", "H0", "Trace", "5%", "1%", "S&L", "5%", "1%"
    );
    for (j, ((ev, tr), cv)) in res
        .eigenvalues
        .iter()
        .zip(&res.trace_stats)
        .zip(&res.critical_values)
        .enumerate()
    {
        let h0 = format!("r = {j}");
        let sl = match &res.sl {
            Some(sl) => format!(
                "{:>9.2} {:>7.2} {:>7.2}",
                sl.stats[j], sl.critical_values[j].five, sl.critical_values[j].one
            ),
            None => format!("{:>9} {:>7} {:>7}", "-", "-", "-"),
        };
        let _ = writeln!(
            out,
            "{:>10.4}  {:<7} {:>9.2} {:>7.2} {:>7.2}   {}",
            ev, h0, tr, cv.five, cv.one, sl
        );
    }
    let _ = writeln!(
        out,
        "Trace test selects r = {} at 5% and r = {} at 1%.",
        res.selected_rank.five, res.selected_rank.one
    );
    if let Some(sl) = &res.sl {
        let _ = writeln!(
            out,
            "S&L test selects r = {} at 5% and r = {} at 1%.",
            sl.selected_rank.five, sl.selected_rank.one
        );
    }
    out
}

/// The relation `β′x (+ c) = 0` solved for the variable `lhs`, e.g.
/// `(w − p) = (y − n) − 0.4330·u`. Falls back to the first nonzero
/// coefficient when `lhs` carries none.
pub fn render_relation(beta: &DVector<f64>, constant: Option<f64>, names: &[String], lhs: &str) -> String {
    let tiny = 5e-9 * beta.amax().max(f64::MIN_POSITIVE);
    let pivot = names
        .iter()
        .position(|n| n == lhs)
        .filter(|&i| beta[i].abs() > tiny)
        .or_else(|| beta.iter().position(|b| b.abs() > tiny))
        .unwrap_or(0);
    let scale = beta[pivot];
    let mut terms: Vec<(f64, String)> = Vec::new();
    for (i, n) in names.iter().enumerate() {
        if i != pivot {
            terms.push((-beta[i] / scale, pretty_name(n)));
        }
    }
    if let Some(c) = constant {
        terms.push((-c / scale, String::new()));
    }
    let mut rhs = String::new();
    for (c, label) in terms {
        let shown = format!("{:.4}", c.abs());
        if shown == "0.0000" {
            continue;
        }
        let body = if label.is_empty() {
            shown
        } else if shown == "1.0000" {
            label
        } else {
            format!("{shown}·{label}")
        };
        if rhs.is_empty() {
            if c < 0.0 {
                rhs.push('−');
            }
        } else {
            rhs.push_str(if c < 0.0 { " − " } else { " + " });
        }
        rhs.push_str(&body);
    }
    if rhs.is_empty() {
        rhs.push('0');
    }
    format!("{} = {}", pretty_name(&names[pivot]), rhs)
}

pub fn render_beta_test(res: &BetaTestResult, description: &str) -> String {
    format!(
        "LR test of {description}: LR = {:.4}, df = {}, p-value = {:.4}\n",
        res.lr, res.df, res.p_value
    )
}

pub fn render_matrix(m: &DMatrix<f64>, rows: &[String], cols: &[String]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<10}", "");
    for c in cols {
        let _ = write!(out, " {:>10}", c);
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let _ = write!(out, "{:<10}", r);
        for j in 0..m.ncols() {
            let _ = write!(out, " {:>10.4}", m[(i, j)]);
        }
        out.push('\n');
    }
    out
}

/// Coefficient cell: `0.1255 (3.21)***`, or `0 (0)` for a restricted entry.
pub fn impact_cell(value: f64, t: Option<f64>, zero: bool) -> String {
    if zero {
        return match t {
            Some(_) => "0 (0)".into(),
            None => "0".into(),
        };
    }
    match t {
        Some(t) => format!("{value:.4} ({t:.2}){}", stars(t)),
        None => format!("{value:.4}"),
    }
}

/// Impact matrix with t-ratios in parentheses.
pub fn render_impact(
    m: &DMatrix<f64>,
    t: Option<&DMatrix<f64>>,
    zero: &[Vec<bool>],
    rows: &[String],
    cols: &[String],
) -> String {
    let width = 19;
    let mut out = String::new();
    let _ = write!(out, "{:<10}", "");
    for c in cols {
        let _ = write!(out, " {:>width$}", c);
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let _ = write!(out, "{:<10}", r);
        for j in 0..m.ncols() {
            let cell = impact_cell(m[(i, j)], t.map(|t| t[(i, j)]), zero[i][j]);
            let _ = write!(out, " {:>width$}", cell);
        }
        out.push('\n');
    }
    out
}

/// Shares rounded to hundredths so that the row still sums to exactly
/// 1.00: floor everything, then hand the missing hundredths to the entries
/// with the largest remainders (earliest first on ties).
pub fn round_shares(row: &[f64]) -> Vec<String> {
    let scaled: Vec<f64> = row.iter().map(|v| v * 100.0).collect();
    let mut units: Vec<i64> = scaled.iter().map(|v| v.floor() as i64).collect();
    let missing = 100 - units.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(missing.max(0) as usize) {
        units[i] += 1;
    }
    units
        .iter()
        .map(|u| format!("{}.{:02}", u / 100, u % 100))
        .collect()
}

/// Variance-decomposition table of one variable: periods × shocks.
pub fn render_fevd(fevd: &FevdResult, variable: usize, shocks: &[String]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>6}", "Period");
    for s in shocks {
        let _ = write!(out, " {:>6}", s);
    }
    out.push('\n');
    for (h, m) in fevd.horizons.iter().zip(&fevd.shares) {
        let row: Vec<f64> = m.row(variable).iter().copied().collect();
        let _ = write!(out, "{:>6}", h);
        for cell in round_shares(&row) {
            let _ = write!(out, " {:>6}", cell);
        }
        out.push('\n');
    }
    out
}
