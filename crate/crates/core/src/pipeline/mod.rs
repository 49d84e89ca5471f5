//! End-to-end driver: unit roots, lag order, rank tests, VECM, structural
//! identification, bootstrap, impulse responses and variance decompositions,
//! written to one text report plus CSV and SVG artifacts.

pub mod config;
pub mod report;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::cointegration::{
    johansen, select_lag, sl_test, test_beta_restriction, BetaRestriction, BetaTestResult, RankTestResult,
};
use crate::dataset::{build_system, load_csv, TimePanel, SHOCK_NAMES, SYSTEM_NAMES};
use crate::dynamics::{fevd, irf, FevdResult, IrfResult};
use crate::rng::derive_seed;
use crate::svec::{
    bootstrap_tvalues, check_identification, identify, BootstrapResult, IdentificationReport, IdentifyOptions,
    RestrictionPattern, SvecModel,
};
use crate::unitroot::{integration_order, IntegrationReport, Level};
use crate::vecm::{fit_vecm, VecmModel};

pub use config::{ConfigError, PipelineConfig};

/// Marker line written to the report when a stage fails.
pub const FAILED_MARKER: &str = "FAILED";

/// Last stage to run; each includes everything before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Adf,
    /// Lag order and rank tests.
    Rank,
    /// Reduced-form VECM, with the β test when configured.
    Vecm,
    /// Identification and bootstrap t-values.
    Svec,
    Irf,
    Fevd,
}

#[derive(Debug, Error)]
#[error("stage `{stage}`: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub message: String,
}

fn stage<E: std::fmt::Display>(name: &'static str) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError {
        stage: name,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: String,
    pub panel: TimePanel,
    pub adf: Vec<IntegrationReport>,
    pub lag: usize,
    pub rank_test: RankTestResult,
    pub rank: usize,
    pub beta_test: Option<BetaTestResult>,
    pub vecm: VecmModel,
    pub identification: IdentificationReport,
    pub svec: SvecModel,
    pub bootstrap: Option<BootstrapResult>,
    pub irf: IrfResult,
    pub fevd: FevdResult,
    pub files: Vec<PathBuf>,
}

/// The system panel named by the config: built from roles, a column
/// subset, or every data column.
pub fn load_system(cfg: &PipelineConfig) -> Result<TimePanel, PipelineError> {
    let raw = load_csv(&cfg.data, &cfg.year_column).map_err(stage("load"))?;
    if let Some(roles) = &cfg.roles {
        return build_system(&raw, roles, cfg.transform).map_err(stage("load"));
    }
    match &cfg.columns {
        None => Ok(raw),
        Some(cols) => {
            let idx: Vec<usize> = cols
                .iter()
                .map(|c| {
                    raw.column_index(c).ok_or_else(|| PipelineError {
                        stage: "load",
                        message: format!("column `{c}` not in data"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let values = raw.values().select_columns(idx.iter());
            TimePanel::new(cols.clone(), raw.years().to_vec(), values).map_err(stage("load"))
        }
    }
}

/// Shock labels: the structural names for the five-variable system,
/// `e1..eK` otherwise.
pub fn shock_names(panel: &TimePanel) -> Vec<String> {
    if panel.names().iter().map(String::as_str).eq(SYSTEM_NAMES) {
        SHOCK_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (1..=panel.nvars()).map(|i| format!("e{i}")).collect()
    }
}

/// Configured pattern, else the long-run pattern for the five-variable
/// system, else a recursive ordering.
pub fn resolve_pattern(cfg: &PipelineConfig, panel: &TimePanel) -> Result<RestrictionPattern, PipelineError> {
    let k = panel.nvars();
    let base = match &cfg.pattern {
        Some(p) => p.clone(),
        None if k == 5 => RestrictionPattern::wsps_default(),
        None => RestrictionPattern::recursive(k),
    };
    let mut p = base.with_names(panel.names(), &shock_names(panel));
    if let Some(rows) = &cfg.sign_rows {
        p.sign_rows = rows
            .iter()
            .map(|r| {
                panel.column_index(r).ok_or_else(|| PipelineError {
                    stage: "identify",
                    message: format!("sign row `{r}` is not a variable"),
                })
            })
            .collect::<Result<_, _>>()?;
    }
    p.validate().map_err(stage("identify"))?;
    Ok(p)
}

fn restriction_for(name: &str) -> Option<BetaRestriction> {
    match name {
        "wage_setting" => Some(BetaRestriction::wage_setting()),
        _ => None,
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(stage("write"))?;
    w.write_record(header).map_err(stage("write"))?;
    for r in rows {
        w.write_record(r).map_err(stage("write"))?;
    }
    w.flush().map_err(stage("write"))
}

fn matrix_csv(path: &Path, m: &DMatrix<f64>, rows: &[String], cols: &[String]) -> Result<(), PipelineError> {
    let mut header = vec!["row".to_string()];
    header.extend(cols.iter().cloned());
    let body: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut line = vec![r.clone()];
            line.extend(m.row(i).iter().map(|&v| num(v)));
            line
        })
        .collect();
    write_csv(path, &header, &body)
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    report: String,
}

impl Run<'_> {
    fn section(&mut self, title: &str) {
        let _ = writeln!(self.report, "\n== {title} ==");
    }

    fn finish(&self, mut files: Vec<PathBuf>) -> Result<Vec<PathBuf>, PipelineError> {
        let path = self.cfg.out_dir.join("report.txt");
        fs::write(&path, &self.report).map_err(stage("write"))?;
        files.push(path);
        Ok(files)
    }

    fn fail(&mut self, e: PipelineError) -> PipelineError {
        let _ = writeln!(self.report, "\n{FAILED_MARKER} at stage `{}`: {}", e.stage, e.message);
        let _ = fs::create_dir_all(&self.cfg.out_dir);
        let _ = fs::write(self.cfg.out_dir.join("report.txt"), &self.report);
        e
    }
}

/// Run every stage and write `report.txt` plus artifacts to `out_dir`.
/// On failure the partial report ends with a `FAILED` line naming the stage.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    let mut run = Run {
        cfg,
        report: String::new(),
    };
    match run_stages(&mut run, Stage::Fevd) {
        Ok(out) => Ok(out.expect("all stages ran")),
        Err(e) => Err(run.fail(e)),
    }
}

/// Run the stages up to and including `until`; returns the report text,
/// which is also written to `report.txt`.
pub fn run_until(cfg: &PipelineConfig, until: Stage) -> Result<String, PipelineError> {
    let mut run = Run {
        cfg,
        report: String::new(),
    };
    match run_stages(&mut run, until) {
        Ok(_) => Ok(run.report),
        Err(e) => Err(run.fail(e)),
    }
}

fn run_stages(run: &mut Run, until: Stage) -> Result<Option<PipelineOutput>, PipelineError> {
    let cfg = run.cfg;
    cfg.validate().map_err(stage("config"))?;
    fs::create_dir_all(&cfg.out_dir).map_err(stage("write"))?;
    let out = &cfg.out_dir;
    let mut files = Vec::new();

    let panel = load_system(cfg)?;
    let names = panel.names().to_vec();
    let shocks = shock_names(&panel);
    let data_name = cfg
        .data
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let _ = writeln!(run.report, "Structural VECM report");
    let _ = writeln!(
        run.report,
        "data: {data_name}, T = {}, K = {}, years {}-{}, seed {}",
        panel.nobs(),
        panel.nvars(),
        panel.years()[0],
        panel.years()[panel.nobs() - 1],
        cfg.seed
    );

    // Unit roots.
    run.section(&format!(
        "ADF tests ({}, lags by {:?}, max {})",
        cfg.adf_deterministic.label(),
        cfg.adf_selection,
        cfg.adf_max_lags
    ));
    let mut adf = Vec::with_capacity(names.len());
    for j in 0..panel.nvars() {
        let series: Vec<f64> = panel.column(j).iter().copied().collect();
        let r = integration_order(&series, cfg.adf_deterministic, cfg.adf_max_lags, cfg.adf_selection, Level::Five)
            .map_err(|e| PipelineError {
                stage: "adf",
                message: format!("{}: {e}", names[j]),
            })?;
        adf.push(r);
    }
    run.report.push_str(&report::render_adf(&names, &adf));
    let path = out.join("adf.csv");
    let header: Vec<String> = [
        "variable", "level_stat", "level_lags", "level_cv1", "level_cv5", "level_cv10", "diff_stat", "diff_lags",
        "diff_cv1", "diff_cv5", "diff_cv10", "order",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = names
        .iter()
        .zip(&adf)
        .map(|(n, r)| {
            vec![
                n.clone(),
                num(r.level.statistic),
                r.level.lags_used.to_string(),
                num(r.level.critical_values.one),
                num(r.level.critical_values.five),
                num(r.level.critical_values.ten),
                num(r.difference.statistic),
                r.difference.lags_used.to_string(),
                num(r.difference.critical_values.one),
                num(r.difference.critical_values.five),
                num(r.difference.critical_values.ten),
                r.verdict.to_string(),
            ]
        })
        .collect();
    write_csv(&path, &header, &rows)?;
    files.push(path);

    if until == Stage::Adf {
        return run.finish(files).map(|_| None);
    }

    // Lag order.
    let lag = match cfg.lag_override {
        Some(p) => p,
        None => select_lag(&panel, cfg.max_p, cfg.criterion).map_err(stage("lag"))?,
    };
    run.section("Lag order");
    let _ = writeln!(
        run.report,
        "VAR order in levels p = {lag} ({})",
        match cfg.lag_override {
            Some(_) => "configured".to_string(),
            None => format!("{}, max {}", cfg.criterion.label(), cfg.max_p),
        }
    );

    // Rank tests.
    let (mut rank_test, _) = johansen(&panel, lag, cfg.deterministic).map_err(stage("rank"))?;
    rank_test.sl = Some(sl_test(&panel, lag).map_err(stage("rank"))?);
    let rank = cfg.rank_override.unwrap_or(rank_test.selected_rank.five);
    run.section(&format!("Cointegration rank tests ({})", cfg.deterministic.label()));
    run.report.push_str(&report::render_rank_table(&rank_test));
    let _ = writeln!(
        run.report,
        "Rank used: r = {rank}{}",
        if cfg.rank_override.is_some() { " (configured)" } else { " (trace test, 5%)" }
    );
    let path = out.join("rank_tests.csv");
    let header: Vec<String> = ["h0_rank", "eigenvalue", "trace", "trace_cv5", "trace_cv1", "sl", "sl_cv5", "sl_cv1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let sl = rank_test.sl.as_ref().expect("computed above");
    let rows: Vec<Vec<String>> = (0..panel.nvars())
        .map(|j| {
            vec![
                j.to_string(),
                num(rank_test.eigenvalues[j]),
                num(rank_test.trace_stats[j]),
                num(rank_test.critical_values[j].five),
                num(rank_test.critical_values[j].one),
                num(sl.stats[j]),
                num(sl.critical_values[j].five),
                num(sl.critical_values[j].one),
            ]
        })
        .collect();
    write_csv(&path, &header, &rows)?;
    files.push(path);

    if until == Stage::Rank {
        return run.finish(files).map(|_| None);
    }

    // VECM, with the optional restriction on β.
    let unrestricted = fit_vecm(&panel, lag, rank, cfg.deterministic, None).map_err(stage("vecm"))?;
    let restriction = match cfg.beta_restriction.as_deref() {
        None => None,
        Some(name) => Some(restriction_for(name).ok_or_else(|| PipelineError {
            stage: "beta-test",
            message: format!("unknown restriction `{name}`"),
        })?),
    };
    let beta_test = match &restriction {
        None => None,
        Some(res) => {
            let t = test_beta_restriction(&unrestricted, res).map_err(stage("beta-test"))?;
            run.section("Restriction on the cointegration space");
            run.report.push_str(&report::render_beta_test(&t, &res.description));
            Some(t)
        }
    };
    let vecm = match &restriction {
        None => unrestricted,
        Some(res) => fit_vecm(&panel, lag, rank, cfg.deterministic, Some(res)).map_err(stage("vecm"))?,
    };
    run.section("VECM");
    for c in 0..vecm.r {
        let constant = vecm.beta_const.as_ref().map(|b| b[c]);
        let _ = writeln!(
            run.report,
            "relation {}: {}",
            c + 1,
            report::render_relation(&vecm.beta.column(c).into_owned(), constant, &names, "w-p")
        );
    }
    let rel: Vec<String> = (1..=vecm.r).map(|c| format!("ec{c}")).collect();
    let _ = writeln!(run.report, "alpha:");
    run.report.push_str(&report::render_matrix(&vecm.alpha, &names, &rel));
    let _ = writeln!(run.report, "beta:");
    run.report.push_str(&report::render_matrix(&vecm.beta, &names, &rel));
    let _ = writeln!(run.report, "Sigma:");
    run.report.push_str(&report::render_matrix(&vecm.sigma, &names, &names));
    for (path, m, cols) in [
        (out.join("alpha.csv"), &vecm.alpha, &rel),
        (out.join("beta.csv"), &vecm.beta, &rel),
        (out.join("sigma.csv"), &vecm.sigma, &names),
    ] {
        matrix_csv(&path, m, &names, cols)?;
        files.push(path);
    }
    for (i, g) in vecm.gammas.iter().enumerate() {
        let path = out.join(format!("gamma{}.csv", i + 1));
        matrix_csv(&path, g, &names, &names)?;
        files.push(path);
    }

    if until == Stage::Vecm {
        return run.finish(files).map(|_| None);
    }

    // Structural identification.
    let pattern = resolve_pattern(cfg, &panel)?;
    let identification = check_identification(&pattern, &vecm).map_err(stage("identify"))?;
    let options = IdentifyOptions {
        restarts: cfg.restarts,
        seed: derive_seed(cfg.seed, 1),
        ..IdentifyOptions::default()
    };
    let mut svec = identify(&vecm, &pattern, &options).map_err(stage("identify"))?;
    run.section("Structural identification");
    let _ = writeln!(run.report, "restriction pattern (B | long-run impact):");
    run.report.push_str(&pattern.render());
    let _ = writeln!(run.report, "{}", identification.summary());
    let _ = writeln!(
        run.report,
        "scoring: log-likelihood {:.4}, {} iterations, {} of {} starts converged",
        svec.loglik, svec.iterations, svec.starts_converged, cfg.restarts
    );

    let bootstrap = if cfg.bootstrap_reps == 0 {
        None
    } else {
        let b = bootstrap_tvalues(&vecm, &svec, cfg.bootstrap_reps, derive_seed(cfg.seed, 2))
            .map_err(stage("bootstrap"))?;
        svec = svec.with_bootstrap(&b);
        Some(b)
    };
    run.section("Contemporaneous impact matrix B (bootstrap t-values)");
    run.report.push_str(&report::render_impact(
        &svec.b,
        svec.tvalues_b.as_ref(),
        &pattern.b_zero,
        &names,
        &shocks,
    ));
    run.section("Long-run impact matrix (bootstrap t-values)");
    run.report.push_str(&report::render_impact(
        &svec.xi_b,
        svec.tvalues_xi_b.as_ref(),
        &pattern.xi_b_zero,
        &names,
        &shocks,
    ));
    if let Some(b) = &bootstrap {
        let _ = writeln!(
            run.report,
            "{} replications, {} failed; * 10%, ** 5%, *** 1%",
            b.reps, b.failed
        );
    }
    let mut mats = vec![("b.csv", &svec.b), ("xi.csv", &svec.xi), ("xi_b.csv", &svec.xi_b)];
    if let (Some(tb), Some(tx)) = (&svec.tvalues_b, &svec.tvalues_xi_b) {
        mats.push(("tvalues_b.csv", tb));
        mats.push(("tvalues_xi_b.csv", tx));
    }
    for (name, m) in mats {
        let path = out.join(name);
        matrix_csv(&path, m, &names, &shocks)?;
        files.push(path);
    }

    if until == Stage::Svec {
        return run.finish(files).map(|_| None);
    }

    // Impulse responses.
    let responses = irf(&svec, &vecm, cfg.plot_horizon.max(cfg.horizon), false);
    for (j, s) in shocks.iter().enumerate() {
        let path = out.join(format!("irf_{s}.csv"));
        let mut header = vec!["horizon".to_string()];
        header.extend(names.iter().cloned());
        let rows: Vec<Vec<String>> = responses
            .responses
            .iter()
            .enumerate()
            .map(|(h, m)| {
                let mut r = vec![h.to_string()];
                r.extend((0..names.len()).map(|i| num(m[(i, j)])));
                r
            })
            .collect();
        write_csv(&path, &header, &rows)?;
        files.push(path);
        for (i, v) in names.iter().enumerate() {
            let path = out.join(format!("irf_{v}_{s}.svg"));
            let values: Vec<f64> = responses.path(i, j)[..=cfg.plot_horizon].to_vec();
            fs::write(&path, svg::line_chart(&format!("{v} <- {s}"), &values)).map_err(stage("write"))?;
            files.push(path);
        }
    }
    run.section(&format!("Impulse responses at horizon {}", cfg.horizon));
    run.report
        .push_str(&report::render_matrix(&responses.responses[cfg.horizon], &names, &shocks));

    if until == Stage::Irf {
        return run.finish(files).map(|_| None);
    }

    // Variance decompositions.
    let fevd_res = fevd(&svec, &vecm, &cfg.fevd_horizons).map_err(stage("fevd"))?;
    run.section("Forecast error variance decomposition");
    for (i, v) in names.iter().enumerate() {
        let _ = writeln!(run.report, "{v}:");
        run.report.push_str(&report::render_fevd(&fevd_res, i, &shocks));
        let path = out.join(format!("fevd_{v}.csv"));
        let mut header = vec!["horizon".to_string()];
        header.extend(shocks.iter().cloned());
        let rows: Vec<Vec<String>> = fevd_res
            .horizons
            .iter()
            .zip(&fevd_res.shares)
            .map(|(h, m)| {
                let mut r = vec![h.to_string()];
                r.extend(m.row(i).iter().map(|&x| num(x)));
                r
            })
            .collect();
        write_csv(&path, &header, &rows)?;
        files.push(path);
    }

    let files = run.finish(files)?;
    Ok(Some(PipelineOutput {
        report: run.report.clone(),
        panel,
        adf,
        lag,
        rank_test,
        rank,
        beta_test,
        vecm,
        identification,
        svec,
        bootstrap,
        irf: responses,
        fevd: fevd_res,
        files,
    }))
}
