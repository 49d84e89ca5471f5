//! Flat `key = value` configuration with one `[pattern]` block.
//!
//! ```text
//! data = sim.csv
//! year_column = year
//! seed = 42
//! max_p = 4
//! criterion = sc
//! deterministic = constant
//! beta_restriction = wage_setting
//! bootstrap_reps = 100
//! sign_rows = p, y-n, p, n, u
//!
//! [pattern]
//! * * * * * | * * 0 * 0
//! * * * * * | 0 * 0 0 0
//! * * * * * | * * 0 0 0
//! * * * * * | * * 0 * *
//! * * * * * | * * 0 * *
//! ```
//!
//! Raw series are mapped through `role.output`, `role.employment`,
//! `role.wage`, `role.price` and `role.unemployment`; without roles the data
//! columns (or those listed in `columns`) are used as the system directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cointegration::{Deterministic, InfoCriterion};
use crate::dataset::{RoleMap, Transform};
use crate::dynamics::{DEFAULT_FEVD_HORIZONS, PLOT_HORIZON, TABLE_HORIZON};
use crate::svec::RestrictionPattern;
use crate::unitroot::{AdfDeterministic, LagSelection};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o error reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("data file {0} does not exist")]
    DataNotFound(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub data: PathBuf,
    pub year_column: String,
    pub roles: Option<RoleMap>,
    pub transform: Transform,
    /// Columns forming the system when no roles are given (all if `None`).
    pub columns: Option<Vec<String>>,
    pub adf_deterministic: AdfDeterministic,
    pub adf_max_lags: usize,
    pub adf_selection: LagSelection,
    pub deterministic: Deterministic,
    pub max_p: usize,
    pub criterion: InfoCriterion,
    pub lag_override: Option<usize>,
    pub rank_override: Option<usize>,
    pub beta_restriction: Option<String>,
    pub pattern: Option<RestrictionPattern>,
    /// Anchor rows for the shock signs, by variable name.
    pub sign_rows: Option<Vec<String>>,
    pub restarts: usize,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub horizon: usize,
    pub plot_horizon: usize,
    pub fevd_horizons: Vec<usize>,
}

impl PipelineConfig {
    /// Defaults for everything except the data path and seed.
    pub fn new(data: impl Into<PathBuf>, seed: u64) -> Self {
        Self {
            data: data.into(),
            year_column: "year".into(),
            roles: None,
            transform: Transform::Log,
            columns: None,
            adf_deterministic: AdfDeterministic::Constant,
            adf_max_lags: 4,
            adf_selection: LagSelection::Aic,
            deterministic: Deterministic::UnrestrictedConstant,
            max_p: 4,
            criterion: InfoCriterion::Sc,
            lag_override: None,
            rank_override: None,
            beta_restriction: None,
            pattern: None,
            sign_rows: None,
            restarts: 10,
            bootstrap_reps: 100,
            seed,
            out_dir: PathBuf::from("out"),
            horizon: TABLE_HORIZON,
            plot_horizon: PLOT_HORIZON,
            fevd_horizons: DEFAULT_FEVD_HORIZONS.to_vec(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut pattern_lines = String::new();
        let mut in_pattern = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if line != "[pattern]" {
                    return Err(ConfigError::Syntax {
                        line: i + 1,
                        msg: format!("unknown section {line}"),
                    });
                }
                in_pattern = true;
                continue;
            }
            if in_pattern {
                pattern_lines.push_str(line);
                pattern_lines.push('\n');
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: "expected `key = value`".into(),
            })?;
            kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }

        let data = kv.remove("data").ok_or(ConfigError::Missing("data"))?.1;
        let seed_raw = kv.remove("seed").ok_or(ConfigError::Missing("seed"))?.1;
        let seed = parse_num::<u64>("seed", &seed_raw)?;
        let mut cfg = Self::new(resolve(base, &data), seed);

        let mut roles: BTreeMap<&str, String> = BTreeMap::new();
        for (key, (_, value)) in kv {
            let bad = || ConfigError::BadValue {
                key: key.clone(),
                value: value.clone(),
            };
            match key.as_str() {
                "year_column" => cfg.year_column = value.clone(),
                "transform" => {
                    cfg.transform = match value.as_str() {
                        "log" => Transform::Log,
                        "none" => Transform::None,
                        _ => return Err(bad()),
                    }
                }
                "columns" => cfg.columns = Some(split_list(&value)),
                "adf_deterministic" => {
                    cfg.adf_deterministic = match value.as_str() {
                        "none" => AdfDeterministic::None,
                        "constant" => AdfDeterministic::Constant,
                        "trend" | "constant+trend" => AdfDeterministic::ConstantTrend,
                        _ => return Err(bad()),
                    }
                }
                "adf_max_lags" => cfg.adf_max_lags = parse_num("adf_max_lags", &value)?,
                "adf_selection" => {
                    cfg.adf_selection = match value.as_str() {
                        "fixed" => LagSelection::Fixed,
                        "aic" => LagSelection::Aic,
                        "sc" => LagSelection::Sc,
                        _ => return Err(bad()),
                    }
                }
                "deterministic" => {
                    cfg.deterministic = match value.as_str() {
                        "none" => Deterministic::None,
                        "constant" => Deterministic::UnrestrictedConstant,
                        "restricted" | "restricted_constant" => Deterministic::RestrictedConstant,
                        _ => return Err(bad()),
                    }
                }
                "max_p" => cfg.max_p = parse_num("max_p", &value)?,
                "criterion" => {
                    cfg.criterion = match value.as_str() {
                        "sc" => InfoCriterion::Sc,
                        "aic" => InfoCriterion::Aic,
                        "hq" => InfoCriterion::Hq,
                        _ => return Err(bad()),
                    }
                }
                "lag" => cfg.lag_override = Some(parse_num("lag", &value)?),
                "rank" => cfg.rank_override = Some(parse_num("rank", &value)?),
                "beta_restriction" => {
                    cfg.beta_restriction = match value.as_str() {
                        "none" => None,
                        "wage_setting" => Some(value.clone()),
                        _ => return Err(bad()),
                    }
                }
                "sign_rows" => cfg.sign_rows = Some(split_list(&value)),
                "restarts" => cfg.restarts = parse_num("restarts", &value)?,
                "bootstrap_reps" => cfg.bootstrap_reps = parse_num("bootstrap_reps", &value)?,
                "out_dir" => cfg.out_dir = resolve(base, &value),
                "horizon" => cfg.horizon = parse_num("horizon", &value)?,
                "plot_horizon" => cfg.plot_horizon = parse_num("plot_horizon", &value)?,
                "fevd_horizons" => {
                    cfg.fevd_horizons = split_list(&value)
                        .iter()
                        .map(|h| parse_num("fevd_horizons", h))
                        .collect::<Result<_, _>>()?
                }
                k if k.starts_with("role.") => {
                    let role = match &k[5..] {
                        "output" => "output",
                        "employment" => "employment",
                        "wage" => "wage",
                        "price" => "price",
                        "unemployment" => "unemployment",
                        _ => return Err(ConfigError::UnknownKey(key.clone())),
                    };
                    roles.insert(role, value.clone());
                }
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        if !roles.is_empty() {
            let get = |r: &'static str| roles.get(r).cloned().ok_or(ConfigError::Missing(r));
            cfg.roles = Some(RoleMap {
                output: get("output")?,
                employment: get("employment")?,
                wage: get("wage")?,
                price: get("price")?,
                unemployment: get("unemployment")?,
            });
        }
        if !pattern_lines.is_empty() {
            let p = RestrictionPattern::parse(&pattern_lines).map_err(|e| ConfigError::BadValue {
                key: "[pattern]".into(),
                value: e.to_string(),
            })?;
            cfg.pattern = Some(p);
        }
        Ok(cfg)
    }

    /// Checks that need the file system.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.data.is_file() {
            return Err(ConfigError::DataNotFound(self.data.clone()));
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = PathBuf::from(p);
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}
