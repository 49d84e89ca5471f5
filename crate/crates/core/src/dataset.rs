//! Annual panels, CSV ingestion and construction of the five-variable system.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Column labels of the built system, in the order every estimator assumes.
pub const SYSTEM_NAMES: [&str; 5] = ["p", "y-n", "w-p", "n", "u"];

/// Structural shock labels matching the system ordering.
pub const SHOCK_NAMES: [&str; 5] = ["e_p", "e_s", "e_w", "e_d", "e_l"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("year column `{0}` not found in header")]
    MissingYearColumn(String),
    #[error("missing value at data row {row}, column `{col}`")]
    MissingValue { row: usize, col: String },
    #[error("cannot parse value at data row {row}, column `{col}`")]
    ParseFailure { row: usize, col: String },
    #[error("years are not consecutive at data row {row}")]
    NonConsecutiveYears { row: usize },
    #[error("panel has no observations or no variables")]
    Empty,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-positive value in column `{col}` at data row {row} cannot be logged")]
    NonPositiveForLog { col: String, row: usize },
    #[error("role `{role}` is not mapped to an existing column")]
    MissingRole { role: String },
}

/// A T×K annual panel with consecutive years.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePanel {
    names: Vec<String>,
    years: Vec<i64>,
    values: DMatrix<f64>,
}

impl TimePanel {
    pub fn new(
        names: Vec<String>,
        years: Vec<i64>,
        values: DMatrix<f64>,
    ) -> Result<Self, DatasetError> {
        let (t, k) = values.shape();
        if t == 0 || k == 0 {
            return Err(DatasetError::Empty);
        }
        if names.len() != k || years.len() != t {
            return Err(DatasetError::Shape(format!(
                "{} names / {} years for a {t}x{k} matrix",
                names.len(),
                years.len()
            )));
        }
        if let Some(i) = years.windows(2).position(|w| w[1] != w[0] + 1) {
            return Err(DatasetError::NonConsecutiveYears { row: i + 2 });
        }
        for c in 0..k {
            if let Some(r) = (0..t).find(|&r| !values[(r, c)].is_finite()) {
                return Err(DatasetError::MissingValue {
                    row: r + 1,
                    col: names[c].clone(),
                });
            }
        }
        Ok(Self {
            names,
            years,
            values,
        })
    }

    /// Panel with years `start, start+1, …`.
    pub fn from_matrix(
        names: &[&str],
        start_year: i64,
        values: DMatrix<f64>,
    ) -> Result<Self, DatasetError> {
        let years = (0..values.nrows() as i64).map(|i| start_year + i).collect();
        Self::new(names.iter().map(|s| s.to_string()).collect(), years, values)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn years(&self) -> &[i64] {
        &self.years
    }

    /// T×K values, one row per year.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn nobs(&self) -> usize {
        self.values.nrows()
    }

    pub fn nvars(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, idx: usize) -> DVector<f64> {
        self.values.column(idx).into_owned()
    }

    pub fn column_by_name(&self, name: &str) -> Option<DVector<f64>> {
        self.column_index(name).map(|i| self.column(i))
    }

    /// Same panel with column `idx` multiplied by `factor`.
    pub fn scale_column(&self, idx: usize, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.column_mut(idx).scale_mut(factor);
        out
    }

    pub fn to_csv_string(&self, year_column: &str) -> String {
        let mut out = String::new();
        out.push_str(year_column);
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (r, year) in self.years.iter().enumerate() {
            out.push_str(&year.to_string());
            for c in 0..self.nvars() {
                out.push(',');
                // `Display` for f64 prints the shortest string that round-trips.
                out.push_str(&format!("{}", self.values[(r, c)]));
            }
            out.push('\n');
        }
        out
    }
}

/// Parse a panel from CSV text: header row, one integer year column, the
/// rest numeric. Empty cells and `NA`/`NaN` count as missing.
pub fn read_csv<R: Read>(reader: R, year_column: &str) -> Result<TimePanel, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let year_idx = headers
        .iter()
        .position(|h| h == year_column)
        .ok_or_else(|| DatasetError::MissingYearColumn(year_column.to_string()))?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != year_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut years = Vec::new();
    let mut data = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        for (i, field) in rec.iter().enumerate() {
            let col = headers.get(i).cloned().unwrap_or_default();
            if field.is_empty() || field.eq_ignore_ascii_case("na") || field.eq_ignore_ascii_case("nan") {
                return Err(DatasetError::MissingValue { row, col });
            }
            if i == year_idx {
                let y: i64 = field
                    .parse()
                    .map_err(|_| DatasetError::ParseFailure { row, col })?;
                years.push(y);
            } else {
                let v: f64 = field
                    .parse()
                    .map_err(|_| DatasetError::ParseFailure { row, col: col.clone() })?;
                if !v.is_finite() {
                    return Err(DatasetError::MissingValue { row, col });
                }
                data.push(v);
            }
        }
        if rec.len() < headers.len() {
            return Err(DatasetError::MissingValue {
                row,
                col: headers[rec.len()].clone(),
            });
        }
    }
    if years.is_empty() || names.is_empty() {
        return Err(DatasetError::Empty);
    }
    let values = DMatrix::from_row_slice(years.len(), names.len(), &data);
    TimePanel::new(names, years, values)
}

pub fn load_csv(path: impl AsRef<Path>, year_column: &str) -> Result<TimePanel, DatasetError> {
    read_csv(File::open(path)?, year_column)
}

pub fn save_csv(
    panel: &TimePanel,
    path: impl AsRef<Path>,
    year_column: &str,
) -> Result<(), DatasetError> {
    let mut f = File::create(path)?;
    f.write_all(panel.to_csv_string(year_column).as_bytes())?;
    Ok(())
}

/// Column names of the raw series feeding each economic role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleMap {
    pub output: String,
    pub employment: String,
    pub wage: String,
    pub price: String,
    pub unemployment: String,
}

/// Whether the raw output/employment/wage/price series are levels to be
/// logged, or already logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    Log,
    None,
}

/// Build the `(p, y-n, w-p, n, u)` system. Unemployment is passed through
/// unchanged as a rate.
pub fn build_system(
    panel: &TimePanel,
    roles: &RoleMap,
    transform: Transform,
) -> Result<TimePanel, DatasetError> {
    let fetch = |role: &str, col: &str, logged: bool| -> Result<DVector<f64>, DatasetError> {
        let v = panel
            .column_by_name(col)
            .ok_or_else(|| DatasetError::MissingRole {
                role: role.to_string(),
            })?;
        if !logged {
            return Ok(v);
        }
        if let Some(r) = v.iter().position(|&x| x <= 0.0) {
            return Err(DatasetError::NonPositiveForLog {
                col: col.to_string(),
                row: r + 1,
            });
        }
        Ok(v.map(f64::ln))
    };
    let log = transform == Transform::Log;
    let y = fetch("output", &roles.output, log)?;
    let n = fetch("employment", &roles.employment, log)?;
    let w = fetch("wage", &roles.wage, log)?;
    let p = fetch("price", &roles.price, log)?;
    let u = fetch("unemployment", &roles.unemployment, false)?;

    let t = panel.nobs();
    let mut values = DMatrix::zeros(t, 5);
    values.set_column(0, &p);
    values.set_column(1, &(&y - &n));
    values.set_column(2, &(&w - &p));
    values.set_column(3, &n);
    values.set_column(4, &u);
    TimePanel::new(
        SYSTEM_NAMES.iter().map(|s| s.to_string()).collect(),
        panel.years().to_vec(),
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles() -> RoleMap {
        RoleMap {
            output: "Y".into(),
            employment: "N".into(),
            wage: "W".into(),
            price: "P".into(),
            unemployment: "U".into(),
        }
    }

    #[test]
    fn parses_small_file() {
        let text = "year,a,b\n1960,1.0,2.5\n1961,2,3\n1962,-1e-3,4\n";
        let p = read_csv(text.as_bytes(), "year").unwrap();
        assert_eq!((p.nobs(), p.nvars()), (3, 2));
        assert_eq!(p.years(), &[1960, 1961, 1962]);
        assert_eq!(p.names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(p.values()[(2, 0)], -1e-3);
    }

    #[test]
    fn year_column_may_sit_anywhere() {
        let text = "a,year,b\n1,2000,2\n3,2001,4\n";
        let p = read_csv(text.as_bytes(), "year").unwrap();
        assert_eq!(p.values()[(1, 1)], 4.0);
    }

    #[test]
    fn year_gap_is_rejected() {
        let text = "year,a\n1960,1\n1962,2\n";
        assert!(matches!(
            read_csv(text.as_bytes(), "year"),
            Err(DatasetError::NonConsecutiveYears { row: 2 })
        ));
    }

    #[test]
    fn missing_and_garbage_cells() {
        let text = "year,a,b\n1960,1,\n";
        assert!(matches!(
            read_csv(text.as_bytes(), "year"),
            Err(DatasetError::MissingValue { row: 1, ref col }) if col == "b"
        ));
        let text = "year,a\n1960,NA\n";
        assert!(matches!(read_csv(text.as_bytes(), "year"), Err(DatasetError::MissingValue { .. })));
        let text = "year,a\n1960,abc\n";
        assert!(matches!(
            read_csv(text.as_bytes(), "year"),
            Err(DatasetError::ParseFailure { row: 1, .. })
        ));
        let text = "year,a\n19x0,1\n";
        assert!(matches!(read_csv(text.as_bytes(), "year"), Err(DatasetError::ParseFailure { .. })));
        assert!(matches!(
            read_csv("yr,a\n1,1\n".as_bytes(), "year"),
            Err(DatasetError::MissingYearColumn(_))
        ));
    }

    #[test]
    fn all_ones_give_zero_logs() {
        let raw = TimePanel::from_matrix(&["Y", "N", "W", "P", "U"], 1960, DMatrix::from_element(4, 5, 1.0)).unwrap();
        let sys = build_system(&raw, &roles(), Transform::Log).unwrap();
        assert_eq!(sys.names(), SYSTEM_NAMES.map(String::from).as_slice());
        for c in 0..4 {
            assert!(sys.column(c).iter().all(|&x| x == 0.0));
        }
        assert!(sys.column(4).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn real_wage_from_logs() {
        let e = std::f64::consts::E;
        let mut m = DMatrix::from_element(3, 5, 2.0);
        m.column_mut(2).fill(e * e);
        m.column_mut(3).fill(e);
        let raw = TimePanel::from_matrix(&["Y", "N", "W", "P", "U"], 2000, m).unwrap();
        let sys = build_system(&raw, &roles(), Transform::Log).unwrap();
        for &x in sys.column(2).iter() {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_of_nonpositive_and_missing_role() {
        let mut m = DMatrix::from_element(3, 5, 2.0);
        m[(1, 1)] = 0.0;
        let raw = TimePanel::from_matrix(&["Y", "N", "W", "P", "U"], 2000, m).unwrap();
        assert!(matches!(
            build_system(&raw, &roles(), Transform::Log),
            Err(DatasetError::NonPositiveForLog { row: 2, .. })
        ));
        // Unemployment may be zero or negative: it is never logged.
        let mut m = DMatrix::from_element(3, 5, 2.0);
        m[(0, 4)] = 0.0;
        let raw = TimePanel::from_matrix(&["Y", "N", "W", "P", "U"], 2000, m).unwrap();
        assert!(build_system(&raw, &roles(), Transform::Log).is_ok());
        let mut r = roles();
        r.wage = "nope".into();
        assert!(matches!(
            build_system(&raw, &r, Transform::Log),
            Err(DatasetError::MissingRole { ref role }) if role == "wage"
        ));
    }
}
