use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::SvecError;
use crate::dataset::{SHOCK_NAMES, SYSTEM_NAMES};

/// Zero restrictions on the impact matrix B and on the long-run impact ΞB.
///
/// Masks are row-major, `true` marking an entry fixed at zero. Rows follow
/// the variables, columns the shocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionPattern {
    pub b_zero: Vec<Vec<bool>>,
    pub xi_b_zero: Vec<Vec<bool>>,
    pub variable_names: Vec<String>,
    pub shock_names: Vec<String>,
    /// Row whose entry fixes the sign of each shock's column of B.
    pub sign_rows: Vec<usize>,
}

impl RestrictionPattern {
    /// No restrictions at all.
    pub fn empty(k: usize) -> Self {
        Self {
            b_zero: vec![vec![false; k]; k],
            xi_b_zero: vec![vec![false; k]; k],
            variable_names: (0..k).map(|i| format!("x{}", i + 1)).collect(),
            shock_names: (0..k).map(|i| format!("e{}", i + 1)).collect(),
            sign_rows: (0..k).collect(),
        }
    }

    /// Five-variable pattern: B unrestricted, long-run zeros
    ///
    /// ```text
    ///            e_p e_s e_w e_d e_l
    ///   p         *   *   0   *   0
    ///   y-n       0   *   0   0   0
    ///   w-p       *   *   0   0   0
    ///   n         *   *   0   *   *
    ///   u         *   *   0   *   *
    /// ```
    ///
    /// Signs are anchored on the diagonal except for `e_w`, which has no
    /// impact on `w-p` and is anchored on the price row instead.
    pub fn wsps_default() -> Self {
        let f = false;
        let z = true;
        Self {
            b_zero: vec![vec![false; 5]; 5],
            xi_b_zero: vec![
                vec![f, f, z, f, z],
                vec![z, f, z, z, z],
                vec![f, f, z, z, z],
                vec![f, f, z, f, f],
                vec![f, f, z, f, f],
            ],
            variable_names: SYSTEM_NAMES.iter().map(|s| s.to_string()).collect(),
            shock_names: SHOCK_NAMES.iter().map(|s| s.to_string()).collect(),
            sign_rows: vec![0, 1, 0, 3, 4],
        }
    }

    /// Lower-triangular B (recursive ordering), no long-run restrictions.
    pub fn recursive(k: usize) -> Self {
        let mut p = Self::empty(k);
        for i in 0..k {
            for j in i + 1..k {
                p.b_zero[i][j] = true;
            }
        }
        p
    }

    pub fn k(&self) -> usize {
        self.b_zero.len()
    }

    pub fn with_names(mut self, variables: &[String], shocks: &[String]) -> Self {
        self.variable_names = variables.to_vec();
        self.shock_names = shocks.to_vec();
        self
    }

    pub fn validate(&self) -> Result<(), SvecError> {
        let k = self.k();
        let square = |m: &Vec<Vec<bool>>| m.len() == k && m.iter().all(|r| r.len() == k);
        if k == 0 || !square(&self.b_zero) || !square(&self.xi_b_zero) {
            return Err(SvecError::Pattern("masks must both be K×K".into()));
        }
        if self.variable_names.len() != k || self.shock_names.len() != k || self.sign_rows.len() != k {
            return Err(SvecError::Pattern("names and sign rows must have K entries".into()));
        }
        if self.sign_rows.iter().any(|&r| r >= k) {
            return Err(SvecError::Pattern("sign row out of range".into()));
        }
        Ok(())
    }

    /// Parse a block of K lines `B-row | ΞB-row`, cells `*` (free) or `0`.
    pub fn parse(text: &str) -> Result<Self, SvecError> {
        let mut b = Vec::new();
        let mut xi = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (left, right) = line
                .split_once('|')
                .ok_or_else(|| SvecError::Pattern(format!("line {}: expected `B-row | XiB-row`", n + 1)))?;
            b.push(parse_cells(left, n + 1)?);
            xi.push(parse_cells(right, n + 1)?);
        }
        let k = b.len();
        let mut p = Self::empty(k);
        p.b_zero = b;
        p.xi_b_zero = xi;
        p.validate()?;
        Ok(p)
    }

    /// Inverse of [`parse`](Self::parse).
    pub fn render(&self) -> String {
        let cell = |z: bool| if z { "0" } else { "*" };
        let mut out = String::new();
        for i in 0..self.k() {
            let b: Vec<&str> = self.b_zero[i].iter().map(|&z| cell(z)).collect();
            let x: Vec<&str> = self.xi_b_zero[i].iter().map(|&z| cell(z)).collect();
            let _ = writeln!(out, "{} | {}", b.join(" "), x.join(" "));
        }
        out
    }

    pub fn zero_count(&self) -> usize {
        let count = |m: &Vec<Vec<bool>>| m.iter().flatten().filter(|&&z| z).count();
        count(&self.b_zero) + count(&self.xi_b_zero)
    }

    /// Shocks whose long-run column is entirely zero.
    pub fn transitory_shocks(&self) -> Vec<usize> {
        (0..self.k())
            .filter(|&j| self.xi_b_zero.iter().all(|row| row[j]))
            .collect()
    }

    /// Rows of `R` in `R·vec(B) = 0` (column-major vec). A long-run zero at
    /// (i, j) reads `Σ_m Ξ[i,m]·B[m,j] = 0`.
    pub fn constraint_matrix(&self, xi: &DMatrix<f64>) -> DMatrix<f64> {
        let k = self.k();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for j in 0..k {
            for i in 0..k {
                if self.b_zero[i][j] {
                    let mut r = vec![0.0; k * k];
                    r[j * k + i] = 1.0;
                    rows.push(r);
                }
            }
        }
        for j in 0..k {
            for i in 0..k {
                if self.xi_b_zero[i][j] {
                    let mut r = vec![0.0; k * k];
                    for m in 0..k {
                        r[j * k + m] = xi[(i, m)];
                    }
                    rows.push(r);
                }
            }
        }
        DMatrix::from_fn(rows.len(), k * k, |i, j| rows[i][j])
    }
}

fn parse_cells(s: &str, line: usize) -> Result<Vec<bool>, SvecError> {
    s.split_whitespace()
        .map(|c| match c {
            "*" => Ok(false),
            "0" => Ok(true),
            other => Err(SvecError::Pattern(format!("line {line}: bad cell `{other}`"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_eleven_zeros() {
        let p = RestrictionPattern::wsps_default();
        assert_eq!(p.zero_count(), 11);
        assert_eq!(p.transitory_shocks(), vec![2]);
        p.validate().unwrap();
    }

    #[test]
    fn parse_render_round_trip() {
        let p = RestrictionPattern::wsps_default();
        let text = p.render();
        let q = RestrictionPattern::parse(&text).unwrap();
        assert_eq!(q.b_zero, p.b_zero);
        assert_eq!(q.xi_b_zero, p.xi_b_zero);
        assert!(RestrictionPattern::parse("* x | * *\n* * | * *").is_err());
        assert!(RestrictionPattern::parse("* * | * *\n* * | *").is_err());
    }

    #[test]
    fn constraint_rows() {
        let mut p = RestrictionPattern::empty(2);
        p.b_zero[0][1] = true;
        p.xi_b_zero[1][1] = true;
        let xi = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let r = p.constraint_matrix(&xi);
        assert_eq!(r.nrows(), 2);
        // B[0,1] sits at vec index 2.
        assert_eq!(r.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(r.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 3.0, 4.0]);
    }
}
