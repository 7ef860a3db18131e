//! State files, the configuration file, and report number formatting.
//!
//! A state file is JSON in one of two shapes:
//!
//! ```json
//! {"dim": 2, "entries": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]], "label": "mixed"}
//! {"spectrum": [0.41, 0.39, 0.2, 0.0], "basis": "computational"}
//! ```
//!
//! In the second form `basis` may instead be a unitary given as rows of
//! `[re, im]` pairs; column `k` is the eigenvector for `spectrum[k]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::linalg::state::DensityMatrix;
use crate::oracle::{DescentConfig, GridConfig};
use crate::pca::OptimizerConfig;
use crate::scalar::c;
use crate::tolerance::Tolerances;
use crate::verify::BatteryConfig;

type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBasis {
    Computational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Basis {
    Named(NamedBasis),
    Unitary(Rows),
}

impl Default for Basis {
    fn default() -> Self {
        Basis::Named(NamedBasis::Computational)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub spectrum: Vec<f64>,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Matrix(MatrixFile),
    Spectrum(SpectrumFile),
}

fn rows_to_matrix(rows: &Rows) -> Result<Matrix<f64>> {
    Matrix::from_rows(
        rows.iter()
            .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
            .collect(),
    )
}

fn matrix_to_rows(m: &Matrix<f64>) -> Rows {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix<f64>, label: Option<String>, seed: Option<u64>) -> Self {
        Self {
            dim: m.rows(),
            entries: matrix_to_rows(m),
            label,
            seed,
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix<f64>> {
        let m = rows_to_matrix(&self.entries)?;
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: m.rows(),
            });
        }
        Ok(m)
    }
}

impl StateFile {
    pub fn to_density(&self, tol: &Tolerances<f64>) -> Result<DensityMatrix<f64>> {
        match self {
            StateFile::Matrix(f) => DensityMatrix::from_matrix(f.to_matrix()?, tol),
            StateFile::Spectrum(f) => {
                let d = f.spectrum.len();
                let vectors = match &f.basis {
                    Basis::Named(NamedBasis::Computational) => {
                        let id = Matrix::identity(d);
                        (0..d).map(|j| id.column(j)).collect()
                    }
                    Basis::Unitary(rows) => {
                        let u = rows_to_matrix(rows)?;
                        if u.rows() != d || u.cols() != d {
                            return Err(Error::DimMismatch {
                                left: d,
                                right: u.rows(),
                            });
                        }
                        let err = u.adjoint().matmul(&u)?.sub(&Matrix::identity(d))?.max_abs();
                        if err > tol.ortho {
                            return Err(Error::InvalidArgument(format!(
                                "basis is not unitary (max |U^dagger U - I| = {err:e})"
                            )));
                        }
                        (0..d).map(|j| u.column(j)).collect()
                    }
                };
                DensityMatrix::from_eigenpairs(f.spectrum.clone(), vectors, tol)
            }
        }
    }
}

pub fn parse_state_file(text: &str) -> Result<StateFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_state_file(path: &Path) -> Result<StateFile> {
    parse_state_file(&read_text(path)?)
}

pub fn read_state(path: &Path, tol: &Tolerances<f64>) -> Result<DensityMatrix<f64>> {
    read_state_file(path)?.to_density(tol)
}

pub fn state_file_json(file: &StateFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("state files always serialise");
    s.push('\n');
    s
}

pub fn write_state_file(path: &Path, file: &StateFile) -> Result<()> {
    write_text(path, &state_file_json(file))
}

/// Comma-separated eigenvalues, e.g. `"0.41,0.39,0.2,0"`.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("spectrum entry {t:?}: {e}")))
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Everything the CLI lets a config file override. Missing sections keep
/// their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tolerances: Tolerances<f64>,
    pub optimizer: OptimizerConfig,
    pub grid: GridConfig,
    pub descent: DescentConfig,
    pub battery: BatteryConfig,
}

pub fn parse_config(text: &str) -> Result<Config> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
}

pub fn read_config(path: &Path) -> Result<Config> {
    parse_config(&read_text(path)?)
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_number(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
