//! File formats for the batch front end.
//!
//! Matrices travel as explicit-shape JSON objects (`rows`, `cols`, `real`,
//! optional `imag`) so fixtures stay human-diffable; subspace files carry a
//! spanning set in the same format and are canonicalized on load. Reports
//! echo the command and tolerance policy, pair every boolean verdict with a
//! numerical margin, and carry named residuals, matrices and series.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numlin::{orthonormalize, re, CMat, Subspace, TolerancePolicy, C64};
use crate::Result;

/// Dense matrix with explicit shape; `imag` absent means a real matrix.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

fn check_grid(name: &str, grid: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if grid.len() != rows || grid.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!(
            "{name} array does not match the declared {rows}x{cols} shape"
        )));
    }
    Ok(())
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let real = (0..rows)
            .map(|i| (0..cols).map(|j| m[(i, j)].re).collect())
            .collect();
        let any_imag = m.iter().any(|z| z.im != 0.0);
        let imag = any_imag.then(|| {
            (0..rows)
                .map(|i| (0..cols).map(|j| m[(i, j)].im).collect())
                .collect()
        });
        MatrixFile {
            rows,
            cols,
            real,
            imag,
        }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse("matrix dimensions must be positive".into()));
        }
        check_grid("real", &self.real, self.rows, self.cols)?;
        if let Some(imag) = &self.imag {
            check_grid("imag", imag, self.rows, self.cols)?;
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| match &self.imag {
            Some(im) => C64::new(self.real[i][j], im[i][j]),
            None => re(self.real[i][j]),
        }))
    }

    /// Interpret the columns as a spanning set and canonicalize.
    pub fn to_subspace(&self, tol: &TolerancePolicy) -> Result<Subspace> {
        Ok(orthonormalize(&self.to_matrix()?, tol))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }
}

/// Tolerances echoed into every report.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ToleranceEcho {
    pub rank_tol_rel: f64,
    pub sym_tol: f64,
    pub residual_tol: f64,
}

impl From<&TolerancePolicy> for ToleranceEcho {
    fn from(t: &TolerancePolicy) -> Self {
        ToleranceEcho {
            rank_tol_rel: t.rank_tol_rel,
            sym_tol: t.sym_tol,
            residual_tol: t.residual_tol,
        }
    }
}

/// Boolean outcome plus the numerical margin that backs it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: bool,
    pub margin: f64,
}

/// A named residual of an asserted identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
}

/// A named matrix payload.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub data: MatrixFile,
}

/// A quantity tracked across truncation sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub sizes: Vec<usize>,
    pub values: Vec<f64>,
}

/// Structured outcome of one CLI command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tolerance: ToleranceEcho,
    pub verdicts: Vec<Verdict>,
    pub residuals: Vec<ResidualEntry>,
    pub matrices: Vec<NamedMatrix>,
    pub series: Vec<Series>,
    pub wall_ms: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, tol: &TolerancePolicy) -> Self {
        Report {
            command: command.into(),
            tolerance: tol.into(),
            verdicts: Vec::new(),
            residuals: Vec::new(),
            matrices: Vec::new(),
            series: Vec::new(),
            wall_ms: 0.0,
        }
    }

    pub fn verdict(&mut self, name: &str, value: bool, margin: f64) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.into(),
            value,
            margin,
        });
        self
    }

    pub fn residual(&mut self, name: &str, value: f64) -> &mut Self {
        self.residuals.push(ResidualEntry {
            name: name.into(),
            value,
        });
        self
    }

    pub fn matrix(&mut self, name: &str, m: &CMat) -> &mut Self {
        self.matrices.push(NamedMatrix {
            name: name.into(),
            data: MatrixFile::from_matrix(m),
        });
        self
    }

    pub fn series(&mut self, name: &str, sizes: Vec<usize>, values: Vec<f64>) -> &mut Self {
        self.series.push(Series {
            name: name.into(),
            sizes,
            values,
        });
        self
    }

    pub fn all_verdicts_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.value)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::mat_from_real;

    #[test]
    fn matrix_file_round_trip_is_bit_identical() {
        let m = CMat::from_fn(3, 2, |i, j| {
            C64::new(
                (1.0 + i as f64) / (3.0 + j as f64),
                (0.1 + j as f64).sqrt() * (i as f64 - 1.0),
            )
        });
        let file = MatrixFile::from_matrix(&m);
        let text = serde_json::to_string(&file).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        let m2 = back.to_matrix().unwrap();
        for (a, b) in m.iter().zip(m2.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn real_matrices_omit_imag() {
        let m = mat_from_real(&[&[1.5, -2.0], &[0.0, 3.25]]);
        let file = MatrixFile::from_matrix(&m);
        assert!(file.imag.is_none());
        let text = serde_json::to_string(&file).unwrap();
        assert!(!text.contains("imag"));
        assert!((file.to_matrix().unwrap() - m).norm() == 0.0);
    }

    #[test]
    fn shape_mismatch_is_a_parse_error() {
        let bad = MatrixFile {
            rows: 2,
            cols: 2,
            real: vec![vec![1.0, 2.0]],
            imag: None,
        };
        assert!(matches!(bad.to_matrix(), Err(Error::Parse(_))));
        let zero = MatrixFile {
            rows: 0,
            cols: 1,
            real: vec![],
            imag: None,
        };
        assert!(matches!(zero.to_matrix(), Err(Error::Parse(_))));
    }

    #[test]
    fn report_round_trip() {
        let tol = TolerancePolicy::for_dim(4);
        let mut r = Report::new("check", &tol);
        r.verdict("weak", true, 1.0e-14)
            .residual("inclusion", 3.5e-12)
            .matrix("schur_complement", &mat_from_real(&[&[0.0, 0.0], &[0.0, 0.5]]))
            .series("y0_norm", vec![4, 8], vec![4.0, 8.0]);
        r.wall_ms = 1.25;
        let text = r.to_json().unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.verdicts[0].name, "weak");
        assert!(back.all_verdicts_hold());
        assert_eq!(back.matrices[0].data.real[1][1].to_bits(), 0.5f64.to_bits());
        assert_eq!(back.series[0].sizes, vec![4, 8]);
    }
}
