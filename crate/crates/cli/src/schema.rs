//! JSON form shared by pencils and tuples: `{"nu": n, "g": g, "coeffs": [[row-major n×n], ...]}`.
//!
//! For a tuple `nu` is the matrix size. Floats are written in shortest round-trip form and
//! parsed exactly, so a file read back gives bit-identical matrices.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use spectra_theta_core::pencil::{MonicPencil, SymTuple};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFamily {
    pub nu: usize,
    pub g: usize,
    pub coeffs: Vec<Vec<f64>>,
}

impl MatrixFamily {
    pub fn from_mats(mats: &[DMatrix<f64>]) -> Self {
        let nu = mats.first().map_or(0, |m| m.nrows());
        let coeffs = mats.iter().map(|m| m.transpose().as_slice().to_vec()).collect();
        Self { nu, g: mats.len(), coeffs }
    }

    pub fn to_mats(&self) -> Result<Vec<DMatrix<f64>>> {
        if self.coeffs.len() != self.g {
            return Err(CliError::Input(format!(
                "g is {} but {} coefficient arrays were given",
                self.g,
                self.coeffs.len()
            )));
        }
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.len() != self.nu * self.nu {
                    return Err(CliError::Input(format!(
                        "coefficient {j} has {} entries, expected {}x{}",
                        c.len(),
                        self.nu,
                        self.nu
                    )));
                }
                Ok(DMatrix::from_row_slice(self.nu, self.nu, c))
            })
            .collect()
    }

    pub fn to_pencil(&self) -> Result<MonicPencil> {
        Ok(MonicPencil::new(self.to_mats()?)?)
    }

    pub fn to_tuple(&self) -> Result<SymTuple> {
        Ok(SymTuple::new(self.to_mats()?)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("finite floats serialize");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_owned(), source })
    }
}
