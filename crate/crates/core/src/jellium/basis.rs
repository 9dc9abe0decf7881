use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::grid::ZGrid;

/// One Kohn–Sham subband: energy (Hartree) and sine-basis coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subband {
    pub energy: f64,
    pub coefficients: Vec<f64>,
}

/// Box eigenfunctions √(2/L)·sin(sπz/L), s = 1..S, tabulated on a grid.
#[derive(Debug, Clone)]
pub struct SineBasis {
    length: f64,
    size: usize,
    /// values[(i, s−1)] = φ_s(z_i).
    values: DMatrix<f64>,
}

impl SineBasis {
    pub fn new(grid: &ZGrid, size: usize) -> Self {
        let length = grid.length();
        let n = grid.len();
        let mut values = DMatrix::zeros(n, size);
        // Interior nodes only: the walls are exact zeros.
        for s in 0..size {
            for i in 1..n - 1 {
                values[(i, s)] = Self::value_at(length, s + 1, grid.z()[i]);
            }
        }
        SineBasis {
            length,
            size,
            values,
        }
    }

    pub fn value_at(length: f64, s: usize, z: f64) -> f64 {
        (2.0 / length).sqrt() * (s as f64 * PI * z / length).sin()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn kinetic(&self, s: usize) -> f64 {
        0.5 * (s as f64 * PI / self.length).powi(2)
    }

    /// φ(z) = Σ_s b_s φ_s(z) at an arbitrary point.
    pub fn evaluate(&self, coefficients: &[f64], z: f64) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(s, b)| b * Self::value_at(self.length, s + 1, z))
            .sum()
    }

    /// Grid values of the given subbands, one column each.
    pub fn wavefunctions<'a>(
        &self,
        subbands: impl IntoIterator<Item = &'a Subband>,
    ) -> DMatrix<f64> {
        let cols: Vec<&Subband> = subbands.into_iter().collect();
        let mut coeffs = DMatrix::zeros(self.size, cols.len());
        for (j, sb) in cols.iter().enumerate() {
            for (s, b) in sb.coefficients.iter().enumerate().take(self.size) {
                coeffs[(s, j)] = *b;
            }
        }
        &self.values * coeffs
    }
}

/// H_ps = ½(sπ/L)²δ_ps + (2/L)∫V sin(sπz/L) sin(pπz/L) dz on the grid.
pub fn assemble_hamiltonian(v: &[f64], basis: &SineBasis, grid: &ZGrid) -> DMatrix<f64> {
    let b = basis.values();
    let mut wb = b.clone();
    for (i, mut row) in wb.row_iter_mut().enumerate() {
        row *= grid.weights()[i] * v[i];
    }
    let mut h = b.transpose() * wb;
    let s = basis.size();
    for p in 0..s {
        for q in p + 1..s {
            let m = 0.5 * (h[(p, q)] + h[(q, p)]);
            h[(p, q)] = m;
            h[(q, p)] = m;
        }
        h[(p, p)] += basis.kinetic(p + 1);
    }
    h
}

/// Full eigen-decomposition, energies ascending. Each eigenvector is
/// oriented so that its largest component is positive.
pub fn solve_subbands(h: &DMatrix<f64>) -> Result<Vec<Subband>> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::Eigen(
            "Hamiltonian must be a non-empty square matrix".into(),
        ));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("Hamiltonian has non-finite entries".into()));
    }
    let eig = SymmetricEigen::try_new(h.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigen-solver did not converge".into()))?;
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(order
        .into_iter()
        .map(|j| {
            let col = eig.eigenvectors.column(j);
            let mut big = 0;
            for (i, x) in col.iter().enumerate() {
                if x.abs() > col[big].abs() + 1e-12 {
                    big = i;
                }
            }
            let sign = if col[big] < 0.0 { -1.0 } else { 1.0 };
            Subband {
                energy: eig.eigenvalues[j],
                coefficients: col.iter().map(|x| sign * x).collect(),
            }
        })
        .collect())
}
