use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::jellium::{ScfSolution, SineBasis, ZGrid};

/// Nodes and weights of the response calculation together with the
/// broadening η (Hartree).
#[derive(Debug, Clone)]
pub struct ResponseGrid {
    pub grid: ZGrid,
    pub eta: f64,
}

impl ResponseGrid {
    pub fn new(length: f64, points: usize, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::invalid("broadening must be positive"));
        }
        Ok(ResponseGrid {
            grid: ZGrid::uniform(length, points)?,
            eta,
        })
    }

    pub fn z(&self) -> &[f64] {
        self.grid.z()
    }

    pub fn weights(&self) -> &[f64] {
        self.grid.weights()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Subbands entering the response: the first `n_occupied` lie below the
/// Fermi level, the rest up to the cutoff are final states only.
#[derive(Debug, Clone)]
pub struct SubbandStates {
    pub energies: Vec<f64>,
    pub n_occupied: usize,
    /// E_F (Hartree), the chemical potential of the slab.
    pub fermi_level: f64,
    /// Sine coefficients, one column per included subband.
    pub coefficients: DMatrix<f64>,
    pub box_length: f64,
    /// Position of the jellium edge facing the observer (Bohr).
    pub edge: f64,
    /// φ_ℓ(z_i) on the response grid.
    pub phi: DMatrix<f64>,
    /// Columns φ_ℓφ_ℓ′ for ℓ < n_occupied (outer) and all ℓ′ (inner).
    pairs: DMatrix<f64>,
}

impl SubbandStates {
    /// Takes subbands with ε < `cutoff_multiple`·E_F from `sol`.
    pub fn from_solution(
        sol: &ScfSolution,
        grid: &ResponseGrid,
        cutoff_multiple: f64,
    ) -> Result<Self> {
        if (grid.grid.length() - sol.box_length).abs() > 1e-9 * sol.box_length {
            return Err(Error::invalid("response grid must span the slab box"));
        }
        let mu = sol.chemical_potential;
        let cutoff = cutoff_multiple * mu;
        let energies: Vec<f64> = sol.energies().into_iter().filter(|&e| e < cutoff).collect();
        let n_occupied = energies.iter().filter(|&&e| e < mu).count();
        Self::build(sol, grid, energies.len(), n_occupied)
    }

    /// Takes the lowest `n_included` subbands.
    pub fn with_count(sol: &ScfSolution, grid: &ResponseGrid, n_included: usize) -> Result<Self> {
        let n_occupied = sol.occupied_count();
        Self::build(sol, grid, n_included, n_occupied)
    }

    fn build(
        sol: &ScfSolution,
        grid: &ResponseGrid,
        n_included: usize,
        n_occupied: usize,
    ) -> Result<Self> {
        if n_occupied == 0 {
            return Err(Error::invalid("no occupied subbands"));
        }
        if n_included < n_occupied || n_included > sol.subbands.len() {
            return Err(Error::invalid(format!(
                "subband cutoff {n_included} must cover the {n_occupied} occupied subbands and fit the basis"
            )));
        }
        let s = sol.basis_size();
        let coefficients = DMatrix::from_fn(s, n_included, |i, l| sol.subbands[l].coefficients[i]);
        let basis = SineBasis::new(&grid.grid, s);
        let phi = basis.values() * &coefficients;
        let n = grid.len();
        let mut pairs = DMatrix::zeros(n, n_occupied * n_included);
        for l in 0..n_occupied {
            for lp in 0..n_included {
                let col = l * n_included + lp;
                for i in 0..n {
                    pairs[(i, col)] = phi[(i, l)] * phi[(i, lp)];
                }
            }
        }
        Ok(SubbandStates {
            energies: sol.subbands[..n_included]
                .iter()
                .map(|s| s.energy)
                .collect(),
            n_occupied,
            fermi_level: sol.chemical_potential,
            coefficients,
            box_length: sol.box_length,
            edge: sol.spec.vacuum_left,
            phi,
            pairs,
        })
    }

    pub fn n_included(&self) -> usize {
        self.energies.len()
    }

    pub(crate) fn pairs(&self) -> &DMatrix<f64> {
        &self.pairs
    }

    /// φ_ℓ at an arbitrary point through the sine expansion.
    pub fn wavefunction_at(&self, l: usize, z: f64) -> f64 {
        let s = self.coefficients.nrows();
        (0..s)
            .map(|i| self.coefficients[(i, l)] * SineBasis::value_at(self.box_length, i + 1, z))
            .sum()
    }

    /// Box coordinate of an observer at height `h` above the jellium edge.
    pub fn observer(&self, h: f64) -> f64 {
        self.edge - h
    }
}
