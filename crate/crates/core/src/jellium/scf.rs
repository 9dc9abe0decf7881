use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::{derive_material, MaterialParams};
use crate::units::UNITS;

use super::basis::{assemble_hamiltonian, solve_subbands, SineBasis, Subband};
use super::grid::ZGrid;
use super::mixing::{Mixer, Mixing};
use super::occupation::{chemical_potential, density_from_states};
use super::potential::{effective_potential, Background};

/// Geometry and numerical parameters of a slab calculation. Lengths in Bohr.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabSpec {
    /// Jellium thickness d.
    pub thickness: f64,
    /// Distance from the left jellium edge to the left wall.
    pub vacuum_left: f64,
    pub vacuum_right: f64,
    /// Number of sine basis functions S_max.
    pub basis_size: usize,
    /// Number of z-grid nodes N_z.
    pub grid_points: usize,
    pub mixing: Mixing,
    /// Convergence threshold on max|n_out − n_in| (1/Bohr³).
    pub density_tolerance: f64,
    pub max_iterations: usize,
    /// With `false` the effective potential is held at zero (infinite
    /// barrier model).
    pub interacting: bool,
}

impl SlabSpec {
    /// 4 nm film of the given metal with the default box extensions.
    pub fn film(mat: &MaterialParams) -> Self {
        let d = derive_material(mat);
        SlabSpec {
            thickness: UNITS.nm_to_bohr(4.0),
            vacuum_left: d.box_extension,
            vacuum_right: d.box_extension,
            basis_size: 80,
            grid_points: 401,
            mixing: Mixing::default(),
            density_tolerance: 1e-8,
            max_iterations: 500,
            interacting: true,
        }
    }

    pub fn box_length(&self) -> f64 {
        self.vacuum_left + self.thickness + self.vacuum_right
    }

    pub fn background(&self, mat: &MaterialParams) -> Background {
        Background {
            start: self.vacuum_left,
            end: self.vacuum_left + self.thickness,
            density: derive_material(mat).background_density,
        }
    }

    /// Minimum number of basis functions for a given Fermi wavenumber.
    pub fn required_basis(&self, fermi_wavenumber: f64) -> usize {
        (fermi_wavenumber * self.box_length() / std::f64::consts::PI).ceil() as usize + 4
    }

    pub fn validate(&self, mat: &MaterialParams) -> Result<()> {
        mat.validate()?;
        if !(self.thickness > 0.0) {
            return Err(Error::invalid("slab thickness must be positive"));
        }
        if !(self.vacuum_left >= 0.0 && self.vacuum_right >= 0.0) {
            return Err(Error::invalid("vacuum extensions must be non-negative"));
        }
        let need = self.required_basis(derive_material(mat).fermi_wavenumber);
        if self.basis_size < need {
            return Err(Error::invalid(format!(
                "basis size {} below the occupied-subband estimate {need}",
                self.basis_size
            )));
        }
        if self.grid_points < 4 * self.basis_size {
            return Err(Error::invalid(format!(
                "grid needs at least 4 points per basis function ({} < {})",
                self.grid_points,
                4 * self.basis_size
            )));
        }
        if !(self.density_tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::invalid(
                "tolerance and iteration limit must be positive",
            ));
        }
        self.mixing.validate()
    }
}

/// Converged (or last) state of the self-consistency loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfSolution {
    pub spec: SlabSpec,
    pub material: MaterialParams,
    /// Box length L (Bohr).
    pub box_length: f64,
    /// n₊ (1/Bohr³).
    pub background_density: f64,
    /// μ (Hartree).
    pub chemical_potential: f64,
    pub subbands: Vec<Subband>,
    /// Grid nodes (Bohr).
    pub z: Vec<f64>,
    /// n(z) (1/Bohr³).
    pub density: Vec<f64>,
    /// V_eff(z) (Hartree).
    pub potential: Vec<f64>,
    /// |∫n − n₊d|/(n₊d).
    pub neutrality_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    /// max|n_out − n_in| per iteration.
    pub history: Vec<f64>,
}

impl ScfSolution {
    pub fn energies(&self) -> Vec<f64> {
        self.subbands.iter().map(|s| s.energy).collect()
    }

    /// Subbands with ε_ℓ < μ.
    pub fn occupied_count(&self) -> usize {
        self.subbands
            .iter()
            .filter(|s| s.energy < self.chemical_potential)
            .count()
    }

    pub fn grid(&self) -> Result<ZGrid> {
        ZGrid::uniform(self.box_length, self.z.len())
    }

    pub fn background(&self) -> Background {
        self.spec.background(&self.material)
    }

    /// Number of sine coefficients stored per subband.
    /// Raises a non-converged solution as an error.
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.history.last().copied().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn basis_size(&self) -> usize {
        self.subbands.first().map_or(0, |s| s.coefficients.len())
    }
}

/// Self-consistent solution of the slab at the material temperature.
pub fn scf_solve(spec: &SlabSpec, mat: &MaterialParams) -> Result<ScfSolution> {
    spec.validate(mat)?;
    let length = spec.box_length();
    let grid = ZGrid::uniform(length, spec.grid_points)?;
    let basis = SineBasis::new(&grid, spec.basis_size);
    let bg = spec.background(mat);
    let target = bg.sheet_density();
    let kt = mat.thermal_energy_au();

    let zero = vec![0.0; grid.len()];
    let step = |v: &[f64]| -> Result<(Vec<Subband>, f64, Vec<f64>)> {
        let h = assemble_hamiltonian(v, &basis, &grid);
        let subbands = solve_subbands(&h)?;
        let energies: Vec<f64> = subbands.iter().map(|s| s.energy).collect();
        let mu = chemical_potential(&energies, target, kt)?;
        let n = density_from_states(&subbands, mu, &basis, kt);
        Ok((subbands, mu, n))
    };

    // The first input density is the infinite-barrier one.
    let (_, _, mut n_in) = step(&zero)?;
    let mut mixer = Mixer::new(spec.mixing, grid.len(), length);
    let mut history = Vec::new();
    let mut converged = false;
    let mut last = None;
    for _ in 0..spec.max_iterations {
        let v = if spec.interacting {
            effective_potential(&n_in, &grid, &bg)
        } else {
            zero.clone()
        };
        let (subbands, mu, n_out) = step(&v)?;
        let res = n_out
            .iter()
            .zip(&n_in)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        history.push(res);
        log::debug!(
            "scf iteration {}: residual {res:e}, mu {mu:.10}",
            history.len()
        );
        if res < spec.density_tolerance {
            converged = true;
            last = Some((subbands, mu, n_out, v));
            break;
        }
        n_in = mixer.next(&n_in, &n_out);
        last = Some((subbands, mu, n_out, v));
    }
    let (subbands, mu, density, potential) = last.expect("at least one iteration");
    warn_on_oscillation(&history);
    if !converged {
        log::warn!(
            "self-consistency not reached after {} iterations (residual {:e})",
            history.len(),
            history.last().copied().unwrap_or(f64::NAN)
        );
    }
    let neutrality_residual = (grid.integrate(&density) - target).abs() / target;
    Ok(ScfSolution {
        spec: *spec,
        material: *mat,
        box_length: length,
        background_density: bg.density,
        chemical_potential: mu,
        subbands,
        z: grid.z().to_vec(),
        density,
        potential,
        neutrality_residual,
        converged,
        iterations: history.len(),
        history,
    })
}

fn warn_on_oscillation(history: &[f64]) {
    const BURN_IN: usize = 20;
    let rises = history
        .windows(2)
        .skip(BURN_IN)
        .filter(|w| w[1] > w[0])
        .count();
    if rises > 0 {
        log::warn!("scf residual increased {rises} times after the first {BURN_IN} iterations");
    }
}

/// Infinite-barrier (V_eff ≡ 0) solution in the same box.
pub fn ibm_solution(spec: &SlabSpec, mat: &MaterialParams) -> Result<ScfSolution> {
    let ibm = SlabSpec {
        interacting: false,
        mixing: Mixing::Linear { alpha: 1.0 },
        ..*spec
    };
    scf_solve(&ibm, mat)
}
