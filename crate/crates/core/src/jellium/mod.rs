//! Self-consistent Kohn–Sham description of a jellium slab (Hartree only,
//! no exchange–correlation) at finite temperature.
//!
//! Coordinates run over the box [0, L] with L = Δ_left + d + Δ_right. The
//! positive background fills [Δ_left, Δ_left + d] and wavefunctions are
//! expanded in the box sine basis √(2/L)·sin(sπz/L).

mod basis;
mod grid;
mod io;
mod mixing;
mod occupation;
mod potential;
mod scf;

pub use basis::{assemble_hamiltonian, solve_subbands, SineBasis, Subband};
pub use grid::{simpson_weights, ZGrid};
pub use mixing::{KerkerFilter, Mixer, Mixing};
pub use occupation::{
    chemical_potential, density_from_states, sheet_density, subband_weights,
    ZERO_TEMPERATURE_KELVIN,
};
pub use potential::{background_potential, effective_potential, Background};
pub use scf::{ibm_solution, scf_solve, ScfSolution, SlabSpec};
