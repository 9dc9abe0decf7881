//! Density response of the jellium slab and the resulting film SPD.
//!
//! χ⁰ is assembled from the Kohn–Sham subbands as a sum of rank-one terms
//! F_{ℓℓ′}(Q,ω)·v vᵀ with v = φ_ℓφ_ℓ′ on the response grid. Screening
//! solves χ = χ⁰ + χ⁰V̂χ by Nyström discretisation, V̂ = W V W with the
//! Coulomb kernel V = 2π e^{−Q|z−z′|}/Q and W the quadrature weights.
//!
//! Sign convention: χ is the retarded response, so Im χ⁰ < 0 for ω > 0 and
//! the film SPD carries −Im of the contracted response.

mod chi;
mod fcoef;
mod film;
mod g0;
mod states;

pub use chi::{
    chi0_at, chi0_matrix, coulomb_kernel, coulomb_operator, dyson_solve, g_interaction,
    g_interaction_at, Chi0Matrix, ChiMatrix, DysonMode,
};
pub use fcoef::{f_coefficient, FTable};
pub use film::{film_spd, sample_q, FilmOptions, FilmPoint, FilmSpectrum, QSample};
pub use g0::{
    g0_box_states, g0_closed, g0_observed, g0_overlap_sum, overlap_matrix, wall_overlap, Flavor,
};
pub use states::{ResponseGrid, SubbandStates};

#[cfg(test)]
pub(crate) mod fixture {
    use super::{ResponseGrid, SubbandStates};
    use crate::jellium::{ibm_solution, scf_solve, SlabSpec};
    use crate::material::MaterialParams;

    /// A thin Al slab with a coarse response grid.
    pub fn small(
        interacting: bool,
        points: usize,
    ) -> (SubbandStates, ResponseGrid, MaterialParams) {
        let mat = MaterialParams::aluminum();
        let spec = SlabSpec {
            thickness: 20.0,
            basis_size: 30,
            grid_points: 161,
            ..SlabSpec::film(&mat)
        };
        let sol = if interacting {
            scf_solve(&spec, &mat).unwrap()
        } else {
            ibm_solution(&spec, &mat).unwrap()
        };
        let grid = ResponseGrid::new(sol.box_length, points, mat.collision_rate_au()).unwrap();
        let states = SubbandStates::from_solution(&sol, &grid, 4.0).unwrap();
        (states, grid, mat)
    }
}
