use spd_core::jellium::{scf_solve, ScfSolution, SlabSpec};
use spd_core::response::{film_spd, DysonMode, FilmOptions, ResponseGrid, SubbandStates};
use spd_core::units::UNITS;
use spd_core::MaterialParams;

fn solve(thickness_nm: f64, basis: usize, points: usize) -> (ScfSolution, MaterialParams) {
    let mat = MaterialParams::aluminum();
    let spec = SlabSpec {
        thickness: UNITS.nm_to_bohr(thickness_nm),
        basis_size: basis,
        grid_points: points,
        ..SlabSpec::film(&mat)
    };
    (scf_solve(&spec, &mat).unwrap(), mat)
}

fn spd(
    sol: &ScfSolution,
    mat: &MaterialParams,
    points: usize,
    cutoff: f64,
    hs_nm: &[f64],
) -> Vec<f64> {
    let grid = ResponseGrid::new(sol.box_length, points, mat.collision_rate_au()).unwrap();
    let states = SubbandStates::from_solution(sol, &grid, cutoff).unwrap();
    let hs: Vec<f64> = hs_nm.iter().map(|&h| UNITS.nm_to_bohr(h)).collect();
    let w = 0.1 * mat.plasma_frequency_au();
    let opts = FilmOptions {
        mode: DysonMode::Full,
        ..FilmOptions::default()
    };
    film_spd(&hs, w, &states, &grid, mat.thermal_energy_au(), &opts)
        .unwrap()
        .points
        .iter()
        .map(|p| p.g_zz)
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn subband_cutoff_convergence() {
    let (sol, mat) = solve(1.0, 30, 161);
    let hs = [0.0, 1.0];
    let c4 = spd(&sol, &mat, 161, 4.0, &hs);
    let c6 = spd(&sol, &mat, 161, 6.0, &hs);
    let c8 = spd(&sol, &mat, 161, 8.0, &hs);
    for i in 0..hs.len() {
        assert!(
            rel(c4[i], c8[i]) < 5e-3,
            "h = {} nm: cutoff 4 vs 8 {:e}",
            hs[i],
            rel(c4[i], c8[i])
        );
        assert!(
            rel(c6[i], c8[i]) < 5e-4,
            "h = {} nm: cutoff 6 vs 8 {:e}",
            hs[i],
            rel(c6[i], c8[i])
        );
        assert!(rel(c6[i], c8[i]) < rel(c4[i], c8[i]));
    }
}

#[test]
fn spd_vanishes_far_from_the_film() {
    let (sol, mat) = solve(1.0, 30, 161);
    let g = spd(&sol, &mat, 161, 4.0, &[0.0, 5.0, 50.0, 200.0]);
    assert!(g.windows(2).all(|p| p[1] < p[0] && p[1] > 0.0));
    assert!(g[3] < 1e-6 * g[0]);
}

/// Doubling the response grid of the 4 nm film (about a minute in release).
#[test]
fn grid_refinement_at_film_operating_point() {
    let (sol, mat) = solve(4.0, 80, 401);
    let hs = [0.0, 1.0];
    let a = spd(&sol, &mat, 401, 4.0, &hs);
    let b = spd(&sol, &mat, 801, 4.0, &hs);
    for i in 0..hs.len() {
        assert!(
            rel(a[i], b[i]) < 5e-3,
            "h = {} nm: N_z 401 vs 801 {:e}",
            hs[i],
            rel(a[i], b[i])
        );
    }
}
