//! Drude and hydrodynamic dielectric functions (atomic units).

use num_complex::Complex64;

use crate::material::MaterialParams;

/// Local Drude permittivity ε(ω) = 1 − ω_p²/(ω² + iων).
pub fn dielectric_local(omega: f64, mat: &MaterialParams) -> Complex64 {
    dielectric_nonlocal(omega, 0.0, mat)
}

/// Hydrodynamic permittivity ε(ω,k) = 1 − ω_p²/(ω² + iνω − β²k²), with `k`
/// in 1/Bohr.
pub fn dielectric_nonlocal(omega: f64, k: f64, mat: &MaterialParams) -> Complex64 {
    let wp = mat.plasma_frequency_au();
    let nu = mat.collision_rate_au();
    let b = mat.beta_au();
    let den = Complex64::new(omega * omega - b * b * k * k, nu * omega);
    1.0 - wp * wp / den
}

/// 1/ε(ω,k) written as D/(D − ω_p²) with D = ω² + iνω − β²k², which stays
/// finite where ε itself has a pole.
pub fn inverse_dielectric_nonlocal(omega: f64, k: f64, mat: &MaterialParams) -> Complex64 {
    let wp = mat.plasma_frequency_au();
    let nu = mat.collision_rate_au();
    let b = mat.beta_au();
    let den = Complex64::new(omega * omega - b * b * k * k, nu * omega);
    den / (den - wp * wp)
}
