//! Continuum descriptions of a metal half-space: the local Drude baseline,
//! the hydrodynamic nonlocal model and the bulk nonlocal spectrum.

mod bulk;
mod hydro;
mod local;

pub use bulk::{
    bulk_longitudinal_integrand, bulk_spectrum, bulk_transverse_integrand, BulkSpectrum,
};
pub use hydro::{
    hydro_bracket, hydro_chi_kernel, hydro_kernel, hydro_laplace_closed, hydro_q_integrand,
    hydro_spd_zz, hydro_spd_zz_with, HydroChiKernel, HydroKernel, Retardation,
};
pub use local::{local_spd_zz, surface_loss};

/// Field spectral power density at one point (atomic units, ℏ/Bohr³ per
/// unit angular frequency).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdValue {
    pub g_zz: f64,
    pub g_xx: f64,
    /// Absolute error bound of `g_zz`.
    pub error: f64,
}

impl SpdValue {
    pub(crate) fn from_zz(g_zz: f64, error: f64) -> Self {
        SpdValue {
            g_zz,
            g_xx: 0.5 * g_zz,
            error,
        }
    }
}
