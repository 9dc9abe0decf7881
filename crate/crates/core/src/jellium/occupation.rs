use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::UNITS;

use super::basis::{SineBasis, Subband};

/// Temperatures below this are handled with step occupations.
pub const ZERO_TEMPERATURE_KELVIN: f64 = 1.0;

fn is_zero_temperature(kt: f64) -> bool {
    kt < UNITS.kelvin_to_hartree(ZERO_TEMPERATURE_KELVIN)
}

/// ln(1 + eˣ) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Sheet densities per subband: (k_BT/π)·ln(1 + e^{(μ−ε)/k_BT}), or
/// (μ − ε)₊/π at zero temperature.
pub fn subband_weights(energies: &[f64], mu: f64, kt: f64) -> Vec<f64> {
    energies
        .iter()
        .map(|&e| {
            if is_zero_temperature(kt) {
                (mu - e).max(0.0) / PI
            } else {
                kt / PI * softplus((mu - e) / kt)
            }
        })
        .collect()
}

/// Total electron sheet density at chemical potential `mu`.
pub fn sheet_density(energies: &[f64], mu: f64, kt: f64) -> f64 {
    subband_weights(energies, mu, kt).iter().sum()
}

/// Chemical potential placing `target` electrons per unit area in subbands
/// with the given ascending `energies`.
pub fn chemical_potential(energies: &[f64], target: f64, kt: f64) -> Result<f64> {
    if energies.is_empty() || !(target > 0.0) {
        return Err(Error::invalid(
            "chemical potential needs subbands and a positive sheet density",
        ));
    }
    let top = energies[energies.len() - 1];
    if is_zero_temperature(kt) {
        let mut sum = 0.0;
        for (m, &e) in energies.iter().enumerate() {
            sum += e;
            let mu = (PI * target + sum) / (m + 1) as f64;
            if m + 1 < energies.len() && mu <= energies[m + 1] {
                return Ok(mu);
            }
        }
        return Err(Error::RootNotBracketed(format!(
            "all {} basis states filled; enlarge the basis",
            energies.len()
        )));
    }
    if sheet_density(energies, top, kt) < target {
        return Err(Error::RootNotBracketed(format!(
            "sheet density at the highest basis level {top:e} Ha is below the target; enlarge the basis"
        )));
    }
    let f = |mu: f64| sheet_density(energies, mu, kt) - target;
    let mut hi = (energies[0] + PI * target).min(top);
    let mut lo = energies[0] - 40.0 * kt;
    let mut step = 40.0 * kt;
    while f(lo) >= 0.0 {
        step *= 2.0;
        lo = energies[0] - step;
        if !lo.is_finite() {
            return Err(Error::RootNotBracketed("lower bracket diverged".into()));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// n(z_i) = Σ_ℓ w_ℓ|φ_ℓ(z_i)|².
pub fn density_from_states(subbands: &[Subband], mu: f64, basis: &SineBasis, kt: f64) -> Vec<f64> {
    let energies: Vec<f64> = subbands.iter().map(|s| s.energy).collect();
    let w = subband_weights(&energies, mu, kt);
    let wmax = w.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..w.len()).filter(|&l| w[l] > 1e-20 * wmax).collect();
    let phi = basis.wavefunctions(keep.iter().map(|&l| &subbands[l]));
    let n = phi.nrows();
    (0..n)
        .map(|i| {
            keep.iter()
                .enumerate()
                .map(|(j, &l)| w[l] * phi[(i, j)] * phi[(i, j)])
                .sum()
        })
        .collect()
}
