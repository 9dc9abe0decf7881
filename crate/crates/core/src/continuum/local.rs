use crate::dielectric::dielectric_local;
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::thermal::bose_factor;

use super::SpdValue;

/// Surface loss function Im[(ε − 1)/(ε + 1)] of the Drude metal.
pub fn surface_loss(omega: f64, mat: &MaterialParams) -> f64 {
    let e = dielectric_local(omega, mat);
    ((e - 1.0) / (e + 1.0)).im
}

/// Quasi-static local SPD at distance `h` (Bohr) above a Drude half-space:
/// g_zz = bose·Im[(ε−1)/(ε+1)]/(2h³).
pub fn local_spd_zz(h: f64, omega: f64, mat: &MaterialParams) -> Result<SpdValue> {
    if !(h > 0.0) {
        return Err(Error::invalid(format!(
            "local SPD diverges as 1/h^3 and is undefined at h = {h}"
        )));
    }
    let bose = bose_factor(omega, mat.thermal_energy_au())?;
    Ok(SpdValue::from_zz(
        bose * surface_loss(omega, mat) / (2.0 * h.powi(3)),
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_scaling_and_h_zero() {
        let m = MaterialParams::aluminum();
        let w = 0.1 * m.plasma_frequency_au();
        let a = local_spd_zz(10.0, w, &m).unwrap();
        let b = local_spd_zz(20.0, w, &m).unwrap();
        assert!((a.g_zz / 8.0 - b.g_zz).abs() <= 1e-15 * b.g_zz);
        assert_eq!(a.g_xx * 2.0, a.g_zz);
        assert!(local_spd_zz(0.0, w, &m).is_err());
    }

    #[test]
    fn loss_at_tenth_plasma_frequency() {
        let m = MaterialParams::aluminum();
        let w = 0.1 * m.plasma_frequency_au();
        // ε at ω = 0.1ω_p evaluated by hand in SI units.
        let e = num_complex::Complex64::new(-98.681_546, 5.634_170);
        let oracle = ((e - 1.0) / (e + 1.0)).im;
        assert!((surface_loss(w, &m) / oracle - 1.0).abs() < 1e-4);
        assert!((surface_loss(w, &m) - 1.18e-3).abs() < 0.01e-3);
    }

    #[test]
    fn loss_peak_at_surface_plasmon() {
        let mut m = MaterialParams::aluminum();
        m.collision_rate = 1e12;
        let wp = m.plasma_frequency_au();
        let (mut a, mut b) = (0.5 * wp, 0.9 * wp);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if surface_loss(c, &m) > surface_loss(d, &m) {
                b = d;
            } else {
                a = c;
            }
        }
        let peak = 0.5 * (a + b) / wp;
        assert!((peak - 0.5f64.sqrt()).abs() < 1e-4);
    }
}
