//! Material parameters and the quantities derived from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::UNITS;

/// Drude/jellium description of a simple metal, in the units the parameters
/// are usually quoted in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Plasma frequency ω_p (rad/s).
    pub plasma_frequency: f64,
    /// Collision rate ν (1/s).
    pub collision_rate: f64,
    /// Fermi velocity v_F (cm/s).
    pub fermi_velocity: f64,
    /// Wigner–Seitz radius r_s (Bohr).
    pub wigner_seitz_radius: f64,
    /// Temperature T (K).
    pub temperature: f64,
}

impl MaterialParams {
    /// Aluminum at room temperature.
    pub fn aluminum() -> Self {
        MaterialParams {
            plasma_frequency: 2.3e16,
            collision_rate: 1.3e14,
            fermi_velocity: 2.03e8,
            wigner_seitz_radius: 2.07,
            temperature: 300.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, m: &str| if c { Ok(()) } else { Err(Error::invalid(m)) };
        let finite = [
            self.plasma_frequency,
            self.collision_rate,
            self.fermi_velocity,
            self.wigner_seitz_radius,
            self.temperature,
        ]
        .iter()
        .all(|x| x.is_finite());
        ok(finite, "material parameters must be finite")?;
        ok(
            self.plasma_frequency > 0.0,
            "plasma frequency must be positive",
        )?;
        ok(
            self.collision_rate >= 0.0,
            "collision rate must be non-negative",
        )?;
        ok(
            self.collision_rate < self.plasma_frequency,
            "collision rate must be below the plasma frequency",
        )?;
        ok(self.fermi_velocity > 0.0, "Fermi velocity must be positive")?;
        ok(
            self.wigner_seitz_radius > 0.0,
            "Wigner-Seitz radius must be positive",
        )?;
        ok(self.temperature >= 0.0, "temperature must be non-negative")
    }

    /// ω_p in Hartree.
    pub fn plasma_frequency_au(&self) -> f64 {
        UNITS.rad_per_s_to_hartree(self.plasma_frequency)
    }

    /// ν in Hartree.
    pub fn collision_rate_au(&self) -> f64 {
        UNITS.rad_per_s_to_hartree(self.collision_rate)
    }

    /// Hydrodynamic pressure velocity β = √(3/5)·v_F in atomic units.
    pub fn beta_au(&self) -> f64 {
        (0.6f64).sqrt() * UNITS.cm_per_s_to_au(self.fermi_velocity)
    }

    /// k_B T in Hartree.
    pub fn thermal_energy_au(&self) -> f64 {
        UNITS.kelvin_to_hartree(self.temperature)
    }
}

/// Quantities fixed by the material parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedMaterial {
    /// β = √(3/5)·v_F (cm/s).
    pub beta: f64,
    /// k_F = (9π/4)^(1/3)/r_s (1/Bohr).
    pub fermi_wavenumber: f64,
    /// E_F = k_F²/2 (Hartree).
    pub fermi_energy: f64,
    /// n₊ = 3/(4π r_s³) (1/Bohr³).
    pub background_density: f64,
    /// Jellium plasma frequency √(4π n₊) = √(3/r_s³), in rad/s.
    pub jellium_plasma_frequency: f64,
    /// Input ω_p divided by the jellium value (diagnostic only).
    pub plasma_frequency_ratio: f64,
    /// Distance 3π/(8k_F) beyond the jellium edge at which wavefunctions vanish (Bohr).
    pub box_extension: f64,
}

pub fn derive_material(mat: &MaterialParams) -> DerivedMaterial {
    let rs = mat.wigner_seitz_radius;
    let kf = (9.0 * PI / 4.0).cbrt() / rs;
    let wp_jellium = UNITS.hartree_to_rad_per_s((3.0 / rs.powi(3)).sqrt());
    DerivedMaterial {
        beta: (0.6f64).sqrt() * mat.fermi_velocity,
        fermi_wavenumber: kf,
        fermi_energy: 0.5 * kf * kf,
        background_density: 3.0 / (4.0 * PI * rs.powi(3)),
        jellium_plasma_frequency: wp_jellium,
        plasma_frequency_ratio: wp_jellium / mat.plasma_frequency,
        box_extension: 3.0 * PI / (8.0 * kf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aluminum_derived() {
        let d = derive_material(&MaterialParams::aluminum());
        assert!((d.fermi_wavenumber - 0.927_16).abs() < 1e-4);
        assert!((d.fermi_energy - 0.429_81).abs() < 1e-4);
        assert!((UNITS.hartree_to_ev(d.fermi_energy) - 11.70).abs() < 0.01);
        assert!((d.box_extension - 1.2706).abs() < 1e-3);
        assert!((d.jellium_plasma_frequency / 2.404e16 - 1.0).abs() < 1e-3);
        assert!((d.plasma_frequency_ratio - 1.045).abs() < 1e-3);
        assert!((d.background_density - 0.026_91).abs() < 1e-4);
        // 4π n₊ is the square of the jellium plasma frequency in atomic units.
        let wp = UNITS.rad_per_s_to_hartree(d.jellium_plasma_frequency);
        assert!((4.0 * PI * d.background_density - wp * wp).abs() < 1e-14);
    }

    #[test]
    fn beta_in_both_unit_systems() {
        let m = MaterialParams::aluminum();
        let d = derive_material(&m);
        assert!((UNITS.au_to_cm_per_s(m.beta_au()) / d.beta - 1.0).abs() < 1e-12);
        // ω_p/β quoted in 1/cm.
        let q = UNITS.per_bohr_to_per_cm(m.plasma_frequency_au() / m.beta_au());
        assert!((q / 1.4627e8 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn validation() {
        assert!(MaterialParams::aluminum().validate().is_ok());
        let mut m = MaterialParams::aluminum();
        m.collision_rate = 3e16;
        assert!(m.validate().is_err());
        m = MaterialParams::aluminum();
        m.temperature = -1.0;
        assert!(m.validate().is_err());
        m = MaterialParams::aluminum();
        m.fermi_velocity = f64::NAN;
        assert!(m.validate().is_err());
    }
}
