//! Thermal occupation factors and the Planck spectrum. Frequencies and
//! temperatures are in Hartree; results carry ℏ = 1.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::UNITS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalFactors {
    /// ℏ/(exp(ℏω/k_BT) − 1).
    pub bose: f64,
    /// ℏ·coth(ℏω/2k_BT).
    pub coth: f64,
}

/// Bose and coth factors at frequency `omega` and thermal energy `kt`
/// (both Hartree). `kt = 0` gives the zero-temperature limit.
pub fn thermal_factors(omega: f64, kt: f64) -> Result<ThermalFactors> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!(
            "frequency must be positive, got {omega}"
        )));
    }
    if !(kt >= 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be non-negative, got {kt}"
        )));
    }
    if kt == 0.0 {
        return Ok(ThermalFactors {
            bose: 0.0,
            coth: 1.0,
        });
    }
    let em1 = (omega / kt).exp_m1();
    let bose = 1.0 / em1;
    Ok(ThermalFactors {
        bose,
        coth: 1.0 + 2.0 * bose,
    })
}

/// Bose factor alone; see [`thermal_factors`].
pub fn bose_factor(omega: f64, kt: f64) -> Result<f64> {
    thermal_factors(omega, kt).map(|t| t.bose)
}

/// Thermal black-body spectral energy density u_BB(ω) = ω³/(π²c³)·bose
/// in atomic units (no zero-point term).
pub fn planck_density(omega: f64, kt: f64) -> Result<f64> {
    if !(kt > 0.0) {
        if kt == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::invalid("temperature must be non-negative"));
    }
    let c = UNITS.speed_of_light;
    let bose = bose_factor(omega, kt)?;
    Ok(omega.powi(3) / (PI * PI * c.powi(3)) * bose)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ln2_gives_unit_bose() {
        let t = thermal_factors(2f64.ln(), 1.0).unwrap();
        assert!((t.bose - 1.0).abs() < 1e-15);
        assert!((t.coth - 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature() {
        let t = thermal_factors(0.1, 0.0).unwrap();
        assert_eq!(t.bose, 0.0);
        assert_eq!(t.coth, 1.0);
        // A tiny but finite temperature underflows smoothly.
        let t = thermal_factors(0.1, 1e-8).unwrap();
        assert_eq!(t.bose, 0.0);
        assert_eq!(planck_density(0.1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_frequency() {
        assert!(thermal_factors(0.0, 1.0).is_err());
        assert!(thermal_factors(-1.0, 1.0).is_err());
        assert!(thermal_factors(1.0, -1.0).is_err());
    }

    #[test]
    fn rayleigh_jeans_limit() {
        let kt = 1e-3;
        let w = 1e-9;
        let c = UNITS.speed_of_light;
        let rj = w * w * kt / (PI * PI * c.powi(3));
        assert!((planck_density(w, kt).unwrap() / rj - 1.0).abs() < 1e-5);
    }

    fn peak_oracle() -> f64 {
        // Root of 3(1 − e^{−x}) = x on [1, 5] by bisection.
        let f = |x: f64| 3.0 * (1.0 - (-x).exp()) - x;
        let (mut a, mut b) = (1.0, 5.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn planck_peak() {
        let x0 = peak_oracle();
        assert!((x0 - 2.8214).abs() < 1e-4);
        // Golden-section maximisation of u_BB at fixed T.
        let kt = 1e-3;
        let u = |x: f64| planck_density(x * kt, kt).unwrap();
        let (mut a, mut b) = (1.0, 5.0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if u(c) > u(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert!((0.5 * (a + b) - x0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn coth_identity(w in 1e-6f64..10.0, kt in 1e-6f64..10.0) {
            let t = thermal_factors(w, kt).unwrap();
            prop_assert!(((t.coth - 2.0 * t.bose) - 1.0).abs() < 1e-14 * t.coth.max(1.0));
            let exact = 1.0 / (0.5 * w / kt).tanh();
            prop_assert!((t.coth / exact - 1.0).abs() < 1e-12);
        }
    }
}
