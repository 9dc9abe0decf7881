use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dielectric::dielectric_local;
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::quadrature::{integrate_to_infinity, integrate_with_breaks, QuadratureSpec};
use crate::thermal::bose_factor;
use crate::units::UNITS;

use super::SpdValue;

/// Treatment of the transverse wavenumbers entering γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Retardation {
    /// c → ∞: Q_T = Q_T0 = Q.
    #[default]
    QuasiStatic,
    /// Finite speed of light in Q_T and Q_T0.
    Retarded,
}

/// Complex wavenumbers (1/Bohr) and surface coupling of the hydrodynamic
/// half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroKernel {
    pub q: f64,
    pub q_l: Complex64,
    pub q_t: Complex64,
    pub q_t0: Complex64,
    pub gamma: Complex64,
    /// Q_L² − Q², kept separately to avoid cancellation at large Q.
    pub q_l0_sq: Complex64,
    pub epsilon: Complex64,
}

/// Square root with Re ≥ 0, and Im ≥ 0 when Re = 0.
pub(crate) fn decaying_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        -r
    } else {
        r
    }
}

/// Wavenumbers and γ at lateral wavenumber `q` (1/Bohr) and frequency
/// `omega` (Hartree).
pub fn hydro_kernel(
    q: f64,
    omega: f64,
    mat: &MaterialParams,
    retardation: Retardation,
) -> Result<HydroKernel> {
    if !(q >= 0.0) || !(omega > 0.0) {
        return Err(Error::invalid(format!(
            "hydro kernel needs Q >= 0 and omega > 0 (Q = {q}, omega = {omega})"
        )));
    }
    let wp = mat.plasma_frequency_au();
    let nu = mat.collision_rate_au();
    let b = mat.beta_au();
    let eps = dielectric_local(omega, mat);
    let q_l0_sq = Complex64::new(wp * wp - omega * omega, -omega * nu) / (b * b);
    let q_l = decaying_sqrt(q * q + q_l0_sq);
    let qc = Complex64::new(q, 0.0);
    let (q_t, q_t0, gamma) = match retardation {
        Retardation::QuasiStatic => {
            // Common factor Q cancelled so that γ(0) = 0 exactly.
            let den = q_l * (eps + 1.0) + (eps - 1.0) * q;
            if den.norm() == 0.0 {
                return Err(Error::SingularKernel { q, omega });
            }
            (qc, qc, 2.0 * q * (1.0 - eps) / den)
        }
        Retardation::Retarded => {
            let c = UNITS.speed_of_light;
            let k0 = omega / c;
            let q_t = decaying_sqrt(q * q - k0 * k0 * eps);
            let q_t0 = decaying_sqrt(Complex64::new(q * q - k0 * k0, 0.0));
            let den = q_l * (eps * q_t0 + q_t) + (eps - 1.0) * (q * q);
            if den.norm() == 0.0 {
                return Err(Error::SingularKernel { q, omega });
            }
            (q_t, q_t0, 2.0 * q * q * (1.0 - eps) / den)
        }
    };
    Ok(HydroKernel {
        q,
        q_l,
        q_t,
        q_t0,
        gamma,
        q_l0_sq,
        epsilon: eps,
    })
}

/// (Q/2Q_L)[1 − ((Q_L − Q)/(Q_L + Q))(1 + γ)], rearranged with
/// Q_L − Q = (Q_L² − Q²)/(Q_L + Q) so that its small imaginary part survives
/// at large Q.
pub fn hydro_bracket(k: &HydroKernel) -> Complex64 {
    let q = k.q;
    let s = k.q_l + q;
    let a = k.q_l0_sq / (2.0 * k.q_l * s);
    0.5 - a - a * q * (1.0 + k.gamma) / s
}

/// Imaginary part of the Q-integrand of the half-space SPD, without the
/// e^{−2Qh} factor.
pub fn hydro_q_integrand(
    q: f64,
    omega: f64,
    mat: &MaterialParams,
    retardation: Retardation,
) -> Result<f64> {
    let k = hydro_kernel(q, omega, mat, retardation)?;
    Ok(hydro_bracket(&k).im)
}

/// Closed-form double Laplace transform of the hydrodynamic density
/// response, (ω_p²/4πβ²)(1/2Q_L)[1 − ((Q_L − Q)/(Q_L + Q))(1 + γ)].
pub fn hydro_laplace_closed(
    q: f64,
    omega: f64,
    mat: &MaterialParams,
    retardation: Retardation,
) -> Result<Complex64> {
    if !(q > 0.0) {
        return Err(Error::invalid("Laplace transform needs Q > 0"));
    }
    let k = hydro_kernel(q, omega, mat, retardation)?;
    let wp = mat.plasma_frequency_au();
    let b = mat.beta_au();
    Ok(wp * wp / (4.0 * PI * b * b) * hydro_bracket(&k) / q)
}

/// Hydrodynamic density response of the half-space z ≤ 0 split into its
/// regular part and the weight of the δ(z1 − z2) term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HydroChiKernel {
    pub regular: Complex64,
    pub delta_weight: f64,
}

pub fn hydro_chi_kernel(
    z1: f64,
    z2: f64,
    q: f64,
    omega: f64,
    mat: &MaterialParams,
    retardation: Retardation,
) -> Result<HydroChiKernel> {
    if z1 > 0.0 || z2 > 0.0 {
        return Err(Error::invalid(
            "hydrodynamic kernel is defined for z1, z2 <= 0",
        ));
    }
    let k = hydro_kernel(q, omega, mat, retardation)?;
    let wp = mat.plasma_frequency_au();
    let b = mat.beta_au();
    let pre = wp * wp / (4.0 * PI * b * b);
    let bulk = (-k.q_l * (z1 - z2).abs()).exp();
    let surface = (1.0 + k.gamma) * (k.q_l * (z1 + z2)).exp();
    Ok(HydroChiKernel {
        regular: -pre * k.q_l0_sq / (2.0 * k.q_l) * (bulk + surface),
        delta_weight: pre,
    })
}

/// Hydrodynamic SPD at height `h` (Bohr) above the half-space, quasi-static.
pub fn hydro_spd_zz(
    h: f64,
    omega: f64,
    mat: &MaterialParams,
    quad: &QuadratureSpec,
) -> Result<SpdValue> {
    hydro_spd_zz_with(h, omega, mat, quad, Retardation::QuasiStatic)
}

pub fn hydro_spd_zz_with(
    h: f64,
    omega: f64,
    mat: &MaterialParams,
    quad: &QuadratureSpec,
    retardation: Retardation,
) -> Result<SpdValue> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!(
            "height must be non-negative, got {h}"
        )));
    }
    let bose = bose_factor(omega, mat.thermal_energy_au())?;
    let wp = mat.plasma_frequency_au();
    let b = mat.beta_au();
    let qs = wp / b;
    let q_cut = if h > 0.0 {
        (20.0 * qs).max(quad.cutoff_multiplier / (2.0 * h))
    } else {
        20.0 * qs
    };

    let mut failure = None;
    let mut f = |q: f64| -> f64 {
        match hydro_q_integrand(q, omega, mat, retardation) {
            Ok(v) => (-2.0 * q * h).exp() * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let mut points = vec![0.0, qs, q_cut];
    if h > 0.0 {
        for m in [0.25, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            points.push(m / (2.0 * h));
        }
    }
    points.retain(|&p| p <= q_cut);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    let head = integrate_with_breaks(&mut f, &points, quad)?;
    let tail_spec = QuadratureSpec {
        absolute_floor: quad
            .absolute_floor
            .max(quad.relative_tolerance * head.value.abs()),
        ..*quad
    };
    let tail = integrate_to_infinity(&mut f, q_cut, q_cut, &tail_spec)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let pre = bose * wp * wp / (b * b);
    Ok(SpdValue::from_zz(
        pre * (head.value + tail.value),
        pre * (head.error + tail.error),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::local_spd_zz;
    use proptest::prelude::*;

    fn al() -> MaterialParams {
        MaterialParams::aluminum()
    }

    #[test]
    fn gamma_vanishes_at_zero_q() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        for r in [Retardation::QuasiStatic, Retardation::Retarded] {
            let k = hydro_kernel(0.0, w, &m, r).unwrap();
            assert_eq!(k.gamma.norm(), 0.0);
        }
    }

    #[test]
    fn longitudinal_wavenumber_at_zero_q() {
        let mut m = al();
        m.collision_rate = 0.0;
        let w = 0.1 * m.plasma_frequency_au();
        let k = hydro_kernel(0.0, w, &m, Retardation::Retarded).unwrap();
        let per_cm = UNITS.per_bohr_to_per_cm(k.q_l.norm());
        let expected = 0.99f64.sqrt() * 2.3e16 / ((0.6f64).sqrt() * 2.03e8);
        assert!((per_cm / expected - 1.0).abs() < 1e-9);
        assert!((per_cm / 1.46e8 - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_q_limits() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        let q = 1e3 * m.plasma_frequency_au() / m.beta_au();
        let k = hydro_kernel(q, w, &m, Retardation::Retarded).unwrap();
        for z in [k.q_l, k.q_t, k.q_t0] {
            assert!((z / q - 1.0).norm() < 1e-3);
        }
    }

    #[test]
    fn branch_has_decaying_sign() {
        assert_eq!(
            decaying_sqrt(Complex64::new(-4.0, 0.0)),
            Complex64::new(0.0, 2.0)
        );
        assert_eq!(
            decaying_sqrt(Complex64::new(-4.0, -0.0)),
            Complex64::new(0.0, 2.0)
        );
        let r = decaying_sqrt(Complex64::new(-1.0, -1e-3));
        assert!(r.re >= 0.0);
    }

    #[test]
    fn kernel_symmetry_and_decay() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        let a = hydro_chi_kernel(-1.0, -3.0, 0.2, w, &m, Retardation::QuasiStatic).unwrap();
        let b = hydro_chi_kernel(-3.0, -1.0, 0.2, w, &m, Retardation::QuasiStatic).unwrap();
        assert_eq!(a.regular, b.regular);
        let far = hydro_chi_kernel(-200.0, -200.0, 0.2, w, &m, Retardation::QuasiStatic).unwrap();
        assert!(far.delta_weight > 0.0);
        let k = hydro_kernel(0.2, w, &m, Retardation::QuasiStatic).unwrap();
        let pure_bulk = -far.delta_weight * k.q_l0_sq / (2.0 * k.q_l);
        assert!((far.regular - pure_bulk).norm() < 1e-12 * pure_bulk.norm());
        assert!(hydro_chi_kernel(0.5, -1.0, 0.2, w, &m, Retardation::QuasiStatic).is_err());
    }

    #[test]
    fn stable_bracket_matches_printed_form() {
        let m = al();
        let w = 0.05 * m.plasma_frequency_au();
        for q in [0.01, 0.3, 2.0] {
            let k = hydro_kernel(q, w, &m, Retardation::QuasiStatic).unwrap();
            let printed = q / (2.0 * k.q_l) * (1.0 - (k.q_l - q) / (k.q_l + q) * (1.0 + k.gamma));
            assert!((hydro_bracket(&k) - printed).norm() < 1e-13);
        }
    }

    #[test]
    fn finite_at_contact_and_decreasing() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        let quad = QuadratureSpec::default();
        let mut prev = hydro_spd_zz(0.0, w, &m, &quad).unwrap().g_zz;
        assert!(prev.is_finite() && prev > 0.0);
        for h in [0.05, 0.2, 1.0, 5.0, 20.0, 100.0, 1000.0] {
            let g = hydro_spd_zz(h, w, &m, &quad).unwrap();
            assert!(g.g_zz < prev);
            assert_eq!(g.g_zz, 2.0 * g.g_xx);
            prev = g.g_zz;
        }
        assert!(prev < 1e-6 * hydro_spd_zz(0.0, w, &m, &quad).unwrap().g_zz);
    }

    #[test]
    fn approaches_local_model() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        let quad = QuadratureSpec::default();
        let mut last = 0.0;
        for nm in [2.0, 10.0, 50.0] {
            let h = UNITS.nm_to_bohr(nm);
            let r =
                hydro_spd_zz(h, w, &m, &quad).unwrap().g_zz / local_spd_zz(h, w, &m).unwrap().g_zz;
            assert!(r < 1.0 && r > last);
            last = r;
        }
    }

    proptest! {
        #[test]
        fn dissipative_integrand(lq in -6.0f64..4.0, x in 0.005f64..0.95) {
            let m = al();
            let w = x * m.plasma_frequency_au();
            let v = hydro_q_integrand(10f64.powf(lq), w, &m, Retardation::QuasiStatic).unwrap();
            prop_assert!(v >= 0.0);
        }
    }
}
