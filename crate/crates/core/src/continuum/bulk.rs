use std::f64::consts::PI;

use crate::dielectric::{dielectric_nonlocal, inverse_dielectric_nonlocal};
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::quadrature::{integrate_with_breaks, QuadratureSpec};
use crate::thermal::bose_factor;
use crate::units::UNITS;

/// Trace of the field SPD inside an infinite hydrodynamic metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkSpectrum {
    /// g_EE = longitudinal + transverse (+ analytic tail).
    pub total: f64,
    pub longitudinal: f64,
    pub transverse: f64,
    /// Analytic estimate of the longitudinal integral beyond the cutoff,
    /// included in `total` and `longitudinal`.
    pub tail: f64,
    pub error: f64,
}

/// k²·Im ε/|ε|² of the longitudinal channel.
pub fn bulk_longitudinal_integrand(k: f64, omega: f64, mat: &MaterialParams) -> f64 {
    -k * k * inverse_dielectric_nonlocal(omega, k, mat).im
}

/// k²·Im ε/|k²c² − ω²ε|² of the transverse channel.
pub fn bulk_transverse_integrand(k: f64, omega: f64, mat: &MaterialParams) -> f64 {
    let c = UNITS.speed_of_light;
    let eps = dielectric_nonlocal(omega, k, mat);
    let den = k * k * c * c - omega * omega * eps;
    k * k * eps.im / den.norm_sqr()
}

/// Bulk g_EE(ω) = 4π∫k² g_EE(ω,k) dk with the thermal part of the
/// occupation only.
pub fn bulk_spectrum(
    omega: f64,
    mat: &MaterialParams,
    quad: &QuadratureSpec,
) -> Result<BulkSpectrum> {
    if !(omega > 0.0) {
        return Err(Error::invalid("frequency must be positive"));
    }
    let bose = bose_factor(omega, mat.thermal_energy_au())?;
    let wp = mat.plasma_frequency_au();
    let nu = mat.collision_rate_au();
    let b = mat.beta_au();
    let c = UNITS.speed_of_light;
    let qs = wp / b;
    let k_max = 1e3 * qs;

    // Longitudinal: features at the plasmon (ω² = ω_p² + β²k²) and at the
    // pole of ε (βk = ω).
    let mut pts = vec![0.0, omega / b, qs, 10.0 * qs, k_max];
    if omega > wp {
        pts.push((omega * omega - wp * wp).sqrt() / b);
    }
    let pts = sorted_breaks(pts, k_max);
    let long = integrate_with_breaks(|k| bulk_longitudinal_integrand(k, omega, mat), &pts, quad)?;
    let tail = wp * wp * nu * omega / (b.powi(4) * k_max);

    // Transverse: light-cone scale ω√|ε|/c and the same pole.
    let eps0 = crate::dielectric::dielectric_local(omega, mat);
    let k_light = omega * eps0.norm().sqrt() / c;
    let mut pts = vec![
        0.0,
        omega / c,
        k_light,
        10.0 * k_light,
        omega / b,
        qs,
        k_max,
    ];
    let width = nu / b;
    pts.push((omega / b - 5.0 * width).max(0.0));
    pts.push(omega / b + 5.0 * width);
    let pts = sorted_breaks(pts, k_max);
    let trans = integrate_with_breaks(|k| bulk_transverse_integrand(k, omega, mat), &pts, quad)?;

    let lpre = 2.0 * bose / (PI * PI);
    let tpre = 4.0 * bose * omega.powi(4) / (PI * PI);
    let longitudinal = lpre * (long.value + tail);
    let transverse = tpre * trans.value;
    Ok(BulkSpectrum {
        total: longitudinal + transverse,
        longitudinal,
        transverse,
        tail: lpre * tail,
        error: lpre * (long.error + tail) + tpre * trans.error,
    })
}

fn sorted_breaks(mut pts: Vec<f64>, upper: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p >= 0.0 && *p <= upper);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * upper);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::dielectric_local;

    fn al() -> MaterialParams {
        MaterialParams::aluminum()
    }

    #[test]
    fn integrands_reduce_to_local_at_k_zero() {
        let m = al();
        let w = 0.1 * m.plasma_frequency_au();
        let e = dielectric_local(w, &m);
        let k = 1e-30;
        let t = bulk_transverse_integrand(k, w, &m) / (k * k);
        let expect = e.im / (w.powi(4) * e.norm_sqr());
        assert!((t / expect - 1.0).abs() < 1e-12);
        let l = bulk_longitudinal_integrand(k, w, &m) / (k * k);
        assert!((l / (e.im / e.norm_sqr()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn longitudinal_peak_at_plasmon() {
        let m = al();
        let wp = m.plasma_frequency_au();
        let b = m.beta_au();
        let w = 1.5 * wp;
        // Root of Re ε(ω,k) by bisection.
        let re = |k: f64| dielectric_nonlocal(w, k, &m).re;
        let (mut lo, mut hi) = (0.0, (w / b) * 0.999_999);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if re(lo) * re(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let k0 = 0.5 * (lo + hi);
        assert!((k0 - (w * w - wp * wp).sqrt() / b).abs() < 1e-3 * k0);
        // Maximum of the longitudinal integrand by dense scan.
        let (mut best, mut kbest) = (0.0, 0.0);
        for i in 1..200_000 {
            let k = k0 * (0.9 + 0.2 * i as f64 / 200_000.0);
            let v = bulk_longitudinal_integrand(k, w, &m);
            if v > best {
                best = v;
                kbest = k;
            }
        }
        // The linewidth in k is about νω/(β²k0).
        let width = m.collision_rate_au() * w / (b * b * k0);
        assert!((kbest - k0).abs() < width);
    }

    #[test]
    fn positive_and_dominated_by_longitudinal_channel() {
        let m = al();
        let quad = QuadratureSpec::default();
        for x in [0.01, 0.05, 0.1] {
            let s = bulk_spectrum(x * m.plasma_frequency_au(), &m, &quad).unwrap();
            assert!(s.total > 0.0 && s.transverse > 0.0);
            assert!(s.longitudinal > s.transverse);
            assert!(s.tail < 1e-2 * s.longitudinal);
        }
    }
}
