use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::states::SubbandStates;

/// Square root with Re ≥ 0 (principal branch).
fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// In-plane integrated Lindhard amplitude of the transition ℓ → ℓ′:
///
/// F = −(1/πQ²){2a + i√(Q²k² − (a − ω − iη)²) − i√(Q²k² − (a + ω + iη)²)},
/// a = Q²/2 − (ε_ℓ − ε_ℓ′), k² = 2(E_F − ε_ℓ).
///
/// Evaluated in the algebraically equivalent form
/// −(ik²/π)[1/(√(Q²k² − X₁²) + iX₁) − 1/(√(Q²k² − X₂²) − iX₂)] with
/// X₁ = a − ω − iη, X₂ = a + ω + iη, which has no cancellation and is exact
/// at Q = 0. Energies in Hartree, Q in 1/Bohr.
pub fn f_coefficient(
    e_l: f64,
    e_lp: f64,
    q: f64,
    omega: f64,
    eta: f64,
    fermi: f64,
) -> Result<Complex64> {
    if !(eta > 0.0) {
        return Err(Error::invalid("broadening must be positive"));
    }
    let k2 = 2.0 * (fermi - e_l);
    if k2 < 0.0 {
        return Err(Error::invalid(format!(
            "subband at {e_l} Ha is not occupied (E_F = {fermi} Ha)"
        )));
    }
    Ok(f_unchecked(k2, q * q / 2.0 - (e_l - e_lp), q, omega, eta))
}

#[inline]
fn f_unchecked(k2: f64, a: f64, q: f64, omega: f64, eta: f64) -> Complex64 {
    if k2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let i = Complex64::i();
    let a2 = q * q * k2;
    let x1 = Complex64::new(a - omega, -eta);
    let x2 = Complex64::new(a + omega, eta);
    let t1 = 1.0 / (principal_sqrt(a2 - x1 * x1) + i * x1);
    let t2 = 1.0 / (principal_sqrt(a2 - x2 * x2) - i * x2);
    -i * (k2 / PI) * (t1 - t2)
}

/// F_{ℓℓ′} for ℓ over occupied and ℓ′ over included subbands.
#[derive(Debug, Clone)]
pub struct FTable {
    pub q: f64,
    pub omega: f64,
    pub eta: f64,
    /// values[(ℓ, ℓ′)].
    pub values: DMatrix<Complex64>,
    /// a_{ℓℓ′}(Q) = Q²/2 − (ε_ℓ − ε_ℓ′).
    pub a: DMatrix<f64>,
    /// k_ℓ = √(2(E_F − ε_ℓ)).
    pub k: Vec<f64>,
}

impl FTable {
    pub fn compute(states: &SubbandStates, q: f64, omega: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(Error::invalid("broadening must be positive"));
        }
        let no = states.n_occupied;
        let ni = states.n_included();
        let e = &states.energies;
        let k: Vec<f64> = e[..no]
            .iter()
            .map(|&x| (2.0 * (states.fermi_level - x)).max(0.0).sqrt())
            .collect();
        let a = DMatrix::from_fn(no, ni, |l, lp| q * q / 2.0 - (e[l] - e[lp]));
        let values = DMatrix::from_fn(no, ni, |l, lp| {
            f_unchecked(k[l] * k[l], a[(l, lp)], q, omega, eta)
        });
        Ok(FTable {
            q,
            omega,
            eta,
            values,
            a,
            k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_with_breaks, QuadratureSpec};

    fn printed(k2: f64, a: f64, q: f64, w: f64, eta: f64) -> Complex64 {
        let i = Complex64::i();
        let x1 = Complex64::new(a - w, -eta);
        let x2 = Complex64::new(a + w, eta);
        -(2.0 * a + i * (q * q * k2 - x1 * x1).sqrt() - i * (q * q * k2 - x2 * x2).sqrt())
            / (PI * q * q)
    }

    #[test]
    fn matches_printed_form_away_from_small_q() {
        for (k2, a, q, w, eta) in [
            (0.8, 0.1, 0.3, 0.05, 1e-3),
            (0.3, -0.2, 1.1, 0.4, 1e-2),
            (1.5, 0.7, 2.0, 0.0, 1e-3),
        ] {
            let f = f_unchecked(k2, a, q, w, eta);
            let p = printed(k2, a, q, w, eta);
            assert!((f - p).norm() < 1e-10 * p.norm(), "{f} vs {p}");
        }
    }

    #[test]
    fn finite_and_continuous_at_zero_q() {
        let (k2, de, w, eta) = (0.7, -0.05, 0.06, 2e-3);
        let f0 = f_unchecked(k2, -de, 0.0, w, eta);
        let x1 = Complex64::new(-de - w, -eta);
        let x2 = Complex64::new(-de + w, eta);
        let limit = -(k2 / (2.0 * PI)) * (1.0 / x1 + 1.0 / x2);
        assert!((f0 - limit).norm() < 1e-14 * limit.norm());
        let q = 1e-6;
        let fq = f_unchecked(k2, q * q / 2.0 - de, q, w, eta);
        assert!((fq - f0).norm() < 1e-8 * f0.norm());
        assert_eq!(f_unchecked(0.0, 0.3, 0.5, w, eta), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn real_at_zero_frequency() {
        for (k2, a, q) in [(0.8, 0.1, 0.3), (0.3, -0.2, 1.1), (1.7, 0.02, 0.05)] {
            let f = f_unchecked(k2, a, q, 0.0, 1e-8);
            assert!(f.im.abs() < 1e-6 * f.re.abs(), "{f}");
        }
    }

    #[test]
    fn absorptive_sign() {
        for w in [0.01, 0.05, 0.3] {
            let f = f_unchecked(0.8, 0.02, 0.3, w, 1e-3);
            assert!(f.im < 0.0);
        }
    }

    /// 2∫_{|k|<k_ℓ} d²k/(2π)² [1/(ω + iη − a − k·Q) − 1/(ω + iη + a + k·Q)].
    fn momentum_oracle(k_l: f64, a: f64, q: f64, w: f64, eta: f64) -> Complex64 {
        let spec = QuadratureSpec::with_tolerance(1e-9);
        let z = Complex64::new(w, eta);
        let angular = |k: f64| -> Complex64 {
            let g = |t: f64| {
                let d = a + k * q * t.cos();
                1.0 / (z - d) - 1.0 / (z + d)
            };
            // Resonant angles where ω = a + kQ cos θ.
            let mut pts = vec![0.0, std::f64::consts::PI];
            for c in [(w - a) / (k * q), (-w - a) / (k * q)] {
                if c.abs() < 1.0 {
                    pts.push(c.acos());
                }
            }
            pts.sort_by(f64::total_cmp);
            2.0 * integrate_with_breaks(g, &pts, &spec).unwrap().value
        };
        let radial = integrate(|k: f64| angular(k) * k, 0.0, k_l, &spec)
            .unwrap()
            .value;
        radial * 2.0 / (4.0 * PI * PI)
    }

    #[test]
    fn agrees_with_momentum_space_sum() {
        let (e1, e2, fermi): (f64, f64, f64) = (0.01, 0.05, 0.43);
        let q = 0.3;
        let k_l = (2.0 * (fermi - e1)).sqrt();
        let a = q * q / 2.0 - (e1 - e2);
        for (w, eta) in [(0.2, 0.02), (0.1, 0.01), (0.3, 0.05)] {
            let f = f_coefficient(e1, e2, q, w, eta, fermi).unwrap();
            let oracle = momentum_oracle(k_l, a, q, w, eta);
            assert!(
                (f - oracle).norm() < 1e-4 * oracle.norm(),
                "{f} vs {oracle}"
            );
        }
    }

    #[test]
    fn rejects_unoccupied_or_undamped() {
        assert!(f_coefficient(0.5, 0.6, 0.1, 0.1, 1e-3, 0.4).is_err());
        assert!(f_coefficient(0.1, 0.6, 0.1, 0.1, 0.0, 0.4).is_err());
    }
}
