use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::fcoef::FTable;
use super::states::SubbandStates;

/// Wavefunctions used in the closed-form zero-order term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Sine coefficients of the given states.
    SelfConsistent,
    /// Pure box states, b_s^(ℓ) = δ_ℓs.
    Ibm,
}

/// ∫₀^L e^{−Qz} sin(sπz/L) sin(s′πz/L) dz for s, s′ = 1..size:
/// 2π²QL²ss′[1 − (−1)^{s+s′}e^{−QL}] / D_ss′ with
/// D_ss′ = π⁴(s² − s′²)² + 2π²Q²L²(s² + s′²) + Q⁴L⁴.
pub fn wall_overlap(q: f64, length: f64, size: usize) -> DMatrix<f64> {
    let ql = q * length;
    let decay_even = -(-ql).exp_m1();
    let decay_odd = 1.0 + (-ql).exp();
    DMatrix::from_fn(size, size, |i, j| {
        let (s, t) = ((i + 1) as f64, (j + 1) as f64);
        if q == 0.0 {
            return if i == j { 0.5 * length } else { 0.0 };
        }
        let bracket = if (i + j) % 2 == 0 {
            decay_even
        } else {
            decay_odd
        };
        let num = 2.0 * PI * PI * q * length * length * s * t * bracket;
        let den = PI.powi(4) * (s * s - t * t).powi(2)
            + 2.0 * PI * PI * ql * ql * (s * s + t * t)
            + ql.powi(4);
        num / den
    })
}

/// ∫₀^T e^{−Qt}cos(kt) dt and ∫₀^T e^{−Qt}sin(kt) dt.
fn damped_trig(q: f64, k: f64, t: f64) -> (f64, f64) {
    let den = q * q + k * k;
    if den == 0.0 {
        return (t, 0.0);
    }
    let e = (-q * t).exp();
    let (s, c) = (k * t).sin_cos();
    (
        (q - e * (q * c - k * s)) / den,
        (k - e * (q * s + k * c)) / den,
    )
}

/// ∫₀^L e^{−Q|z − z_o|} cos(mπz/L) dz for 0 ≤ z_o ≤ L.
fn cosine_moment(q: f64, m: usize, length: f64, zo: f64) -> f64 {
    let k = m as f64 * PI / length;
    let (s0, c0) = (k * zo).sin_cos();
    let (lc, ls) = damped_trig(q, k, zo);
    let (rc, rs) = damped_trig(q, k, length - zo);
    c0 * (lc + rc) + s0 * (ls - rs)
}

/// ∫₀^L e^{−Q|z − z_o|} sin(sπz/L) sin(s′πz/L) dz for an observer at box
/// coordinate z_o ≤ L.
pub fn overlap_matrix(q: f64, length: f64, size: usize, observer: f64) -> Result<DMatrix<f64>> {
    if observer > length {
        return Err(Error::invalid("observer must not lie beyond the far wall"));
    }
    if observer <= 0.0 {
        return Ok(wall_overlap(q, length, size) * (q * observer).exp());
    }
    let moments: Vec<f64> = (0..=2 * size)
        .map(|m| cosine_moment(q, m, length, observer))
        .collect();
    Ok(DMatrix::from_fn(size, size, |i, j| {
        let (s, t) = (i + 1, j + 1);
        0.5 * (moments[s.abs_diff(t)] - moments[s + t])
    }))
}

/// Σ F_{ℓℓ′} O_{ℓℓ′}² with O = (2/L) Bᵀ I B.
pub fn g0_overlap_sum(
    table: &FTable,
    coefficients: &DMatrix<f64>,
    overlap: &DMatrix<f64>,
    length: f64,
) -> Complex64 {
    let no = table.values.nrows();
    let bo = coefficients.columns(0, no);
    let o = (bo.transpose() * overlap * coefficients) * (2.0 / length);
    table
        .values
        .iter()
        .zip(o.iter())
        .map(|(f, x)| f * (x * x))
        .sum()
}

/// Box-state limit: O_{ℓℓ′} = (2/L)·N_{ℓℓ′}/D_{ℓℓ′} with the sums
/// collapsed.
pub fn g0_box_states(table: &FTable, length: f64) -> Complex64 {
    let q = table.q;
    let ql = q * length;
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..table.values.nrows() {
        for lp in 0..table.values.ncols() {
            let (s, t) = ((l + 1) as f64, (lp + 1) as f64);
            let bracket = 1.0 - if (l + lp) % 2 == 0 { 1.0 } else { -1.0 } * (-ql).exp();
            let n = 2.0 * PI * PI * q * length * length * s * t * bracket;
            let d = PI.powi(4) * (s * s - t * t).powi(2)
                + 2.0 * PI * PI * ql * ql * (s * s + t * t)
                + ql.powi(4);
            let o = 2.0 / length * n / d;
            sum += table.values[(l, lp)] * (o * o);
        }
    }
    sum
}

/// Closed-form G⁰(Q, ω) referred to the box wall.
pub fn g0_closed(
    q: f64,
    omega: f64,
    eta: f64,
    states: &SubbandStates,
    flavor: Flavor,
) -> Result<Complex64> {
    if !(q > 0.0) {
        return Err(Error::invalid("G0 needs Q > 0"));
    }
    let table = FTable::compute(states, q, omega, eta)?;
    Ok(match flavor {
        Flavor::Ibm => g0_box_states(&table, states.box_length),
        Flavor::SelfConsistent => {
            let i = wall_overlap(q, states.box_length, states.coefficients.nrows());
            g0_overlap_sum(&table, &states.coefficients, &i, states.box_length)
        }
    })
}

/// G⁰ for an observer at box coordinate `observer`.
pub fn g0_observed(table: &FTable, states: &SubbandStates, observer: f64) -> Result<Complex64> {
    let i = overlap_matrix(
        table.q,
        states.box_length,
        states.coefficients.nrows(),
        observer,
    )?;
    Ok(g0_overlap_sum(
        table,
        &states.coefficients,
        &i,
        states.box_length,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureSpec};

    #[test]
    fn denominator_factorises() {
        let mut state = 7u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let s = 1.0 + (rnd() * 60.0).floor();
            let t = 1.0 + (rnd() * 60.0).floor();
            let ql = 10f64.powf(4.0 * rnd() - 2.0);
            let d = PI.powi(4) * (s * s - t * t).powi(2)
                + 2.0 * PI * PI * ql * ql * (s * s + t * t)
                + ql.powi(4);
            let f = (ql * ql + PI * PI * (s + t).powi(2)) * (ql * ql + PI * PI * (s - t).powi(2));
            assert!((d - f).abs() < 1e-12 * f);
        }
    }

    #[test]
    fn overlaps_match_quadrature() {
        let spec = QuadratureSpec::with_tolerance(1e-12);
        let l = 7.5;
        for &(q, zo) in &[(0.3, 0.0), (2.0, -0.4), (0.7, 1.3), (5.0, 3.0), (1e-5, 2.0)] {
            let m = overlap_matrix(q, l, 6, zo).unwrap();
            for (s, t) in [(1usize, 1usize), (2, 5), (6, 6), (3, 4)] {
                let f = |z: f64| {
                    (-q * (z - zo).abs()).exp()
                        * (s as f64 * PI * z / l).sin()
                        * (t as f64 * PI * z / l).sin()
                };
                let r = if zo > 0.0 {
                    integrate(f, 0.0, zo, &spec).unwrap().value
                        + integrate(f, zo, l, &spec).unwrap().value
                } else {
                    integrate(f, 0.0, l, &spec).unwrap().value
                };
                assert!(
                    (m[(s - 1, t - 1)] - r).abs() < 1e-11,
                    "q {q} zo {zo} ({s},{t}): {} vs {r}",
                    m[(s - 1, t - 1)]
                );
            }
        }
    }

    #[test]
    fn interior_formula_continuous_at_wall() {
        let a = overlap_matrix(0.8, 10.0, 8, 0.0).unwrap();
        let b = overlap_matrix(0.8, 10.0, 8, 1e-12).unwrap();
        assert!((a - b).amax() < 1e-10);
    }
}
