use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::fcoef::FTable;
use super::states::{ResponseGrid, SubbandStates};

/// Independent-particle response χ⁰(z_i, z_j; Q, ω) on the response grid.
#[derive(Debug, Clone)]
pub struct Chi0Matrix {
    pub data: DMatrix<Complex64>,
    pub q: f64,
    pub omega: f64,
    pub eta: f64,
    pub n_occupied: usize,
    pub n_included: usize,
}

/// Screened response χ with the residual of its integral equation.
#[derive(Debug, Clone)]
pub struct ChiMatrix {
    pub data: DMatrix<Complex64>,
    pub mode: DysonMode,
    /// ‖χ − χ⁰ − χ⁰V̂χ‖_F / ‖χ⁰‖_F.
    pub residual: f64,
}

/// Level of Coulomb screening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DysonMode {
    /// χ = χ⁰.
    Zero,
    /// χ = χ⁰ + χ⁰V̂χ⁰.
    First,
    /// Full solution of (I − χ⁰V̂)χ = χ⁰.
    Full,
}

/// Σ_{ℓℓ′} F_{ℓℓ′} (φ_ℓφ_ℓ′)(φ_ℓφ_ℓ′)ᵀ via two real matrix products.
pub fn chi0_matrix(
    q: f64,
    omega: f64,
    states: &SubbandStates,
    grid: &ResponseGrid,
) -> Result<Chi0Matrix> {
    if states.phi.nrows() != grid.len() {
        return Err(Error::invalid(
            "subband states were tabulated on a different grid",
        ));
    }
    let table = FTable::compute(states, q, omega, grid.eta)?;
    Ok(chi0_from_table(&table, states))
}

pub(crate) fn chi0_from_table(table: &FTable, states: &SubbandStates) -> Chi0Matrix {
    let p = states.pairs();
    let ni = states.n_included();
    let mut pr = p.clone();
    let mut pi = p.clone();
    for l in 0..states.n_occupied {
        for lp in 0..ni {
            let col = l * ni + lp;
            let f = table.values[(l, lp)];
            pr.column_mut(col).scale_mut(f.re);
            pi.column_mut(col).scale_mut(f.im);
        }
    }
    let pt = p.transpose();
    let re = pr * &pt;
    let im = pi * &pt;
    let n = p.nrows();
    let data = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        Complex64::new(re[(a, b)], im[(a, b)])
    });
    Chi0Matrix {
        data,
        q: table.q,
        omega: table.omega,
        eta: table.eta,
        n_occupied: states.n_occupied,
        n_included: ni,
    }
}

/// χ⁰ at arbitrary (z1, z2) from the sine expansions of the subbands.
pub fn chi0_at(
    z1: f64,
    z2: f64,
    q: f64,
    omega: f64,
    eta: f64,
    states: &SubbandStates,
) -> Result<Complex64> {
    let table = FTable::compute(states, q, omega, eta)?;
    let ni = states.n_included();
    let p1: Vec<f64> = (0..ni).map(|l| states.wavefunction_at(l, z1)).collect();
    let p2: Vec<f64> = (0..ni).map(|l| states.wavefunction_at(l, z2)).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..states.n_occupied {
        for lp in 0..ni {
            sum += table.values[(l, lp)] * (p1[l] * p1[lp] * p2[l] * p2[lp]);
        }
    }
    Ok(sum)
}

/// Two-dimensional Fourier transform of the Coulomb interaction,
/// 2π e^{−Q|z1 − z2|}/Q.
pub fn coulomb_kernel(z1: f64, z2: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!(
            "Coulomb kernel needs Q > 0, got {q}"
        )));
    }
    Ok(2.0 * PI * (-q * (z1 - z2).abs()).exp() / q)
}

/// Nyström operator V̂ = W V W.
pub fn coulomb_operator(grid: &ResponseGrid, q: f64) -> Result<DMatrix<f64>> {
    if !(q > 0.0) {
        return Err(Error::invalid(format!(
            "Coulomb kernel needs Q > 0, got {q}"
        )));
    }
    let z = grid.z();
    let w = grid.weights();
    let n = z.len();
    let c = 2.0 * PI / q;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        w[i] * w[j] * c * (-q * (z[i] - z[j]).abs()).exp()
    }))
}

/// Product of a complex and a real matrix through two real products.
pub(crate) fn complex_times_real(a: &DMatrix<Complex64>, b: &DMatrix<f64>) -> DMatrix<Complex64> {
    let re = a.map(|x| x.re) * b;
    let im = a.map(|x| x.im) * b;
    re.zip_map(&im, Complex64::new)
}

pub(crate) fn complex_times_complex(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let (ar, ai) = (a.map(|x| x.re), a.map(|x| x.im));
    let (br, bi) = (b.map(|x| x.re), b.map(|x| x.im));
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    re.zip_map(&im, Complex64::new)
}

/// Solves A X = B by LU with partial pivoting; `None` if the result is not
/// finite.
pub(crate) fn lu_solve(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
) -> Option<DMatrix<Complex64>> {
    use faer::linalg::solvers::Solve;
    let fa = faer::Mat::<Complex64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let fb = faer::Mat::<Complex64>::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)]);
    let x = fa.partial_piv_lu().solve(&fb);
    let out = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| x[(i, j)]);
    out.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(out)
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves χ = χ⁰ + χ⁰V̂χ at the level requested by `mode`.
pub fn dyson_solve(chi0: &Chi0Matrix, grid: &ResponseGrid, mode: DysonMode) -> Result<ChiMatrix> {
    let v = coulomb_operator(grid, chi0.q)?;
    dyson_solve_with(chi0, &v, mode)
}

pub(crate) fn dyson_solve_with(
    chi0: &Chi0Matrix,
    v: &DMatrix<f64>,
    mode: DysonMode,
) -> Result<ChiMatrix> {
    let x0 = &chi0.data;
    let n = x0.nrows();
    let k = complex_times_real(x0, v);
    let data = match mode {
        DysonMode::Zero => x0.clone(),
        DysonMode::First => x0 + complex_times_complex(&k, x0),
        DysonMode::Full => {
            let a = DMatrix::<Complex64>::identity(n, n) - &k;
            lu_solve(&a, x0).ok_or(Error::SingularDyson {
                q: chi0.q,
                omega: chi0.omega,
            })?
        }
    };
    let r = &data - x0 - complex_times_complex(&k, &data);
    // For the truncated modes this is the size of the neglected terms.
    let residual = frobenius(&r) / frobenius(x0);
    Ok(ChiMatrix {
        data,
        mode,
        residual,
    })
}

/// G = uᵀχ⁰V̂χu with u_i = w_i e^{−Q z_i} (observer at the box wall).
pub fn g_interaction(chi0: &Chi0Matrix, chi: &ChiMatrix, grid: &ResponseGrid) -> Result<Complex64> {
    g_interaction_at(chi0, chi, grid, 0.0)
}

/// As [`g_interaction`] with u_i = w_i e^{−Q|z_i − z_o|} for an observer at
/// box coordinate `observer`.
pub fn g_interaction_at(
    chi0: &Chi0Matrix,
    chi: &ChiMatrix,
    grid: &ResponseGrid,
    observer: f64,
) -> Result<Complex64> {
    let q = chi0.q;
    let v = coulomb_operator(grid, q)?;
    let u = DVector::from_iterator(
        grid.len(),
        grid.z()
            .iter()
            .zip(grid.weights())
            .map(|(z, w)| Complex64::new(w * (-q * (z - observer).abs()).exp(), 0.0)),
    );
    let y = &chi.data * &u;
    let vy = complex_times_real(&DMatrix::from_column_slice(1, y.len(), y.as_slice()), &v);
    let left = chi0.data.transpose() * &u;
    Ok((0..y.len()).map(|i| left[i] * vy[(0, i)]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::fixture::small;

    #[test]
    fn chi0_is_symmetric_and_matches_pointwise_sum() {
        let (st, grid, mat) = small(true, 61);
        let w = 0.1 * mat.plasma_frequency_au();
        let x = chi0_matrix(0.2, w, &st, &grid).unwrap();
        assert_eq!(x.data, x.data.transpose());
        let z = grid.z();
        for (i, j) in [(10, 20), (30, 31), (5, 55)] {
            let p = chi0_at(z[i], z[j], 0.2, w, grid.eta, &st).unwrap();
            assert!(
                (p - x.data[(i, j)]).norm() < 1e-10 * p.norm().max(1e-12),
                "{p} {}",
                x.data[(i, j)]
            );
        }
        assert!(x.data.iter().any(|v| v.im != 0.0));
    }

    #[test]
    fn chi0_real_at_zero_frequency() {
        let (st, _, _) = small(false, 41);
        let grid = ResponseGrid::new(st.box_length, 41, 1e-8).unwrap();
        let x = chi0_matrix(0.3, 0.0, &st, &grid).unwrap();
        let re = x.data.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let im = x.data.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(im < 1e-6 * re, "{im} vs {re}");
    }

    #[test]
    fn coulomb_kernel_properties() {
        assert!(coulomb_kernel(1.0, 2.0, 0.0).is_err());
        let a = coulomb_kernel(1.0, 3.0, 0.5).unwrap();
        assert_eq!(a, coulomb_kernel(3.0, 1.0, 0.5).unwrap());
        assert!((a - 2.0 * PI * (-1.0f64).exp() / 0.5).abs() < 1e-15);
        let (_, grid, _) = small(false, 21);
        let v = coulomb_operator(&grid, 0.4).unwrap();
        assert_eq!(v, v.transpose());
        assert!(v.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn dyson_modes() {
        let (st, grid, mat) = small(true, 41);
        let x0 = chi0_matrix(0.15, 0.1 * mat.plasma_frequency_au(), &st, &grid).unwrap();
        let zero = dyson_solve(&x0, &grid, DysonMode::Zero).unwrap();
        assert_eq!(zero.data, x0.data);
        let v = coulomb_operator(&grid, 0.15).unwrap();
        let first = dyson_solve(&x0, &grid, DysonMode::First).unwrap();
        let explicit = &x0.data + &x0.data * v.map(|x| Complex64::new(x, 0.0)) * &x0.data;
        assert!(frobenius(&(&first.data - &explicit)) < 1e-12 * frobenius(&explicit));
        let full = dyson_solve(&x0, &grid, DysonMode::Full).unwrap();
        assert!(full.residual < 1e-10, "{}", full.residual);
        // Screening reduces the response.
        assert!(frobenius(&full.data) < frobenius(&x0.data));
    }

    #[test]
    fn contraction_matches_four_fold_loop() {
        let (st, grid, mat) = small(true, 24);
        let q = 0.12;
        let x0 = chi0_matrix(q, 0.1 * mat.plasma_frequency_au(), &st, &grid).unwrap();
        let chi = dyson_solve(&x0, &grid, DysonMode::Full).unwrap();
        let (z, w) = (grid.z(), grid.weights());
        let zo = st.observer(3.0);
        let n = z.len();
        let mut brute = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let u1 = (-q * (z[i] - zo).abs()).exp();
                        let u4 = (-q * (z[l] - zo).abs()).exp();
                        let v = coulomb_kernel(z[j], z[k], q).unwrap();
                        brute += w[i]
                            * w[j]
                            * w[k]
                            * w[l]
                            * u1
                            * x0.data[(i, j)]
                            * v
                            * chi.data[(k, l)]
                            * u4;
                    }
                }
            }
        }
        let g = g_interaction_at(&x0, &chi, &grid, zo).unwrap();
        assert!((g - brute).norm() < 1e-10 * brute.norm(), "{g} vs {brute}");
    }
}
