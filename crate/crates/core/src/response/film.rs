use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::thermal::bose_factor;

use super::chi::{chi0_from_table, complex_times_real, coulomb_operator, lu_solve, DysonMode};
use super::fcoef::FTable;
use super::g0::{overlap_matrix, wall_overlap};
use super::states::{ResponseGrid, SubbandStates};

/// Numerical controls of the film SPD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmOptions {
    pub mode: DysonMode,
    /// Initial number of logarithmic Q nodes (at least 64).
    pub initial_nodes: usize,
    pub relative_tolerance: f64,
    pub max_evaluations: usize,
    /// Q range in units of the natural scale max(1/2h, k_F).
    pub lower_multiplier: f64,
    pub upper_multiplier: f64,
    /// Evaluate Q nodes on the rayon pool.
    pub parallel: bool,
}

impl Default for FilmOptions {
    fn default() -> Self {
        FilmOptions {
            mode: DysonMode::Full,
            initial_nodes: 65,
            relative_tolerance: 1e-4,
            max_evaluations: 1500,
            lower_multiplier: 1e-4,
            upper_multiplier: 40.0,
            parallel: true,
        }
    }
}

/// Film SPD at one height (Bohr) above the jellium edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilmPoint {
    pub h: f64,
    pub g_zz: f64,
    pub g_xx: f64,
    pub error: f64,
}

/// Contracted responses at one Q for every requested height.
#[derive(Debug, Clone, PartialEq)]
pub struct QSample {
    pub q: f64,
    /// Closed-form zero-order term per height.
    pub g0: Vec<Complex64>,
    /// Screening correction per height (zero in `Zero` mode).
    pub g: Vec<Complex64>,
    /// Relative residual of the Dyson solve (zero unless `Full`).
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FilmSpectrum {
    pub omega: f64,
    pub mode: DysonMode,
    pub points: Vec<FilmPoint>,
    /// Every Q node used, ascending.
    pub samples: Vec<QSample>,
    pub max_residual: f64,
}

/// Evaluates G⁰ and G at lateral wavenumber `q` for observers at the given
/// box coordinates.
pub fn sample_q(
    q: f64,
    omega: f64,
    states: &SubbandStates,
    grid: &ResponseGrid,
    mode: DysonMode,
    observers: &[f64],
) -> Result<QSample> {
    let table = FTable::compute(states, q, omega, grid.eta)?;
    let length = states.box_length;
    let size = states.coefficients.nrows();
    let no = states.n_occupied;
    let ni = states.n_included();
    let wall = wall_overlap(q, length, size);
    let occ = states.coefficients.columns(0, no);
    let wall_o = (occ.transpose() * &wall * &states.coefficients) * (2.0 / length);
    // Exact overlaps O_ℓℓ′ = ∫φ_ℓφ_ℓ′ e^{−Q|z − z_o|} dz per observer.
    let overlaps = observers
        .iter()
        .map(|&zo| {
            if zo <= 0.0 {
                Ok(&wall_o * (q * zo).exp())
            } else {
                let i = overlap_matrix(q, length, size, zo)?;
                Ok((occ.transpose() * i * &states.coefficients) * (2.0 / length))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let g0: Vec<Complex64> = overlaps
        .iter()
        .map(|o| {
            table
                .values
                .iter()
                .zip(o.iter())
                .map(|(f, x)| f * (x * x))
                .sum()
        })
        .collect();
    let nh = observers.len();
    if mode == DysonMode::Zero {
        return Ok(QSample {
            q,
            g0,
            g: vec![Complex64::new(0.0, 0.0); nh],
            residual: 0.0,
        });
    }
    let chi0 = chi0_from_table(&table, states);
    let v = coulomb_operator(grid, q)?;
    let n = grid.len();
    // (χ⁰u)(z_i) = Σ F_ℓℓ′ φ_ℓφ_ℓ′(z_i) O_ℓℓ′, exact in the observer kink.
    let c = DMatrix::from_fn(no * ni, nh, |col, h| {
        let (l, lp) = (col / ni, col % ni);
        table.values[(l, lp)] * overlaps[h][(l, lp)]
    });
    let pairs = states.pairs();
    let b = (pairs * c.map(|x| x.re)).zip_map(&(pairs * c.map(|x| x.im)), Complex64::new);
    let (y, residual) = match mode {
        DysonMode::First => (b.clone(), 0.0),
        _ => {
            let k = complex_times_real(&chi0.data, &v);
            let a = DMatrix::<Complex64>::identity(n, n) - &k;
            let y = lu_solve(&a, &b).ok_or(Error::SingularDyson { q, omega })?;
            let r = &a * &y - &b;
            let norm = |m: &DMatrix<Complex64>| m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let bn = norm(&b);
            let res = if bn > 0.0 { norm(&r) / bn } else { 0.0 };
            if !res.is_finite() {
                return Err(Error::SingularDyson { q, omega });
            }
            (y, res)
        }
    };
    // V is symmetric, so (V Y)ᵀ = Yᵀ V.
    let vy = complex_times_real(&y.transpose(), &v).transpose();
    let g = (0..nh)
        .map(|h| (0..n).map(|i| b[(i, h)] * vy[(i, h)]).sum())
        .collect();
    Ok(QSample { q, g0, g, residual })
}

struct Panel {
    a: f64,
    b: f64,
    fa: Vec<f64>,
    fm: Vec<f64>,
    fb: Vec<f64>,
}

fn simpson(a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64]) -> Vec<f64> {
    let c = (b - a) / 6.0;
    (0..fa.len())
        .map(|h| c * (fa[h] + 4.0 * fm[h] + fb[h]))
        .collect()
}

/// Film SPD g_xx = 2π·bose·∫dQ Q (−Im)[G⁰ + G] and g_zz = 2g_xx at each
/// height in `hs` (Bohr), with the Q integral done adaptively on a
/// logarithmic grid shared by all heights.
pub fn film_spd(
    hs: &[f64],
    omega: f64,
    states: &SubbandStates,
    grid: &ResponseGrid,
    mat_kt: f64,
    options: &FilmOptions,
) -> Result<FilmSpectrum> {
    if hs.is_empty() || hs.iter().any(|h| !(*h >= 0.0) || !h.is_finite()) {
        return Err(Error::invalid("film SPD needs finite non-negative heights"));
    }
    if options.initial_nodes < 64 || !(options.relative_tolerance > 0.0) {
        return Err(Error::invalid(
            "film quadrature needs at least 64 nodes and a positive tolerance",
        ));
    }
    let bose = bose_factor(omega, mat_kt)?;
    let kf = (2.0 * states.fermi_level).max(0.0).sqrt();
    let scale = |h: f64| if h > 0.0 { (0.5 / h).max(kf) } else { kf };
    let s_min = hs.iter().map(|&h| scale(h)).fold(f64::INFINITY, f64::min);
    let s_max = hs.iter().map(|&h| scale(h)).fold(0.0, f64::max);
    let t_lo = (options.lower_multiplier * s_min).ln();
    let t_hi = (options.upper_multiplier * s_max).ln();
    let observers: Vec<f64> = hs.iter().map(|&h| states.observer(h)).collect();
    let nh = hs.len();

    let mut samples: Vec<QSample> = Vec::new();
    let evaluate = |ts: &[f64], samples: &mut Vec<QSample>| -> Result<Vec<Vec<f64>>> {
        let run = |&t: &f64| sample_q(t.exp(), omega, states, grid, options.mode, &observers);
        let out: Vec<Result<QSample>> = if options.parallel {
            ts.par_iter().map(run).collect()
        } else {
            ts.iter().map(run).collect()
        };
        let mut values = Vec::with_capacity(ts.len());
        for s in out {
            let s = s?;
            let q = s.q;
            values.push((0..nh).map(|h| -q * q * (s.g0[h] + s.g[h]).im).collect());
            samples.push(s);
        }
        Ok(values)
    };

    let panels0 = options.initial_nodes.div_ceil(2).max(32);
    let nodes: Vec<f64> = (0..=2 * panels0)
        .map(|j| t_lo + (t_hi - t_lo) * j as f64 / (2 * panels0) as f64)
        .collect();
    let f0 = evaluate(&nodes, &mut samples)?;
    let mut active: Vec<Panel> = (0..panels0)
        .map(|p| Panel {
            a: nodes[2 * p],
            b: nodes[2 * p + 2],
            fa: f0[2 * p].clone(),
            fm: f0[2 * p + 1].clone(),
            fb: f0[2 * p + 2].clone(),
        })
        .collect();
    let lower_tail: Vec<f64> = f0[0].iter().map(|v| 0.5 * v).collect();
    let upper_edge: Vec<f64> = f0[2 * panels0].iter().map(|v| v.abs()).collect();

    let mut accepted = vec![0.0; nh];
    let mut accepted_err = vec![0.0; nh];
    let width = t_hi - t_lo;
    while !active.is_empty() {
        if samples.len() + 2 * active.len() > options.max_evaluations {
            let partial: Vec<f64> = (0..nh)
                .map(|h| {
                    accepted[h]
                        + active
                            .iter()
                            .map(|p| simpson(p.a, p.b, &p.fa, &p.fm, &p.fb)[h])
                            .sum::<f64>()
                })
                .collect();
            let worst = partial.iter().cloned().fold(0.0, f64::max);
            return Err(Error::Quadrature {
                context: format!(
                    "film Q integral exceeded {} evaluations",
                    options.max_evaluations
                ),
                estimate: 2.0 * PI * bose * worst,
                error: f64::NAN,
            });
        }
        let quarter: Vec<f64> = active
            .iter()
            .flat_map(|p| [0.75 * p.a + 0.25 * p.b, 0.25 * p.a + 0.75 * p.b])
            .collect();
        let fq = evaluate(&quarter, &mut samples)?;
        let mut fine = Vec::with_capacity(active.len());
        let mut coarse = Vec::with_capacity(active.len());
        for (i, p) in active.iter().enumerate() {
            let m = 0.5 * (p.a + p.b);
            let left = simpson(p.a, m, &p.fa, &fq[2 * i], &p.fm);
            let right = simpson(m, p.b, &p.fm, &fq[2 * i + 1], &p.fb);
            fine.push((0..nh).map(|h| left[h] + right[h]).collect::<Vec<f64>>());
            coarse.push(simpson(p.a, p.b, &p.fa, &p.fm, &p.fb));
        }
        let total: Vec<f64> = (0..nh)
            .map(|h| accepted[h] + fine.iter().map(|f| f[h]).sum::<f64>())
            .collect();
        let mut next = Vec::new();
        for (i, p) in active.into_iter().enumerate() {
            let frac = (p.b - p.a) / width;
            let ok = (0..nh).all(|h| {
                let err = (fine[i][h] - coarse[i][h]).abs() / 15.0;
                err <= options.relative_tolerance * total[h].abs() * frac || err == 0.0
            });
            if ok {
                for h in 0..nh {
                    let err = (fine[i][h] - coarse[i][h]) / 15.0;
                    accepted[h] += fine[i][h] + err;
                    accepted_err[h] += err.abs();
                }
            } else {
                let m = 0.5 * (p.a + p.b);
                next.push(Panel {
                    a: p.a,
                    b: m,
                    fa: p.fa.clone(),
                    fm: fq[2 * i].clone(),
                    fb: p.fm.clone(),
                });
                next.push(Panel {
                    a: m,
                    b: p.b,
                    fa: p.fm,
                    fm: fq[2 * i + 1].clone(),
                    fb: p.fb,
                });
            }
        }
        active = next;
    }

    samples.sort_by(|a, b| a.q.total_cmp(&b.q));
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let pre = 2.0 * PI * bose;
    let points = (0..nh)
        .map(|h| {
            let g_xx = pre * (accepted[h] + lower_tail[h]);
            FilmPoint {
                h: hs[h],
                g_zz: 2.0 * g_xx,
                g_xx,
                error: 2.0 * pre * (accepted_err[h] + lower_tail[h].abs() + upper_edge[h]),
            }
        })
        .collect();
    Ok(FilmSpectrum {
        omega,
        mode: options.mode,
        points,
        samples,
        max_residual,
    })
}
