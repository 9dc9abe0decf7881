use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::continuum::{bulk_spectrum, hydro_spd_zz_with, local_spd_zz, SpdValue};
use crate::error::{Error, Result};
use crate::jellium::{ibm_solution, scf_solve, ScfSolution};
use crate::material::MaterialParams;
use crate::response::{film_spd, DysonMode, FilmSpectrum, ResponseGrid, SubbandStates};
use crate::thermal::planck_density;
use crate::units::UNITS;

use super::config::{ExperimentConfig, HeightRange};
use super::table::{Model, SpectrumRow, SpectrumTable};

pub const FIG1_HEIGHTS: HeightRange = HeightRange {
    min_nm: 0.01,
    max_nm: 50.0,
    count: 60,
};
pub const FIG2_HEIGHTS: HeightRange = HeightRange {
    min_nm: 0.01,
    max_nm: 50.0,
    count: 40,
};
pub const FIG3_HEIGHTS: HeightRange = HeightRange {
    min_nm: 0.01,
    max_nm: 10.0,
    count: 25,
};
pub const FIG1_OMEGAS: [f64; 1] = [0.1];
pub const FIG2_OMEGAS: [f64; 3] = [0.01, 0.05, 0.1];
pub const FIG3_OMEGAS: [f64; 1] = [0.1];
/// Height of the interface comparison in the bulk/vacuum figure.
pub const INTERFACE_HEIGHT_NM: f64 = 0.01;
/// Height of the large-distance comparison in the film figure.
pub const FAR_HEIGHT_NM: f64 = 10.0;

/// Table, summary and optional diagnostics of one pipeline run.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub name: String,
    pub table: SpectrumTable,
    pub summary: Value,
    pub diagnostics: Option<String>,
}

fn in_context(e: Error, ctx: &str) -> Error {
    match e {
        Error::Quadrature {
            context,
            estimate,
            error,
        } => Error::Quadrature {
            context: format!("{ctx}: {context}"),
            estimate,
            error,
        },
        other => other,
    }
}

fn row(
    model: Model,
    omega: f64,
    h_nm: f64,
    v: SpdValue,
    g_ee: f64,
    norm: Option<f64>,
) -> SpectrumRow {
    let c = norm.unwrap_or(1.0);
    SpectrumRow {
        model,
        omega_rad_per_s: UNITS.hartree_to_rad_per_s(omega),
        h_nm,
        g_zz: v.g_zz / c,
        g_xx: v.g_xx / c,
        g_ee: g_ee / c,
        normalized: norm.is_some(),
        normalization: c,
    }
}

fn fraction(omega: f64, mat: &MaterialParams) -> f64 {
    omega / mat.plasma_frequency_au()
}

/// Hydrodynamic and local SPD above a half-space, normalized by the
/// hydrodynamic g_zz at the jellium edge.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<FigureOutput> {
    let start = Instant::now();
    let mat = cfg.material();
    let quad = cfg.quadrature;
    let ret = cfg.models.retardation();
    let hs = cfg.sweep.heights_nm(FIG1_HEIGHTS)?;
    let ws = cfg.sweep.omegas(&mat, &FIG1_OMEGAS)?;
    let mut table = SpectrumTable::with_provenance(
        "z-component SPD above a half-space, hydrodynamic and local models, normalized by hydrodynamic g_zz(h = 0)",
        &cfg.to_toml()?,
    );
    let mut per_omega = Vec::new();
    for &w in &ws {
        let g0 = hydro_spd_zz_with(0.0, w, &mat, &quad, ret)
            .map_err(|e| in_context(e, "hydro at h = 0"))?;
        if !(g0.g_zz > 0.0) {
            return Err(Error::invalid(
                "hydrodynamic SPD at the edge is not positive; cannot normalize",
            ));
        }
        let computed: Vec<(f64, SpdValue, Option<SpdValue>)> = hs
            .par_iter()
            .map(|&h| {
                let hb = UNITS.nm_to_bohr(h);
                let hydro = hydro_spd_zz_with(hb, w, &mat, &quad, ret)
                    .map_err(|e| in_context(e, &format!("hydro at h = {h} nm")))?;
                let local = if h > 0.0 {
                    Some(local_spd_zz(hb, w, &mat)?)
                } else {
                    None
                };
                Ok((h, hydro, local))
            })
            .collect::<Result<_>>()?;
        for (h, hydro, local) in &computed {
            table.rows.push(row(
                Model::Hydro,
                w,
                *h,
                *hydro,
                2.0 * hydro.g_zz,
                Some(g0.g_zz),
            ));
            if let Some(l) = local {
                table
                    .rows
                    .push(row(Model::Local, w, *h, *l, 2.0 * l.g_zz, Some(g0.g_zz)));
            }
        }
        let (h_first, first, _) = computed[0];
        let far = computed.iter().rev().find(|c| c.2.is_some());
        per_omega.push(json!({
            "omega_fraction": fraction(w, &mat),
            "hydro_g_zz_h0_au": g0.g_zz,
            "first_height_nm": h_first,
            "first_hydro_normalized": first.g_zz / g0.g_zz,
            "largest_height_nm": far.map(|c| c.0),
            "hydro_over_local_at_largest_height": far.map(|c| c.1.g_zz / c.2.unwrap().g_zz),
        }));
    }
    table.sort();
    Ok(FigureOutput {
        name: "fig1".into(),
        table,
        summary: json!({ "frequencies": per_omega, "elapsed_s": start.elapsed().as_secs_f64() }),
        diagnostics: None,
    })
}

/// Field SPD trace inside the bulk metal (reported at h < 0) and in vacuum
/// above the hydrodynamic half-space, both relative to the black-body
/// energy density u_BB(ω).
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<FigureOutput> {
    let start = Instant::now();
    let mat = cfg.material();
    let quad = cfg.quadrature;
    let ret = cfg.models.retardation();
    let hs = cfg.sweep.heights_nm(FIG2_HEIGHTS)?;
    let ws = cfg.sweep.omegas(&mat, &FIG2_OMEGAS)?;
    let kt = mat.thermal_energy_au();
    let mut table = SpectrumTable::with_provenance(
        "SPD trace g_EE / u_BB: bulk metal (reported at h < 0) and vacuum 2 g_zz / u_BB above the half-space (h > 0)",
        &cfg.to_toml()?,
    );
    let mut per_omega = Vec::new();
    for &w in &ws {
        let u = planck_density(w, kt)?;
        if !(u > 0.0) {
            return Err(Error::invalid(
                "black-body density vanishes; the bulk/vacuum figure needs T > 0",
            ));
        }
        let bulk = bulk_spectrum(w, &mat, &quad).map_err(|e| in_context(e, "bulk spectrum"))?;
        let mut heights = hs.clone();
        if !heights.contains(&INTERFACE_HEIGHT_NM) {
            heights.push(INTERFACE_HEIGHT_NM);
        }
        let vacuum: Vec<(f64, SpdValue)> = heights
            .par_iter()
            .map(|&h| {
                hydro_spd_zz_with(UNITS.nm_to_bohr(h), w, &mat, &quad, ret)
                    .map(|v| (h, v))
                    .map_err(|e| in_context(e, &format!("hydro at h = {h} nm")))
            })
            .collect::<Result<_>>()?;
        let third = bulk.total / 3.0;
        for &h in &hs {
            let v = SpdValue {
                g_zz: third,
                g_xx: third,
                error: bulk.error,
            };
            table
                .rows
                .push(row(Model::Bulk, w, -h, v, bulk.total, Some(u)));
        }
        for (h, v) in vacuum.iter().filter(|(h, _)| hs.contains(h)) {
            table
                .rows
                .push(row(Model::Hydro, w, *h, *v, 2.0 * v.g_zz, Some(u)));
        }
        let at = vacuum
            .iter()
            .find(|(h, _)| *h == INTERFACE_HEIGHT_NM)
            .unwrap()
            .1;
        let decreasing = vacuum
            .iter()
            .filter(|(h, _)| hs.contains(h))
            .collect::<Vec<_>>()
            .windows(2)
            .all(|p| p[1].1.g_zz < p[0].1.g_zz);
        per_omega.push(json!({
            "omega_fraction": fraction(w, &mat),
            "u_bb_au": u,
            "bulk_over_u_bb": bulk.total / u,
            "bulk_longitudinal_au": bulk.longitudinal,
            "bulk_transverse_au": bulk.transverse,
            "vacuum_over_u_bb_at_interface": 2.0 * at.g_zz / u,
            "interface_height_nm": INTERFACE_HEIGHT_NM,
            "interface_ratio": 2.0 * at.g_zz / bulk.total,
            "vacuum_decreasing": decreasing,
        }));
    }
    table.sort();
    Ok(FigureOutput {
        name: "fig2".into(),
        table,
        summary: json!({ "frequencies": per_omega, "elapsed_s": start.elapsed().as_secs_f64() }),
        diagnostics: None,
    })
}

/// Self-consistent solution of the configured slab.
pub fn run_scf(cfg: &ExperimentConfig) -> Result<ScfSolution> {
    scf_solve(&cfg.slab_spec(), &cfg.material())
}

/// Converged slab for the film pipelines, loaded or computed.
fn film_solution(cfg: &ExperimentConfig, scf: Option<&ScfSolution>) -> Result<ScfSolution> {
    let sol = match scf {
        Some(s) => {
            if s.material != cfg.material() {
                return Err(Error::Config(
                    "the SCF file was computed for different material parameters than the configuration".into(),
                ));
            }
            s.clone()
        }
        None => run_scf(cfg)?,
    };
    sol.ensure_converged()?;
    Ok(sol)
}

struct FilmSetup {
    grid: ResponseGrid,
    ibm: SubbandStates,
    scf: SubbandStates,
}

fn film_setup(cfg: &ExperimentConfig, sol: &ScfSolution, need_scf: bool) -> Result<FilmSetup> {
    let grid = ResponseGrid::new(sol.box_length, cfg.response.grid_points, cfg.broadening())?;
    let mult = cfg.response.subband_cutoff_fermi_multiple;
    let ibm_sol = ibm_solution(&sol.spec, &sol.material)?;
    let ibm = SubbandStates::from_solution(&ibm_sol, &grid, mult)?;
    let scf = if need_scf {
        SubbandStates::from_solution(sol, &grid, mult)?
    } else {
        ibm.clone()
    };
    Ok(FilmSetup { grid, ibm, scf })
}

#[allow(clippy::too_many_arguments)]
fn film_run(
    cfg: &ExperimentConfig,
    states: &SubbandStates,
    grid: &ResponseGrid,
    mode: DysonMode,
    hs_nm: &[f64],
    w: f64,
    kt: f64,
    label: &str,
) -> Result<FilmSpectrum> {
    let hb: Vec<f64> = hs_nm.iter().map(|&h| UNITS.nm_to_bohr(h)).collect();
    film_spd(&hb, w, states, grid, kt, &cfg.film_options(mode)).map_err(|e| in_context(e, label))
}

fn diagnostics_rows(out: &mut String, model: Model, w: f64, hs_nm: &[f64], spec: &FilmSpectrum) {
    for s in &spec.samples {
        for (i, h) in hs_nm.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                model.tag(),
                UNITS.hartree_to_rad_per_s(w),
                s.q,
                h,
                s.g0[i].re,
                s.g0[i].im,
                s.g[i].re,
                s.g[i].im,
                s.residual
            );
        }
    }
}

const DIAGNOSTICS_HEADER: &str =
    "model,omega_rad_per_s,q_per_bohr,h_nm,g0_re,g0_im,g_re,g_im,residual\n";

/// Film SPD with box states (zero-order response) and with the
/// self-consistent states (screened response), plus the local baseline,
/// normalized by the screened g_zz at the jellium edge.
pub fn run_fig3(cfg: &ExperimentConfig, scf: Option<&ScfSolution>) -> Result<FigureOutput> {
    let start = Instant::now();
    let sol = film_solution(cfg, scf)?;
    let mat = sol.material;
    let kt = mat.thermal_energy_au();
    let setup = film_setup(cfg, &sol, true)?;
    let mut hs = cfg.sweep.heights_nm(FIG3_HEIGHTS)?;
    hs.push(0.0);
    hs.push(FAR_HEIGHT_NM);
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    let ws = cfg.sweep.omegas(&mat, &FIG3_OMEGAS)?;
    let rpa_mode = cfg.models.film_rpa_mode;
    let mut table = SpectrumTable::with_provenance(
        "z-component SPD above a jellium film: box states (film-ibm), self-consistent RPA (film-rpa) and local baseline, normalized by film-rpa g_zz(h = 0)",
        &cfg.to_toml()?,
    );
    let mut diag = cfg
        .output
        .diagnostics
        .then(|| DIAGNOSTICS_HEADER.to_string());
    let mut per_omega = Vec::new();
    for &w in &ws {
        let ibm = film_run(
            cfg,
            &setup.ibm,
            &setup.grid,
            DysonMode::Zero,
            &hs,
            w,
            kt,
            "film-ibm",
        )?;
        let rpa = film_run(
            cfg,
            &setup.scf,
            &setup.grid,
            rpa_mode,
            &hs,
            w,
            kt,
            "film-rpa",
        )?;
        let norm = rpa.points[0].g_zz;
        if !(norm > 0.0) {
            return Err(Error::invalid(
                "film SPD at the edge is not positive; cannot normalize",
            ));
        }
        let mut far = (f64::NAN, f64::NAN, f64::NAN);
        let mut ibm_above = true;
        for (i, &h) in hs.iter().enumerate() {
            let (pi, pr) = (ibm.points[i], rpa.points[i]);
            let vi = SpdValue {
                g_zz: pi.g_zz,
                g_xx: pi.g_xx,
                error: pi.error,
            };
            let vr = SpdValue {
                g_zz: pr.g_zz,
                g_xx: pr.g_xx,
                error: pr.error,
            };
            table
                .rows
                .push(row(Model::FilmIbm, w, h, vi, 2.0 * vi.g_zz, Some(norm)));
            table
                .rows
                .push(row(Model::FilmRpa, w, h, vr, 2.0 * vr.g_zz, Some(norm)));
            if h <= 1.0 {
                ibm_above &= pi.g_zz > pr.g_zz;
            }
            if h > 0.0 {
                let l = local_spd_zz(UNITS.nm_to_bohr(h), w, &mat)?;
                table
                    .rows
                    .push(row(Model::Local, w, h, l, 2.0 * l.g_zz, Some(norm)));
                if h == FAR_HEIGHT_NM {
                    far = (pi.g_zz / l.g_zz, pr.g_zz / l.g_zz, l.g_zz);
                }
            }
        }
        if let Some(d) = diag.as_mut() {
            diagnostics_rows(d, Model::FilmIbm, w, &hs, &ibm);
            diagnostics_rows(d, Model::FilmRpa, w, &hs, &rpa);
        }
        per_omega.push(json!({
            "omega_fraction": fraction(w, &mat),
            "film_rpa_g_zz_h0_au": norm,
            "film_ibm_g_zz_h0_au": ibm.points[0].g_zz,
            "ibm_above_rpa_up_to_1nm": ibm_above,
            "far_height_nm": FAR_HEIGHT_NM,
            "ibm_over_local_far": far.0,
            "rpa_over_local_far": far.1,
            "rpa_closer_to_local_far": (far.1 - 1.0).abs() < (far.0 - 1.0).abs(),
            "max_dyson_residual": rpa.max_residual,
            "q_evaluations": { "film-ibm": ibm.samples.len(), "film-rpa": rpa.samples.len() },
        }));
    }
    table.sort();
    Ok(FigureOutput {
        name: "fig3".into(),
        table,
        summary: json!({
            "scf": {
                "chemical_potential_ev": UNITS.hartree_to_ev(sol.chemical_potential),
                "occupied_subbands": sol.occupied_count(),
                "iterations": sol.iterations,
                "neutrality_residual": sol.neutrality_residual,
            },
            "rpa_mode": rpa_mode,
            "frequencies": per_omega,
            "elapsed_s": start.elapsed().as_secs_f64(),
        }),
        diagnostics: diag,
    })
}

/// Unnormalized SPD of one model over the configured sweep. Bulk rows are
/// reported at −h.
pub fn run_spd(
    cfg: &ExperimentConfig,
    model: Model,
    scf: Option<&ScfSolution>,
) -> Result<FigureOutput> {
    let start = Instant::now();
    let mat = cfg.material();
    let quad = cfg.quadrature;
    let ret = cfg.models.retardation();
    let hs = cfg.sweep.heights_nm(FIG1_HEIGHTS)?;
    let ws = cfg.sweep.omegas(&mat, &FIG1_OMEGAS)?;
    let mut table = SpectrumTable::with_provenance(
        &format!("{} SPD in atomic units", model.tag()),
        &cfg.to_toml()?,
    );
    let kt = mat.thermal_energy_au();
    let mut diag = cfg
        .output
        .diagnostics
        .then(|| DIAGNOSTICS_HEADER.to_string());
    match model {
        Model::Local | Model::Hydro => {
            for &w in &ws {
                let vals: Vec<(f64, SpdValue)> = hs
                    .par_iter()
                    .map(|&h| {
                        let hb = UNITS.nm_to_bohr(h);
                        let v = if model == Model::Local {
                            local_spd_zz(hb, w, &mat)
                        } else {
                            hydro_spd_zz_with(hb, w, &mat, &quad, ret)
                        };
                        v.map(|v| (h, v))
                            .map_err(|e| in_context(e, &format!("h = {h} nm")))
                    })
                    .collect::<Result<_>>()?;
                for (h, v) in vals {
                    table.rows.push(row(model, w, h, v, 2.0 * v.g_zz, None));
                }
            }
        }
        Model::Bulk => {
            for &w in &ws {
                let b = bulk_spectrum(w, &mat, &quad)?;
                for &h in &hs {
                    let v = SpdValue {
                        g_zz: b.total / 3.0,
                        g_xx: b.total / 3.0,
                        error: b.error,
                    };
                    table.rows.push(row(model, w, -h, v, b.total, None));
                }
            }
        }
        Model::FilmIbm | Model::FilmRpa => {
            let sol = if model == Model::FilmRpa {
                film_solution(cfg, scf)?
            } else {
                match scf {
                    Some(s) => s.clone(),
                    None => ibm_solution(&cfg.slab_spec(), &mat)?,
                }
            };
            let setup = film_setup(cfg, &sol, model == Model::FilmRpa)?;
            let (states, mode) = if model == Model::FilmRpa {
                (&setup.scf, cfg.models.film_rpa_mode)
            } else {
                (&setup.ibm, DysonMode::Zero)
            };
            for &w in &ws {
                let f = film_run(cfg, states, &setup.grid, mode, &hs, w, kt, model.tag())?;
                for p in &f.points {
                    let v = SpdValue {
                        g_zz: p.g_zz,
                        g_xx: p.g_xx,
                        error: p.error,
                    };
                    table
                        .rows
                        .push(row(model, w, UNITS.bohr_to_nm(p.h), v, 2.0 * p.g_zz, None));
                }
                if let Some(d) = diag.as_mut() {
                    diagnostics_rows(d, model, w, &hs, &f);
                }
            }
        }
    }
    table.sort();
    let summary = json!({ "rows": table.rows.len(), "elapsed_s": start.elapsed().as_secs_f64() });
    Ok(FigureOutput {
        name: format!("spd-{}", model.tag()),
        table,
        summary,
        diagnostics: diag,
    })
}

/// Writes `<name>.csv`, the optional `<name>_diagnostics.csv`, and merges
/// the summary into `summary.json` under `<name>`.
pub fn write_figure(dir: &Path, out: &FigureOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let csv = dir.join(format!("{}.csv", out.name));
    out.table.save(&csv)?;
    written.push(csv);
    if let Some(d) = &out.diagnostics {
        let p = dir.join(format!("{}_diagnostics.csv", out.name));
        fs::write(&p, d).map_err(|e| Error::io(&p, e))?;
        written.push(p);
    }
    let summary_path = dir.join("summary.json");
    let mut all = match fs::read_to_string(&summary_path) {
        Ok(text) => match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(m)) => m,
            _ => {
                return Err(Error::Format {
                    path: summary_path,
                    reason: "existing summary is not a JSON object".into(),
                })
            }
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Map::new(),
        Err(e) => return Err(Error::io(&summary_path, e)),
    };
    all.insert(out.name.clone(), out.summary.clone());
    let mut text = serde_json::to_string_pretty(&Value::Object(all))
        .map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    fs::write(&summary_path, text).map_err(|e| Error::io(&summary_path, e))?;
    written.push(summary_path);
    Ok(written)
}
