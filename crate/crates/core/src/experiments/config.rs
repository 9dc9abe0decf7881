//! TOML experiment configuration. Every dimensional key names its unit.
//!
//! ```toml
//! [material]
//! plasma_frequency_rad_per_s = 2.3e16
//! collision_rate_per_s = 1.3e14
//! fermi_velocity_cm_per_s = 2.03e8
//! wigner_seitz_radius_bohr = 2.07
//! temperature_k = 300.0
//!
//! [slab]
//! thickness_nm = 4.0
//! basis_size = 80
//! grid_points = 401
//! mixing = "pulay"
//! mixing_alpha = 0.2
//!
//! [sweep]
//! h_min_nm = 0.01
//! h_max_nm = 50.0
//! h_count = 60
//! omega_fractions = [0.1]
//!
//! [output]
//! directory = "out"
//! ```
//!
//! Omitted blocks and keys take the defaults shown by
//! [`ExperimentConfig::default`].

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::continuum::Retardation;
use crate::error::{Error, Result};
use crate::jellium::{Mixing, SlabSpec};
use crate::material::{derive_material, MaterialParams};
use crate::quadrature::QuadratureSpec;
use crate::response::{DysonMode, FilmOptions};
use crate::units::UNITS;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub material: MaterialBlock,
    pub slab: SlabBlock,
    pub sweep: SweepBlock,
    pub models: ModelBlock,
    pub response: ResponseBlock,
    pub quadrature: QuadratureSpec,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialBlock {
    pub plasma_frequency_rad_per_s: f64,
    pub collision_rate_per_s: f64,
    pub fermi_velocity_cm_per_s: f64,
    pub wigner_seitz_radius_bohr: f64,
    pub temperature_k: f64,
}

impl Default for MaterialBlock {
    fn default() -> Self {
        let m = MaterialParams::aluminum();
        MaterialBlock {
            plasma_frequency_rad_per_s: m.plasma_frequency,
            collision_rate_per_s: m.collision_rate,
            fermi_velocity_cm_per_s: m.fermi_velocity,
            wigner_seitz_radius_bohr: m.wigner_seitz_radius,
            temperature_k: m.temperature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingScheme {
    Linear,
    Pulay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlabBlock {
    pub thickness_nm: f64,
    /// Vacuum margin between each jellium edge and the box wall; defaults
    /// to 3π/(8k_F).
    pub box_extension_bohr: Option<f64>,
    pub basis_size: usize,
    pub grid_points: usize,
    pub mixing: MixingScheme,
    pub mixing_alpha: f64,
    pub pulay_history: usize,
    pub kerker_wavenumber_per_bohr: f64,
    pub density_tolerance_per_bohr3: f64,
    pub max_iterations: usize,
}

impl Default for SlabBlock {
    fn default() -> Self {
        SlabBlock {
            thickness_nm: 4.0,
            box_extension_bohr: None,
            basis_size: 80,
            grid_points: 401,
            mixing: MixingScheme::Pulay,
            mixing_alpha: 0.2,
            pulay_history: 8,
            kerker_wavenumber_per_bohr: 1.0,
            density_tolerance_per_bohr3: 1e-8,
            max_iterations: 500,
        }
    }
}

/// Heights and frequencies. Unset entries fall back to the defaults of the
/// pipeline being run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    pub h_nm: Option<Vec<f64>>,
    pub h_min_nm: Option<f64>,
    pub h_max_nm: Option<f64>,
    pub h_count: Option<usize>,
    pub omega_fractions: Option<Vec<f64>>,
    pub omega_rad_per_s: Option<Vec<f64>>,
}

/// Log-spaced heights from `min` to `max` nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightRange {
    pub min_nm: f64,
    pub max_nm: f64,
    pub count: usize,
}

impl HeightRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min_nm];
        }
        let (a, b) = (self.min_nm.ln(), self.max_nm.ln());
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    self.min_nm
                } else if i + 1 == self.count {
                    self.max_nm
                } else {
                    (a + (b - a) * i as f64 / (self.count - 1) as f64).exp()
                }
            })
            .collect()
    }
}

impl SweepBlock {
    /// Heights in nm, ascending.
    pub fn heights_nm(&self, default: HeightRange) -> Result<Vec<f64>> {
        let range_keys =
            self.h_min_nm.is_some() || self.h_max_nm.is_some() || self.h_count.is_some();
        let mut hs = match &self.h_nm {
            Some(list) => {
                if range_keys {
                    return Err(Error::Config(
                        "give either sweep.h_nm or the h_min/h_max/h_count range".into(),
                    ));
                }
                list.clone()
            }
            None => {
                let r = HeightRange {
                    min_nm: self.h_min_nm.unwrap_or(default.min_nm),
                    max_nm: self.h_max_nm.unwrap_or(default.max_nm),
                    count: self.h_count.unwrap_or(default.count),
                };
                if !(r.min_nm > 0.0 && r.max_nm >= r.min_nm) || r.count == 0 {
                    return Err(Error::Config(format!(
                        "height range needs 0 < h_min_nm <= h_max_nm and h_count >= 1, got {r:?}"
                    )));
                }
                r.values()
            }
        };
        if hs.is_empty() || hs.iter().any(|h| !(*h >= 0.0) || !h.is_finite()) {
            return Err(Error::Config(
                "heights must be finite and non-negative".into(),
            ));
        }
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        Ok(hs)
    }

    /// Frequencies in Hartree.
    pub fn omegas(&self, mat: &MaterialParams, default_fractions: &[f64]) -> Result<Vec<f64>> {
        let ws: Vec<f64> = match (&self.omega_fractions, &self.omega_rad_per_s) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either sweep.omega_fractions or sweep.omega_rad_per_s".into(),
                ))
            }
            (Some(f), None) => f.iter().map(|x| x * mat.plasma_frequency_au()).collect(),
            (None, Some(w)) => w.iter().map(|&x| UNITS.rad_per_s_to_hartree(x)).collect(),
            (None, None) => default_fractions
                .iter()
                .map(|x| x * mat.plasma_frequency_au())
                .collect(),
        };
        if ws.is_empty() || ws.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("frequencies must be positive".into()));
        }
        Ok(ws)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetardationChoice {
    QuasiStatic,
    Retarded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub hydro_retardation: RetardationChoice,
    /// Screening level of the RPA film curve.
    pub film_rpa_mode: DysonMode,
}

impl Default for ModelBlock {
    fn default() -> Self {
        ModelBlock {
            hydro_retardation: RetardationChoice::QuasiStatic,
            film_rpa_mode: DysonMode::Full,
        }
    }
}

impl ModelBlock {
    pub fn retardation(&self) -> Retardation {
        match self.hydro_retardation {
            RetardationChoice::QuasiStatic => Retardation::QuasiStatic,
            RetardationChoice::Retarded => Retardation::Retarded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResponseBlock {
    pub grid_points: usize,
    /// η; defaults to the collision rate.
    pub broadening_per_s: Option<f64>,
    /// Final states are kept up to this multiple of E_F.
    pub subband_cutoff_fermi_multiple: f64,
    pub initial_q_nodes: usize,
    pub q_relative_tolerance: f64,
    pub max_q_evaluations: usize,
    pub q_lower_multiplier: f64,
    pub q_upper_multiplier: f64,
}

impl Default for ResponseBlock {
    fn default() -> Self {
        let f = FilmOptions::default();
        ResponseBlock {
            grid_points: 401,
            broadening_per_s: None,
            subband_cutoff_fermi_multiple: 4.0,
            initial_q_nodes: f.initial_nodes,
            q_relative_tolerance: f.relative_tolerance,
            max_q_evaluations: f.max_evaluations,
            q_lower_multiplier: f.lower_multiplier,
            q_upper_multiplier: f.upper_multiplier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Also write per-(Q, ω) tables of G⁰, G and Dyson residuals.
    pub diagnostics: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: PathBuf::from("out"),
            diagnostics: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        };
        let mat = self.material();
        mat.validate().map_err(as_config)?;
        self.slab_spec().validate(&mat).map_err(as_config)?;
        self.quadrature.validate().map_err(as_config)?;
        let r = &self.response;
        if r.grid_points < 4 {
            return Err(Error::Config(
                "response.grid_points must be at least 4".into(),
            ));
        }
        if let Some(eta) = r.broadening_per_s {
            if !(eta > 0.0) {
                return Err(Error::Config(
                    "response.broadening_per_s must be positive".into(),
                ));
            }
        }
        if !(r.subband_cutoff_fermi_multiple >= 1.0) {
            return Err(Error::Config(
                "response.subband_cutoff_fermi_multiple must be at least 1".into(),
            ));
        }
        if r.initial_q_nodes < 64 || !(r.q_relative_tolerance > 0.0) || r.max_q_evaluations == 0 {
            return Err(Error::Config(
                "response needs initial_q_nodes >= 64, a positive tolerance and evaluation budget"
                    .into(),
            ));
        }
        if !(r.q_lower_multiplier > 0.0 && r.q_upper_multiplier > r.q_lower_multiplier) {
            return Err(Error::Config(
                "response Q range multipliers must satisfy 0 < lower < upper".into(),
            ));
        }
        Ok(())
    }

    pub fn material(&self) -> MaterialParams {
        let m = &self.material;
        MaterialParams {
            plasma_frequency: m.plasma_frequency_rad_per_s,
            collision_rate: m.collision_rate_per_s,
            fermi_velocity: m.fermi_velocity_cm_per_s,
            wigner_seitz_radius: m.wigner_seitz_radius_bohr,
            temperature: m.temperature_k,
        }
    }

    pub fn slab_spec(&self) -> SlabSpec {
        let s = &self.slab;
        let mat = self.material();
        let ext = s
            .box_extension_bohr
            .unwrap_or(derive_material(&mat).box_extension);
        let mixing = match s.mixing {
            MixingScheme::Linear => Mixing::Linear {
                alpha: s.mixing_alpha,
            },
            MixingScheme::Pulay => Mixing::Pulay {
                alpha: s.mixing_alpha,
                history: s.pulay_history,
                kerker_wavenumber: s.kerker_wavenumber_per_bohr,
            },
        };
        SlabSpec {
            thickness: UNITS.nm_to_bohr(s.thickness_nm),
            vacuum_left: ext,
            vacuum_right: ext,
            basis_size: s.basis_size,
            grid_points: s.grid_points,
            mixing,
            density_tolerance: s.density_tolerance_per_bohr3,
            max_iterations: s.max_iterations,
            interacting: true,
        }
    }

    /// η in Hartree.
    pub fn broadening(&self) -> f64 {
        let nu = self
            .response
            .broadening_per_s
            .unwrap_or(self.material.collision_rate_per_s);
        UNITS.rad_per_s_to_hartree(nu)
    }

    pub fn film_options(&self, mode: DysonMode) -> FilmOptions {
        let r = &self.response;
        FilmOptions {
            mode,
            initial_nodes: r.initial_q_nodes,
            relative_tolerance: r.q_relative_tolerance,
            max_evaluations: r.max_q_evaluations,
            lower_multiplier: r.q_lower_multiplier,
            upper_multiplier: r.q_upper_multiplier,
            parallel: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.material(), MaterialParams::aluminum());
        assert_eq!(c.slab_spec(), SlabSpec::film(&MaterialParams::aluminum()));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            ExperimentConfig::from_toml("[material]\nplasma_frequency = 1.0\n"),
            Err(Error::Config(_))
        ));
        assert!(ExperimentConfig::from_toml("[nonsense]\n").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let text = "[sweep]\nh_nm = [0.5, 1.0]\nomega_fractions = [0.05]\n[slab]\nthickness_nm = 2.0\nmixing = \"linear\"\n";
        let c = ExperimentConfig::from_toml(text).unwrap();
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.slab_spec().mixing, Mixing::Linear { alpha: 0.2 });
    }

    #[test]
    fn sweep_resolution() {
        let mat = MaterialParams::aluminum();
        let d = HeightRange {
            min_nm: 0.01,
            max_nm: 50.0,
            count: 60,
        };
        let hs = SweepBlock::default().heights_nm(d).unwrap();
        assert_eq!(hs.len(), 60);
        assert_eq!((hs[0], hs[59]), (0.01, 50.0));
        assert!(hs
            .windows(2)
            .all(|p| (p[1] / p[0] - (5000f64).powf(1.0 / 59.0)).abs() < 1e-9));
        let both = SweepBlock {
            h_nm: Some(vec![1.0]),
            h_count: Some(3),
            ..Default::default()
        };
        assert!(both.heights_nm(d).is_err());
        let w = SweepBlock {
            omega_rad_per_s: Some(vec![2.3e15]),
            ..Default::default()
        }
        .omegas(&mat, &[0.1])
        .unwrap();
        assert!((w[0] / (0.1 * mat.plasma_frequency_au()) - 1.0).abs() < 1e-12);
        let clash = SweepBlock {
            omega_rad_per_s: Some(vec![1.0]),
            omega_fractions: Some(vec![0.1]),
            ..Default::default()
        };
        assert!(clash.omegas(&mat, &[0.1]).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[slab]\nmixing_alpha = 1.5\n",
            "[material]\ntemperature_k = -1.0\n",
            "[response]\ninitial_q_nodes = 10\n",
            "[quadrature]\ncutoff_multiplier = 2.0\n",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }
}
