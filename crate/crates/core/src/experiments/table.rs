//! Result tables: CSV with `#`-prefixed provenance lines.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curve a row belongs to. The declaration order is the sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Local,
    Hydro,
    Bulk,
    FilmIbm,
    FilmRpa,
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::Local => "local",
            Model::Hydro => "hydro",
            Model::Bulk => "bulk",
            Model::FilmIbm => "film-ibm",
            Model::FilmRpa => "film-rpa",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "local" => Model::Local,
            "hydro" => Model::Hydro,
            "bulk" => Model::Bulk,
            "film-ibm" => Model::FilmIbm,
            "film-rpa" => Model::FilmRpa,
            _ => return Err(Error::Config(format!("unknown model {s:?}"))),
        })
    }
}

/// One SPD value. With `normalized` set the three SPD columns are divided
/// by `normalization` (atomic units); otherwise they are in atomic units and
/// `normalization` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub model: Model,
    pub omega_rad_per_s: f64,
    /// Height above the jellium edge; negative inside the metal.
    pub h_nm: f64,
    pub g_zz: f64,
    pub g_xx: f64,
    /// Trace g_xx + g_yy + g_zz.
    pub g_ee: f64,
    pub normalized: bool,
    pub normalization: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumTable {
    /// Provenance lines without the leading `# `.
    pub header: Vec<String>,
    pub rows: Vec<SpectrumRow>,
}

pub const TABLE_VERSION: u32 = 1;

const H_SEMANTICS: &str =
    "h = 0 is the jellium edge (edge of the positive background); h > 0 in vacuum, h < 0 inside the metal";

impl SpectrumTable {
    /// Standard provenance header: format, version and the configuration
    /// echo.
    pub fn with_provenance(title: &str, config_toml: &str) -> Self {
        let mut header = vec![
            format!("spd-table version {TABLE_VERSION}"),
            format!("produced by spd-core {}", env!("CARGO_PKG_VERSION")),
            title.to_string(),
            H_SEMANTICS.to_string(),
            "spd columns in Hartree atomic units unless normalized; omega in rad/s; h in nm"
                .to_string(),
            "config:".to_string(),
        ];
        header.extend(config_toml.lines().map(|l| format!("  {l}")));
        SpectrumTable {
            header,
            rows: Vec::new(),
        }
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.model
                .cmp(&b.model)
                .then(a.omega_rad_per_s.total_cmp(&b.omega_rad_per_s))
                .then(a.h_nm.total_cmp(&b.h_nm))
        });
    }

    pub fn validate(&self) -> Result<()> {
        let sorted = self.rows.windows(2).all(|p| {
            (p[0].model, p[0].omega_rad_per_s, p[0].h_nm)
                <= (p[1].model, p[1].omega_rad_per_s, p[1].h_nm)
        });
        if !sorted {
            return Err(Error::invalid(
                "table rows must be sorted by (model, omega, h)",
            ));
        }
        if self
            .rows
            .iter()
            .any(|r| r.normalized && !(r.normalization > 0.0))
        {
            return Err(Error::invalid(
                "normalized rows need a positive normalization constant",
            ));
        }
        Ok(())
    }

    pub fn rows_for(&self, model: Model) -> impl Iterator<Item = &SpectrumRow> {
        self.rows.iter().filter(move |r| r.model == model)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for line in &self.header {
            let _ = writeln!(out, "# {line}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)
                .map_err(|e| Error::invalid(e.to_string()))?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "model",
                "omega_rad_per_s",
                "h_nm",
                "g_zz",
                "g_xx",
                "g_ee",
                "normalized",
                "normalization",
            ])
            .map_err(|e| Error::invalid(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::invalid(e.to_string()))?);
        Ok(out)
    }

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: origin.to_path_buf(),
            reason,
        };
        let mut header = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(h) = line.strip_prefix('#') {
                header.push(h.strip_prefix(' ').unwrap_or(h).to_string());
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<SpectrumRow>, _>>()
            .map_err(|e| bad(e.to_string()))?;
        let t = SpectrumTable { header, rows };
        t.validate().map_err(|e| bad(e.to_string()))?;
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, path)
    }
}
