//! Versioned JSON persistence of [`ScfSolution`].
//!
//! ```text
//! { "format": "spd-scf", "version": 1, "solution": { spec, material,
//!   box_length, background_density, chemical_potential,
//!   subbands: [{energy, coefficients: [b_1..b_S]}], z, density, potential,
//!   neutrality_residual, converged, iterations, history } }
//! ```
//! Floats are written in shortest round-trip form, so load/save is exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::scf::ScfSolution;

pub const SCF_FORMAT: &str = "spd-scf";
pub const SCF_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<T> {
    format: String,
    version: u32,
    solution: T,
}

impl ScfSolution {
    pub fn to_json(&self) -> Result<String> {
        let env = Envelope {
            format: SCF_FORMAT.to_string(),
            version: SCF_VERSION,
            solution: self,
        };
        let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: origin.to_path_buf(),
            reason,
        };
        let env: Envelope<ScfSolution> =
            serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if env.format != SCF_FORMAT {
            return Err(bad(format!("unexpected format tag {:?}", env.format)));
        }
        if env.version != SCF_VERSION {
            return Err(bad(format!("unsupported version {}", env.version)));
        }
        let s = env.solution;
        let n = s.z.len();
        if s.density.len() != n || s.potential.len() != n || n < 4 {
            return Err(bad("grid arrays have inconsistent lengths".into()));
        }
        if s.subbands
            .iter()
            .any(|b| b.coefficients.len() != s.subbands.len())
        {
            return Err(bad("coefficient matrix is not square".into()));
        }
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}
