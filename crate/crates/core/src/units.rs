//! Conversion between Hartree atomic units and the SI/CGS units used at the
//! input/output boundary.

/// Conversion constants (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitContext {
    /// Hartree energy in eV.
    pub hartree_ev: f64,
    /// Atomic unit of time ℏ/E_h in seconds.
    pub time_s: f64,
    /// Bohr radius in nm.
    pub bohr_nm: f64,
    /// Boltzmann constant in Hartree per kelvin.
    pub boltzmann_hartree_per_k: f64,
    /// Speed of light in atomic units (1/α).
    pub speed_of_light: f64,
    /// Reduced Planck constant in erg·s.
    pub hbar_erg_s: f64,
}

impl UnitContext {
    pub const CODATA_2018: UnitContext = UnitContext {
        hartree_ev: 27.211_386_245_988,
        time_s: 2.418_884_326_585_7e-17,
        bohr_nm: 0.052_917_721_090_3,
        boltzmann_hartree_per_k: 3.166_811_563_455_6e-6,
        speed_of_light: 137.035_999_084,
        hbar_erg_s: 1.054_571_817e-27,
    };

    pub fn bohr_cm(&self) -> f64 {
        self.bohr_nm * 1e-7
    }

    pub fn ev_to_hartree(&self, e: f64) -> f64 {
        e / self.hartree_ev
    }

    pub fn hartree_to_ev(&self, e: f64) -> f64 {
        e * self.hartree_ev
    }

    /// Angular frequency (rad/s) to Hartree.
    pub fn rad_per_s_to_hartree(&self, w: f64) -> f64 {
        w * self.time_s
    }

    pub fn hartree_to_rad_per_s(&self, w: f64) -> f64 {
        w / self.time_s
    }

    pub fn nm_to_bohr(&self, x: f64) -> f64 {
        x / self.bohr_nm
    }

    pub fn bohr_to_nm(&self, x: f64) -> f64 {
        x * self.bohr_nm
    }

    pub fn cm_to_bohr(&self, x: f64) -> f64 {
        x / self.bohr_cm()
    }

    pub fn bohr_to_cm(&self, x: f64) -> f64 {
        x * self.bohr_cm()
    }

    /// Wavenumber in 1/cm to 1/Bohr.
    pub fn per_cm_to_per_bohr(&self, k: f64) -> f64 {
        k * self.bohr_cm()
    }

    pub fn per_bohr_to_per_cm(&self, k: f64) -> f64 {
        k / self.bohr_cm()
    }

    pub fn kelvin_to_hartree(&self, t: f64) -> f64 {
        t * self.boltzmann_hartree_per_k
    }

    pub fn hartree_to_kelvin(&self, e: f64) -> f64 {
        e / self.boltzmann_hartree_per_k
    }

    /// Velocity in cm/s to atomic units (Bohr per atomic time unit).
    pub fn cm_per_s_to_au(&self, v: f64) -> f64 {
        v * self.time_s / self.bohr_cm()
    }

    pub fn au_to_cm_per_s(&self, v: f64) -> f64 {
        v * self.bohr_cm() / self.time_s
    }

    /// Spectral power density (ℏ per Bohr³ in atomic units) to erg·s/cm³.
    pub fn spd_au_to_cgs(&self, g: f64) -> f64 {
        g * self.hbar_erg_s / self.bohr_cm().powi(3)
    }
}

impl Default for UnitContext {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// The unit context used throughout the crate.
pub const UNITS: UnitContext = UnitContext::CODATA_2018;
