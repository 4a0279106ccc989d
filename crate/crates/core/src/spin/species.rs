use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{mhz_to_rad, GAMMA_E};

/// Hyperfine and gyromagnetic data for one donor type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonorSpecies {
    pub name: String,
    /// Isotropic hyperfine constant `A`, rad/s.
    pub hyperfine: f64,
    two_i: u32,
    /// Nuclear to electronic gyromagnetic ratio.
    pub delta: f64,
    /// Electron gyromagnetic ratio, rad s⁻¹ T⁻¹.
    pub gamma_e: f64,
}

impl DonorSpecies {
    pub fn new(
        name: impl Into<String>,
        hyperfine: f64,
        nuclear_spin: f64,
        delta: f64,
        gamma_e: f64,
    ) -> Result<Self> {
        let twice = 2.0 * nuclear_spin;
        if !(twice.is_finite() && twice >= 1.0 && (twice - twice.round()).abs() < 1e-12) {
            return Err(Error::InvalidNuclearSpin(nuclear_spin));
        }
        if !(hyperfine.is_finite() && hyperfine >= 0.0) {
            return Err(Error::InvalidSpecies(format!("hyperfine constant {hyperfine}")));
        }
        if !(delta.is_finite() && (0.0..1.0).contains(&delta)) {
            return Err(Error::InvalidSpecies(format!("gyromagnetic ratio delta {delta}")));
        }
        if !(gamma_e.is_finite() && gamma_e > 0.0) {
            return Err(Error::InvalidSpecies(format!("gamma_e {gamma_e}")));
        }
        Ok(Self {
            name: name.into(),
            hyperfine,
            two_i: twice.round() as u32,
            delta,
            gamma_e,
        })
    }

    /// Si:Bi, ²⁰⁹Bi with `A/2π = 1475.4 MHz`.
    pub fn bismuth() -> Self {
        Self::new("Bi", mhz_to_rad(1475.4), 4.5, 2.488e-4, GAMMA_E).expect("valid preset")
    }

    /// Si:As, ⁷⁵As.
    pub fn arsenic() -> Self {
        Self::new("As", mhz_to_rad(198.35), 1.5, 2.610e-4, GAMMA_E).expect("valid preset")
    }

    /// Si:P, ³¹P.
    pub fn phosphorus() -> Self {
        Self::new("P", mhz_to_rad(117.53), 0.5, 6.150e-4, GAMMA_E).expect("valid preset")
    }

    /// Si:Sb, ¹²¹Sb.
    pub fn antimony() -> Self {
        Self::new("Sb", mhz_to_rad(186.80), 2.5, 3.659e-4, GAMMA_E).expect("valid preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bi" | "bismuth" => Some(Self::bismuth()),
            "as" | "arsenic" => Some(Self::arsenic()),
            "p" | "phosphorus" => Some(Self::phosphorus()),
            "sb" | "antimony" => Some(Self::antimony()),
            _ => None,
        }
    }

    pub fn nuclear_spin(&self) -> f64 {
        self.two_i as f64 / 2.0
    }

    /// Twice the nuclear spin.
    pub fn two_i(&self) -> i32 {
        self.two_i as i32
    }

    /// `2(2I + 1)`.
    pub fn level_count(&self) -> usize {
        2 * (self.two_i as usize + 1)
    }

    /// Electron Larmor frequency `ω₀ = γ_e B₀`.
    pub fn omega0(&self, field: f64) -> f64 {
        self.gamma_e * field
    }

    /// `X_m = I(I+1) − m² + 1/4`.
    pub fn x_m(&self, two_m: i32) -> f64 {
        let i = self.nuclear_spin();
        let m = two_m as f64 / 2.0;
        i * (i + 1.0) - m * m + 0.25
    }

    /// `Z_m = m + (ω₀/A)(1 + δ)`.
    pub fn z_m(&self, two_m: i32, field: f64) -> f64 {
        let m = two_m as f64 / 2.0;
        if field == 0.0 {
            return m;
        }
        m + self.omega0(field) / self.hyperfine * (1.0 + self.delta)
    }
}
