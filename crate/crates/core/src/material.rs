//! Film materials and the built-in library.
//!
//! Mechanical constants are not measured values: they are typical
//! handbook figures used as defaults and can be overridden per recipe.

use crate::error::{Error, Result};
use crate::units::{GPA, MIN, NM, UM};

/// Etch, deposition and mechanical constants for one film material (SI).
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Sacrificial etch rate with no transport limitation (m/s).
    pub intrinsic_etch_rate: f64,
    /// Attack rate of the release chemistry on this film (m/s).
    pub selectivity_loss: f64,
    /// Probability that an arriving sputtered molecule sticks.
    pub sticking_coefficient: f64,
    /// Young's modulus (Pa).
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    /// Maximum stress before failure (Pa).
    pub failure_stress: f64,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidInput(format!("material {}: {what}", self.name)));
        if !(self.intrinsic_etch_rate >= 0.0) {
            return bad("intrinsic etch rate must be >= 0");
        }
        if !(self.selectivity_loss >= 0.0) {
            return bad("selectivity loss must be >= 0");
        }
        if !(self.sticking_coefficient > 0.0 && self.sticking_coefficient <= 1.0) {
            return bad("sticking coefficient must lie in (0, 1]");
        }
        if !(self.youngs_modulus > 0.0) {
            return bad("Young's modulus must be > 0");
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return bad("Poisson ratio must lie in (0, 0.5)");
        }
        if !(self.failure_stress > 0.0) {
            return bad("failure stress must be > 0");
        }
        Ok(())
    }

    /// Sputtered amorphous silicon, the sacrificial layer.
    pub fn amorphous_si() -> Self {
        Material {
            name: "asi".into(),
            intrinsic_etch_rate: crate::etch::CALIBRATED_INTRINSIC_RATE_UM_MIN * UM / MIN,
            selectivity_loss: 0.0,
            sticking_coefficient: 0.5,
            youngs_modulus: 80.0 * GPA,
            poisson_ratio: 0.22,
            failure_stress: 1.0 * GPA,
        }
    }

    /// RF-sputtered SiO2: cap film and sealing deposit.
    pub fn sputtered_sio2() -> Self {
        Material {
            name: "sio2".into(),
            intrinsic_etch_rate: 0.0,
            // upper bound of the measured SF6 attack
            selectivity_loss: 1.0 * NM / MIN,
            sticking_coefficient: 0.26,
            youngs_modulus: 70.0 * GPA,
            poisson_ratio: 0.17,
            failure_stress: 2.0 * GPA,
        }
    }

    /// Low-temperature oxide.
    pub fn lto() -> Self {
        Material { name: "lto".into(), ..Self::sputtered_sio2() }
    }

    /// PECVD silicon nitride.
    pub fn pecvd_nitride() -> Self {
        Material {
            name: "nitride".into(),
            intrinsic_etch_rate: 0.0,
            selectivity_loss: 1.0 * NM / MIN,
            sticking_coefficient: 0.26,
            youngs_modulus: 250.0 * GPA,
            poisson_ratio: 0.25,
            failure_stress: 9.0 * GPA,
        }
    }

    /// LPCVD polysilicon: a poor clogging material.
    pub fn lpcvd_polysi() -> Self {
        Material {
            name: "polysi".into(),
            intrinsic_etch_rate: 0.0,
            selectivity_loss: 0.0,
            sticking_coefficient: 0.009,
            youngs_modulus: 160.0 * GPA,
            poisson_ratio: 0.22,
            failure_stress: 1.2 * GPA,
        }
    }

    /// Look up a built-in material by name.
    pub fn library(name: &str) -> Option<Self> {
        let m = match name.to_ascii_lowercase().as_str() {
            "asi" | "a-si" => Self::amorphous_si(),
            "sio2" => Self::sputtered_sio2(),
            "lto" => Self::lto(),
            "nitride" | "sin" => Self::pecvd_nitride(),
            "polysi" | "poly-si" => Self::lpcvd_polysi(),
            _ => return None,
        };
        Some(m)
    }

    pub const LIBRARY_NAMES: [&'static str; 5] = ["asi", "sio2", "lto", "nitride", "polysi"];
}
