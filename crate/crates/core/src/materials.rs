//! Material constants and the quasi-static velocity relations.
//!
//! The plate is treated as isotropic with one stiffness pair per electrical
//! boundary condition: `c^E` for an electrically shorted surface and the
//! piezoelectrically stiffened `c^S` for an open one.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dielectric permittivity of LiNbO₃ along X at constant strain, F/m.
pub const EPS11_LINBO3: f64 = 3.92e-10;

/// Effective piezoelectric constant e15 of LiNbO₃, C/m².
pub const E15_LINBO3: f64 = 3.7;

/// Isotropicized elastic constants and density for one boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSet {
    pub name: String,
    /// Longitudinal stiffness, Pa.
    pub c11: f64,
    /// Shear stiffness, Pa.
    pub c44: f64,
    /// Density, kg/m³.
    pub rho: f64,
    /// Tabulated longitudinal velocity that replaces `sqrt(c11/rho)` in
    /// downstream models when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_l_override: Option<f64>,
}

impl MaterialSet {
    pub fn new(name: impl Into<String>, c11: f64, c44: f64, rho: f64) -> Result<Self> {
        let m = Self {
            name: name.into(),
            c11,
            c44,
            rho,
            v_l_override: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_v_l_override(mut self, v_l: f64) -> Result<Self> {
        if !(v_l > 0.0) {
            return Err(invalid(format!("v_l override must be positive, got {v_l}")));
        }
        self.v_l_override = Some(v_l);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) {
            return Err(invalid(format!("{}: rho must be positive", self.name)));
        }
        if !(self.c44 > 0.0 && self.c11 > self.c44) {
            return Err(invalid(format!(
                "{}: need c11 > c44 > 0 (c11 = {}, c44 = {})",
                self.name, self.c11, self.c44
            )));
        }
        if let Some(v) = self.v_l_override {
            if !(v > 0.0) {
                return Err(invalid(format!("{}: v_l override must be positive", self.name)));
            }
        }
        Ok(())
    }

    /// Longitudinal velocity used by the dispersion models: the override
    /// when present, otherwise `sqrt(c11/rho)`.
    pub fn v_l(&self) -> f64 {
        self.v_l_override.unwrap_or_else(|| longitudinal_velocity(self))
    }

    pub fn v_s(&self) -> f64 {
        shear_velocity(self)
    }
}

/// `sqrt(c11/rho)`, ignoring any override.
pub fn longitudinal_velocity(m: &MaterialSet) -> f64 {
    (m.c11 / m.rho).sqrt()
}

/// `sqrt(c44/rho)`.
pub fn shear_velocity(m: &MaterialSet) -> f64 {
    (m.c44 / m.rho).sqrt()
}

/// Reduced scalar piezoelectric stiffening `c^S = c^E + e²/ε`.
pub fn stiffen(c_e: f64, e_eff: f64, eps_eff: f64) -> Result<f64> {
    if !(eps_eff > 0.0) {
        return Err(invalid(format!("permittivity must be positive, got {eps_eff}")));
    }
    Ok(c_e + e_eff * e_eff / eps_eff)
}

/// Built-in Z-cut LiNbO₃ constants, returned as `(short, open)`.
///
/// The open set carries the tabulated 6795 m/s longitudinal velocity as an
/// override; [`longitudinal_velocity`] still reports `sqrt(c11/rho)`.
pub fn builtin_linbo3() -> (MaterialSet, MaterialSet) {
    let short = MaterialSet {
        name: "LiNbO3 (short)".into(),
        c11: 2.03e11,
        c44: 0.60e11,
        rho: 4700.0,
        v_l_override: None,
    };
    let open = MaterialSet {
        name: "LiNbO3 (open)".into(),
        c11: 2.19e11,
        c44: 0.95e11,
        rho: 4700.0,
        v_l_override: Some(6795.0),
    };
    (short, open)
}

/// Electrode metal properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeMaterial {
    pub name: String,
    /// Density, kg/m³.
    pub rho: f64,
    /// Shear velocity, m/s.
    pub v_s: f64,
    /// Longitudinal velocity, m/s.
    pub v_l: f64,
    /// Bulk resistivity, Ω·m.
    pub resistivity: f64,
    /// Thin-film resistivity multiplier.
    pub resistivity_scale: f64,
}

impl ElectrodeMaterial {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [self.rho, self.v_s, self.v_l, self.resistivity, self.resistivity_scale]
            .iter()
            .all(|&x| x > 0.0);
        if !all_positive {
            return Err(invalid(format!("{}: electrode constants must be positive", self.name)));
        }
        if !(self.v_l > self.v_s) {
            return Err(invalid(format!("{}: need v_l > v_s", self.name)));
        }
        Ok(())
    }

    /// Thin-film resistivity `resistivity × resistivity_scale`.
    pub fn film_resistivity(&self) -> f64 {
        self.resistivity * self.resistivity_scale
    }

    pub fn aluminum() -> Self {
        Self {
            name: "Al".into(),
            rho: 2700.0,
            v_s: 3100.0,
            v_l: 6420.0,
            resistivity: 2.65e-8,
            resistivity_scale: 3.0,
        }
    }

    pub fn gold() -> Self {
        Self {
            name: "Au".into(),
            rho: 19300.0,
            v_s: 1200.0,
            v_l: 3240.0,
            resistivity: 2.44e-8,
            resistivity_scale: 3.0,
        }
    }

    pub fn molybdenum() -> Self {
        Self {
            name: "Mo".into(),
            rho: 10280.0,
            v_s: 3350.0,
            v_l: 6250.0,
            resistivity: 5.34e-8,
            resistivity_scale: 3.0,
        }
    }

    /// Looks up a built-in metal by symbol (case-insensitive).
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "al" | "aluminum" | "aluminium" => Some(Self::aluminum()),
            "au" | "gold" => Some(Self::gold()),
            "mo" | "molybdenum" => Some(Self::molybdenum()),
            _ => None,
        }
    }
}
