//! Atomic constants, trap geometry and the single-atom scales derived from them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{angular, C, GRAVITY, HBAR, KB, AMU};

/// Atomic species driven on its D2 cycling transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesParams {
    pub name: String,
    /// natural linewidth Γ (rad/s)
    pub gamma: f64,
    /// transition wavelength (m)
    pub wavelength: f64,
    /// atomic mass (kg)
    pub mass: f64,
    /// ground-state hyperfine interval Δ_HFS (rad/s)
    pub delta_hfs_ground: f64,
    /// total width of the excited-state hyperfine manifold Δ'_HFS (rad/s)
    pub delta_hfs_excited: f64,
    /// F of the lower hyperfine ground state
    pub f_lower: u32,
}

// D2 wavelengths and masses are standard reference data; the linewidths and
// hyperfine widths are the rounded values the model was published with.
const CS133_WAVELENGTH: f64 = 852.3472758e-9;
const CS133_MASS_U: f64 = 132.9054520;
const RB87_WAVELENGTH: f64 = 780.2412097e-9;
const RB87_MASS_U: f64 = 86.90918053;

impl SpeciesParams {
    /// Validating constructor; `delta_hfs_excited` may be zero (degenerate
    /// excited state), everything else must be strictly positive.
    pub fn new(
        name: impl Into<String>,
        gamma: f64,
        wavelength: f64,
        mass: f64,
        delta_hfs_ground: f64,
        delta_hfs_excited: f64,
        f_lower: u32,
    ) -> Result<Self> {
        let s = SpeciesParams {
            name: name.into(),
            gamma,
            wavelength,
            mass,
            delta_hfs_ground,
            delta_hfs_excited,
            f_lower,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gamma", self.gamma),
            ("wavelength", self.wavelength),
            ("mass", self.mass),
            ("hfs_ground", self.delta_hfs_ground),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("species {field} must be positive, got {v}")));
            }
        }
        if !(self.delta_hfs_excited.is_finite() && self.delta_hfs_excited >= 0.0) {
            return Err(Error::invalid("species hfs_excited must be non-negative"));
        }
        if self.f_lower < 1 {
            return Err(Error::invalid("species f_lower must be at least 1"));
        }
        Ok(())
    }

    pub fn cesium_133() -> Self {
        SpeciesParams {
            name: "Cs133".into(),
            gamma: angular(5.2e6),
            wavelength: CS133_WAVELENGTH,
            mass: CS133_MASS_U * AMU,
            delta_hfs_ground: angular(9.2e9),
            delta_hfs_excited: angular(600e6),
            f_lower: 3,
        }
    }

    pub fn rubidium_87() -> Self {
        SpeciesParams {
            name: "Rb87".into(),
            gamma: angular(5.9e6),
            wavelength: RB87_WAVELENGTH,
            mass: RB87_MASS_U * AMU,
            delta_hfs_ground: angular(6.8e9),
            delta_hfs_excited: angular(500e6),
            f_lower: 1,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "Cs133" => Some(Self::cesium_133()),
            "Rb87" => Some(Self::rubidium_87()),
            _ => None,
        }
    }

    /// wave number k = 2π/λ (1/m)
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Degeneracy ratio (2F+3)/(2F+1) between the upper and lower ground states.
    pub fn multiplicity_ratio(&self) -> f64 {
        let f = self.f_lower as f64;
        (2.0 * f + 3.0) / (2.0 * f + 1.0)
    }

    /// Recoil velocity ħk/M and recoil temperature M v_rec²/k_B.
    pub fn recoil(&self) -> (f64, f64) {
        recoil_quantities(self)
    }
}

/// Trap layout along the vertical axis (z points down, origin at MOT1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Geometry {
    /// MOT1–MOT2 distance D (m)
    pub trap_separation: f64,
    /// MOT2 trapping-beam radius R (m)
    pub mot2_radius: f64,
    /// radius of the MOT1 extraction region (m)
    pub mot1_radius: f64,
    /// g (m/s²)
    pub gravity: f64,
}

impl Geometry {
    pub fn new(trap_separation: f64, mot2_radius: f64, mot1_radius: f64) -> Result<Self> {
        Self::with_gravity(trap_separation, mot2_radius, mot1_radius, GRAVITY)
    }

    pub fn with_gravity(
        trap_separation: f64,
        mot2_radius: f64,
        mot1_radius: f64,
        gravity: f64,
    ) -> Result<Self> {
        let g = Geometry { trap_separation, mot2_radius, mot1_radius, gravity };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trap_separation > 0.0 && self.trap_separation.is_finite()) {
            return Err(Error::invalid("trap separation must be positive"));
        }
        if !(self.mot2_radius > 0.0 && self.mot2_radius.is_finite()) {
            return Err(Error::invalid("MOT2 beam radius must be positive"));
        }
        if !(self.mot1_radius > 0.0) {
            return Err(Error::invalid("MOT1 region radius must be positive"));
        }
        if self.mot1_radius >= self.trap_separation {
            return Err(Error::invalid("MOT1 region radius must be smaller than the trap separation"));
        }
        if !self.gravity.is_finite() || self.gravity < 0.0 {
            return Err(Error::invalid("gravity must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Saturation intensity I_s = ħ c k³ Γ / (12π) (W/m²).
pub fn saturation_intensity(species: &SpeciesParams) -> f64 {
    let k = species.wavenumber();
    HBAR * C * k.powi(3) * species.gamma / (2.0 * PI) / 6.0
}

/// Recoil velocity (m/s) and recoil temperature (K).
pub fn recoil_quantities(species: &SpeciesParams) -> (f64, f64) {
    let v_rec = HBAR * species.wavenumber() / species.mass;
    let t_rec = species.mass * v_rec * v_rec / KB;
    (v_rec, t_rec)
}

/// Largest speed MOT2 can stop within its beam diameter, √(Γ R v_rec).
pub fn capture_velocity(species: &SpeciesParams, geometry: &Geometry) -> f64 {
    let (v_rec, _) = recoil_quantities(species);
    (species.gamma * geometry.mot2_radius * v_rec).sqrt()
}
