//! Diverging Gaussian pushing–guiding beam.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::species::{saturation_intensity, SpeciesParams};

/// Largest accepted ratio between a supplied Rayleigh length and π w₀²/λ.
pub const RAYLEIGH_TOLERANCE_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamParams {
    /// optical power P₀ (W)
    pub power: f64,
    /// detuning δ from the F → F+1 cycling transition (rad/s), red < 0
    pub detuning: f64,
    /// waist at focus w₀ (m)
    pub waist_min: f64,
    /// focus position z₀ (m), negative above MOT1
    pub focus_position: f64,
    /// Rayleigh length z_R (m)
    pub rayleigh_length: f64,
    /// true when z_R came from the user rather than π w₀²/λ
    pub rayleigh_supplied: bool,
    /// multiplier on every saturation parameter (linear polarization: 2/3)
    pub polarization_factor: f64,
    /// multiplier on the longitudinal pushing force only
    pub transverse_average_factor: f64,
}

impl BeamParams {
    pub const DEFAULT_POLARIZATION_FACTOR: f64 = 2.0 / 3.0;
    pub const DEFAULT_TRANSVERSE_AVERAGE_FACTOR: f64 = 0.5;

    /// Builds a beam; `rayleigh_length = None` uses the ideal π w₀²/λ.
    pub fn new(
        power: f64,
        detuning: f64,
        waist_min: f64,
        focus_position: f64,
        rayleigh_length: Option<f64>,
        wavelength: f64,
    ) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::invalid(format!("beam power must be >= 0, got {power}")));
        }
        if !(waist_min > 0.0 && waist_min.is_finite()) {
            return Err(Error::invalid("beam waist must be positive"));
        }
        if !detuning.is_finite() || !focus_position.is_finite() {
            return Err(Error::invalid("beam detuning and focus must be finite"));
        }
        let ideal = PI * waist_min * waist_min / wavelength;
        let (z_r, supplied) = match rayleigh_length {
            Some(z_r) => {
                if !(z_r > 0.0 && z_r.is_finite()) {
                    return Err(Error::invalid("Rayleigh length must be positive"));
                }
                let ratio = z_r / ideal;
                if !(1.0 / RAYLEIGH_TOLERANCE_FACTOR..=RAYLEIGH_TOLERANCE_FACTOR).contains(&ratio) {
                    return Err(Error::invalid(format!(
                        "Rayleigh length {z_r} m is inconsistent with pi*w0^2/lambda = {ideal} m"
                    )));
                }
                (z_r, true)
            }
            None => (ideal, false),
        };
        Ok(BeamParams {
            power,
            detuning,
            waist_min,
            focus_position,
            rayleigh_length: z_r,
            rayleigh_supplied: supplied,
            polarization_factor: Self::DEFAULT_POLARIZATION_FACTOR,
            transverse_average_factor: Self::DEFAULT_TRANSVERSE_AVERAGE_FACTOR,
        })
    }

    pub fn with_factors(mut self, polarization: f64, transverse_average: f64) -> Result<Self> {
        if !(polarization > 0.0 && transverse_average > 0.0) {
            return Err(Error::invalid("beam correction factors must be positive"));
        }
        self.polarization_factor = polarization;
        self.transverse_average_factor = transverse_average;
        Ok(self)
    }

    pub fn with_power(&self, power: f64) -> Self {
        BeamParams { power, ..self.clone() }
    }

    /// Ratio of z_R to the ideal Gaussian value π w₀²/λ.
    pub fn rayleigh_ratio(&self, wavelength: f64) -> f64 {
        self.rayleigh_length / (PI * self.waist_min * self.waist_min / wavelength)
    }

    /// (z_R² + (z−z₀)²)/z_R², i.e. w(z)²/w₀².
    fn spread(&self, z: f64) -> f64 {
        let x = (z - self.focus_position) / self.rayleigh_length;
        1.0 + x * x
    }

    /// 1/e² radius at height z.
    pub fn waist_at(&self, z: f64) -> f64 {
        self.waist_min * self.spread(z).sqrt()
    }

    /// dw/dz at height z.
    pub fn waist_slope(&self, z: f64) -> f64 {
        let d = z - self.focus_position;
        self.waist_min * d / (self.rayleigh_length * self.rayleigh_length * self.spread(z).sqrt())
    }

    /// On-axis intensity 2P₀/(π w²).
    pub fn peak_intensity(&self, z: f64) -> f64 {
        let w = self.waist_at(z);
        2.0 * self.power / (PI * w * w)
    }

    /// Saturation parameter at `detuning_used` (includes the polarization factor).
    pub fn saturation_parameter(&self, species: &SpeciesParams, detuning_used: f64, z: f64) -> f64 {
        let ratio = self.peak_intensity(z) / saturation_intensity(species);
        let lorentz = 1.0 + 4.0 * detuning_used * detuning_used / (species.gamma * species.gamma);
        self.polarization_factor * ratio / lorentz
    }
}

/// Free-function forms, mirroring the method API.
pub fn waist_at(beam: &BeamParams, z: f64) -> f64 {
    beam.waist_at(z)
}

pub fn peak_intensity(beam: &BeamParams, z: f64) -> f64 {
    beam.peak_intensity(z)
}

pub fn saturation_parameter(beam: &BeamParams, species: &SpeciesParams, detuning_used: f64, z: f64) -> f64 {
    beam.saturation_parameter(species, detuning_used, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cs_beam() -> BeamParams {
        let cs = SpeciesParams::cesium_133();
        BeamParams::new(0.063, angular(-2e9), 200e-6, -0.34, Some(0.110), cs.wavelength).unwrap()
    }

    fn rb_beam() -> BeamParams {
        let rb = SpeciesParams::rubidium_87();
        BeamParams::new(0.021, angular(-1e9), 300e-6, -0.13, Some(0.260), rb.wavelength).unwrap()
    }

    #[test]
    fn tabulated_waists() {
        assert!((cs_beam().waist_at(0.0) - 0.65e-3).abs() < 0.01e-3);
        assert!((rb_beam().waist_at(0.72) - 1.0e-3).abs() < 0.05e-3);
        assert_eq!(cs_beam().waist_at(-0.34), 200e-6);
    }

    #[test]
    fn rb_peak_intensity_at_focus() {
        // 2 * 0.021 / (pi * (300e-6)^2)
        let i = rb_beam().peak_intensity(-0.13);
        assert_relative_eq!(i, 1.4854e5, max_relative = 1e-4);
        assert_eq!(rb_beam().with_power(0.0).peak_intensity(0.3), 0.0);
        let b = rb_beam();
        assert_relative_eq!(b.peak_intensity(-0.13 + 0.26), b.peak_intensity(-0.13) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(b.peak_intensity(-0.13 - 0.26), b.peak_intensity(-0.13) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn saturation_parameter_cases() {
        let rb = SpeciesParams::rubidium_87();
        let b = rb_beam();
        // lower-state detuning at -1 GHz: -1 + 0.25 - 6.8 = -7.55 GHz
        let s = b.saturation_parameter(&rb, angular(-7.55e9), -0.13);
        assert_relative_eq!(s, 9.37e-4, max_relative = 0.01);

        let far = b.saturation_parameter(&rb, angular(-15.1e9), -0.13);
        assert_relative_eq!(far, s / 4.0, max_relative = 0.01);

        // I = I_s on resonance with no polarization correction gives s = 1
        let is = saturation_intensity(&rb);
        let w: f64 = 1e-3;
        let p = is * PI * w * w / 2.0;
        let unit = BeamParams::new(p, 0.0, w, 0.0, None, rb.wavelength)
            .unwrap()
            .with_factors(1.0, 0.5)
            .unwrap();
        assert_relative_eq!(unit.saturation_parameter(&rb, 0.0, 0.0), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn rayleigh_consistency() {
        let cs = SpeciesParams::cesium_133();
        let ideal = BeamParams::new(0.01, -1e9, 200e-6, 0.0, None, cs.wavelength).unwrap();
        assert!(!ideal.rayleigh_supplied);
        assert_relative_eq!(ideal.rayleigh_length, PI * 200e-6 * 200e-6 / cs.wavelength);
        assert!(BeamParams::new(0.01, -1e9, 200e-6, 0.0, Some(1.0), cs.wavelength).is_err());
        assert!(BeamParams::new(-0.01, -1e9, 200e-6, 0.0, None, cs.wavelength).is_err());
        assert!(BeamParams::new(0.01, -1e9, 0.0, 0.0, None, cs.wavelength).is_err());
    }

    proptest! {
        #[test]
        fn waist_symmetric_and_power_conserved(d in 0.0f64..1.0, d2 in 0.0f64..1.0) {
            let b = cs_beam();
            let z0 = b.focus_position;
            prop_assert!((b.waist_at(z0 + d) - b.waist_at(z0 - d)).abs() < 1e-15);
            if d2 > d + 1e-9 {
                prop_assert!(b.waist_at(z0 + d2) > b.waist_at(z0 + d));
            }
            let a = b.peak_intensity(z0 + d) * b.waist_at(z0 + d).powi(2);
            let c = b.peak_intensity(z0) * b.waist_at(z0).powi(2);
            prop_assert!((a - c).abs() <= 1e-12 * c);
        }

        #[test]
        fn saturation_linear_in_power(p in 1e-4f64..0.1, z in 0.0f64..0.7) {
            let rb = SpeciesParams::rubidium_87();
            let b = rb_beam();
            let s1 = b.with_power(p).saturation_parameter(&rb, angular(-7e9), z);
            let s2 = b.with_power(2.0 * p).saturation_parameter(&rb, angular(-7e9), z);
            prop_assert!((s2 - 2.0 * s1).abs() <= 1e-12 * s2);
        }
    }
}
