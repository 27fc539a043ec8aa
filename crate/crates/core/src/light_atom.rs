//! Scattering, light shifts and optical pumping between the two hyperfine
//! ground states.
//!
//! Excited-state hyperfine structure enters only through the effective
//! detuning δ̄ = δ + Δ'_HFS/2. The lower ground state F sees the beam at
//! δ̄ − Δ_HFS; the upper state F+1 sees it at δ̄.

use serde::Serialize;

use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::species::SpeciesParams;
use crate::units::{angular, HBAR};

/// Saturation above which ln(1+s) ≈ s stops being trustworthy.
pub const LOW_SATURATION_LIMIT: f64 = 0.1;

/// Upper-state fraction above which the two-population estimate breaks down.
pub const ETA_VALIDITY_LIMIT: f64 = 0.2;

/// |δ̄|/2π below which the mean-detuning picture is flagged.
pub const MEAN_DETUNING_LIMIT: f64 = 0.5e9;

/// Stationary split of population between the hyperfine ground states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpingState {
    /// fraction in the upper ground state F+1
    pub eta: f64,
    /// (2F+3)/(2F+1)
    pub alpha: f64,
    /// δ̄ (rad/s)
    pub effective_detuning: f64,
    /// δ̄ − Δ_HFS (rad/s), the detuning seen from the lower ground state
    pub lower_detuning: f64,
    /// false once eta exceeds [`ETA_VALIDITY_LIMIT`]
    pub valid: bool,
}

/// Which form of the two-population bracket multiplies the pushing force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PumpingBracket {
    /// (1 − η) + η ((δ̄ − Δ_HFS)/δ̄)²
    #[default]
    Exact,
    /// 1 + α
    Shortcut,
}

impl PumpingState {
    /// Scattering per lower-state-equivalent saturation, averaged over both
    /// ground states.
    pub fn bracket(&self, kind: PumpingBracket) -> f64 {
        match kind {
            PumpingBracket::Exact => {
                let ratio = self.lower_detuning / self.effective_detuning;
                (1.0 - self.eta) + self.eta * ratio * ratio
            }
            PumpingBracket::Shortcut => 1.0 + self.alpha,
        }
    }

    /// Scattering-rate ratio between an upper-state and a lower-state atom.
    pub fn upper_to_lower_rate(&self) -> f64 {
        let ratio = self.lower_detuning / self.effective_detuning;
        ratio * ratio
    }
}

/// Γ' = (Γ/2) s/(1+s).
pub fn scattering_rate(s: f64, species: &SpeciesParams) -> f64 {
    0.5 * species.gamma * s / (1.0 + s)
}

/// δ̄ = δ + Δ'_HFS/2.
pub fn effective_detuning(beam: &BeamParams, species: &SpeciesParams) -> f64 {
    beam.detuning + 0.5 * species.delta_hfs_excited
}

/// True when δ̄ is close enough to resonance that a per-line treatment would
/// be needed.
pub fn mean_detuning_questionable(effective: f64) -> bool {
    effective.abs() < angular(MEAN_DETUNING_LIMIT)
}

/// η = α (δ̄/(δ̄ − Δ_HFS))².
pub fn upper_state_fraction(species: &SpeciesParams, effective: f64) -> Result<PumpingState> {
    let lower = effective - species.delta_hfs_ground;
    if lower.abs() < 1e-9 * species.delta_hfs_ground {
        return Err(Error::ModelValidity(
            "effective detuning is resonant with the lower ground state".into(),
        ));
    }
    let alpha = species.multiplicity_ratio();
    let x = effective / lower;
    let eta = alpha * x * x;
    Ok(PumpingState {
        eta,
        alpha,
        effective_detuning: effective,
        lower_detuning: lower,
        valid: eta <= ETA_VALIDITY_LIMIT,
    })
}

/// Pumping state for a beam, computing δ̄ first.
pub fn pumping_for(beam: &BeamParams, species: &SpeciesParams) -> Result<PumpingState> {
    upper_state_fraction(species, effective_detuning(beam, species))
}

/// A value with the saturation parameter it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturated {
    pub value: f64,
    pub saturation: f64,
}

impl Saturated {
    pub fn low_saturation(&self) -> bool {
        self.saturation <= LOW_SATURATION_LIMIT
    }
}

/// On-axis two-level light shift (ħδ/2)·s at the cycling detuning.
pub fn two_level_light_shift(beam: &BeamParams, species: &SpeciesParams, z: f64) -> Saturated {
    let s = beam.saturation_parameter(species, beam.detuning, z);
    Saturated { value: 0.5 * HBAR * beam.detuning * s, saturation: s }
}

/// s̄(z): saturation parameter of the lower ground state.
pub fn lower_saturation(beam: &BeamParams, species: &SpeciesParams, pumping: &PumpingState, z: f64) -> f64 {
    beam.saturation_parameter(species, pumping.lower_detuning, z)
}

/// Mean longitudinal radiation-pressure force (N) on the beam axis, including
/// the transverse-average factor.
pub fn pushing_force(
    beam: &BeamParams,
    species: &SpeciesParams,
    pumping: &PumpingState,
    bracket: PumpingBracket,
    z: f64,
) -> Saturated {
    let s = lower_saturation(beam, species, pumping, z);
    let f = beam.transverse_average_factor
        * 0.5
        * species.gamma
        * HBAR
        * species.wavenumber()
        * s
        * pumping.bracket(bracket);
    Saturated { value: f, saturation: s }
}

/// Potential whose negative gradient is [`pushing_force`], zero at z = 0.
pub fn pushing_potential(
    beam: &BeamParams,
    species: &SpeciesParams,
    pumping: &PumpingState,
    bracket: PumpingBracket,
    z: f64,
) -> f64 {
    -pushing_potential_prefactor(beam, species, pumping, bracket) * arctan_span(beam, z)
}

/// χ (Γ/2) ħk s̄(z₀) z_R · bracket.
pub fn pushing_potential_prefactor(
    beam: &BeamParams,
    species: &SpeciesParams,
    pumping: &PumpingState,
    bracket: PumpingBracket,
) -> f64 {
    let s0 = lower_saturation(beam, species, pumping, beam.focus_position);
    beam.transverse_average_factor
        * 0.5
        * species.gamma
        * HBAR
        * species.wavenumber()
        * s0
        * beam.rayleigh_length
        * pumping.bracket(bracket)
}

/// arctan((z−z₀)/z_R) + arctan(z₀/z_R)
pub(crate) fn arctan_span(beam: &BeamParams, z: f64) -> f64 {
    let z_r = beam.rayleigh_length;
    ((z - beam.focus_position) / z_r).atan() + (beam.focus_position / z_r).atan()
}

/// On-axis guide depth U₀(z) = ħ(δ̄ − Δ_HFS)/2 · s̄(z) (J); negative when red.
pub fn guide_depth(beam: &BeamParams, species: &SpeciesParams, pumping: &PumpingState, z: f64) -> f64 {
    0.5 * HBAR * pumping.lower_detuning * lower_saturation(beam, species, pumping, z)
}

/// Harmonic transverse frequency √(4|U₀|/(M w²)) of the guide.
pub fn transverse_frequency(
    beam: &BeamParams,
    species: &SpeciesParams,
    pumping: &PumpingState,
    z: f64,
) -> Result<f64> {
    let depth = guide_depth(beam, species, pumping, z).abs();
    if depth <= 0.0 {
        return Err(Error::ModelValidity("no guide: beam power is zero".into()));
    }
    let w = beam.waist_at(z);
    Ok((4.0 * depth / (species.mass * w * w)).sqrt())
}
