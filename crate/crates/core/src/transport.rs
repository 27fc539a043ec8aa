//! Longitudinal and transverse dynamics between the two traps.
//!
//! The atom leaves MOT1 with the entrance velocity v₀, is pushed by the mean
//! radiation pressure of the diverging beam and falls under gravity. While it
//! stays guided its horizontal temperature follows adiabatic cooling plus
//! recoil heating; once 2k_B·T_h reaches the local guide depth it expands
//! ballistically with a frozen temperature until it reaches MOT2.

use serde::Serialize;

use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::light_atom::{
    arctan_span, effective_detuning, lower_saturation, mean_detuning_questionable, pumping_for,
    scattering_rate, PumpingBracket, PumpingState, LOW_SATURATION_LIMIT,
};
use crate::numerics::{adaptive_simpson, bisect, rk4, simpson_sqrt_endpoint};
use crate::species::{capture_velocity, recoil_quantities, Geometry, SpeciesParams};
use crate::units::{HBAR, KB};

/// Default relative tolerance for every quadrature in this module.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Bisection width for the guide-exit search (m).
pub const EXIT_TOLERANCE: f64 = 1e-7;

/// Conditional efficiency f(x) = 1/(1 + xⁿ).
pub fn conditional(x: f64, exponent: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    1.0 / (1.0 + x.abs().powf(exponent))
}

/// Knobs of the averaged transport model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelOptions {
    /// horizontal temperature at the guide entrance T₀ (K)
    pub initial_temperature: f64,
    pub bracket: PumpingBracket,
    /// exponent n of f(x) = 1/(1+xⁿ)
    pub f_exponent: f64,
    /// nodes of the cached z grid on [0, D]
    pub grid_points: usize,
    /// recoil heating in the guide; off leaves pure adiabatic cooling
    pub heating: bool,
}

impl ModelOptions {
    pub const DEFAULT_GRID_POINTS: usize = 2000;
    pub const DEFAULT_F_EXPONENT: f64 = 10.0;

    pub fn with_temperature(initial_temperature: f64) -> Self {
        ModelOptions {
            initial_temperature,
            bracket: PumpingBracket::Exact,
            f_exponent: Self::DEFAULT_F_EXPONENT,
            grid_points: Self::DEFAULT_GRID_POINTS,
            heating: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::invalid("initial temperature must be positive"));
        }
        if self.grid_points < 2 {
            return Err(Error::invalid("grid needs at least 2 points"));
        }
        if !(self.f_exponent > 0.0) {
            return Err(Error::invalid("f exponent must be positive"));
        }
        Ok(())
    }
}

/// Conditions under which the averaged model is being stretched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityFlag {
    /// saturation of the F+1 state in the MOT1 region exceeds 0.1
    UpperSaturationHigh,
    /// upper-state fraction above 0.2
    EtaHigh,
    /// |δ̄|/2π below 0.5 GHz
    MeanDetuningSmall,
    /// 2k_B·T₀ already exceeds the guide depth at MOT1
    NeverGuided,
    /// the trapping condition is met again after the first exit
    GuideReentry,
    /// supplied Rayleigh length differs from π w₀²/λ by more than 25 %
    RayleighNonIdeal,
    /// |dω_p/dt|/ω_p² reaches 1 before the guide exit
    Nonadiabatic,
}

impl ValidityFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ValidityFlag::UpperSaturationHigh => "upper_saturation_high",
            ValidityFlag::EtaHigh => "eta_high",
            ValidityFlag::MeanDetuningSmall => "mean_detuning_small",
            ValidityFlag::NeverGuided => "never_guided",
            ValidityFlag::GuideReentry => "guide_reentry",
            ValidityFlag::RayleighNonIdeal => "rayleigh_non_ideal",
            ValidityFlag::Nonadiabatic => "nonadiabatic",
        }
    }
}

/// Sample of the atomic beam at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportState {
    pub z: f64,
    pub v: f64,
    /// horizontal temperature (K), frozen after the guide exit
    pub t_h: f64,
    /// rms transverse radius (m)
    pub delta_r: f64,
    /// guide depth |U₀| (J)
    pub depth: f64,
    pub guided: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportProfile {
    pub samples: Vec<TransportState>,
    pub z_out: Option<f64>,
    pub arrival: TransportState,
    pub travel_time: f64,
}

/// Outcome of the guide-exit search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuideExit {
    /// None when the atoms stay guided all the way to D
    pub z_out: Option<f64>,
    pub never_guided: bool,
    pub reentry: bool,
}

/// First height where `excess` (2k_B T_h − |U₀|) becomes non-negative, scanning
/// `grid` for a sign change and refining it by bisection.
pub fn guide_exit<F: Fn(f64) -> f64>(excess: F, grid: &[f64]) -> Result<GuideExit> {
    let first = *grid.first().ok_or_else(|| Error::Numerical("empty grid".into()))?;
    if excess(first) >= 0.0 {
        return Ok(GuideExit { z_out: Some(first), never_guided: true, reentry: false });
    }
    let Some(i) = grid.iter().position(|&z| excess(z) >= 0.0) else {
        return Ok(GuideExit { z_out: None, never_guided: false, reentry: false });
    };
    let z_out = bisect(&excess, grid[i - 1], grid[i], EXIT_TOLERANCE)?;
    let reentry = grid[i + 1..].iter().any(|&z| excess(z) < 0.0);
    Ok(GuideExit { z_out: Some(z_out), never_guided: false, reentry })
}

/// Δt = ∫₀ᴰ dz/v(z), tolerant of v(0) = 0.
pub fn travel_time_for<F: Fn(f64) -> f64>(v: F, length: f64, rel_tol: f64) -> Result<f64> {
    let inv = |z: f64| {
        let vz = v(z);
        if vz > 0.0 {
            1.0 / vz
        } else {
            f64::INFINITY
        }
    };
    let split = 0.01 * length;
    let head = simpson_sqrt_endpoint(|z| if z == 0.0 { 0.0 } else { inv(z) }, 0.0, split, rel_tol)
        .map_err(|_| Error::Numerical("velocity vanishes near the start".into()))?;
    let tail = adaptive_simpson(inv, split, length, rel_tol)
        .map_err(|_| Error::Numerical("velocity is non-positive on the path".into()))?;
    Ok(head + tail)
}

/// Speed at the edge of the MOT1 region, starting from rest with the atoms
/// in the upper ground state (repumped by the MOT light).
pub fn entrance_velocity(beam: &BeamParams, species: &SpeciesParams, geometry: &Geometry) -> Result<f64> {
    let (v_rec, _) = recoil_quantities(species);
    let upper = effective_detuning(beam, species);
    let accel = |z: f64| {
        let s = beam.saturation_parameter(species, upper, z);
        beam.transverse_average_factor * 0.5 * species.gamma * v_rec * s + geometry.gravity
    };
    let work = adaptive_simpson(accel, 0.0, geometry.mot1_radius, QUADRATURE_TOLERANCE)?;
    Ok((2.0 * work).sqrt())
}

/// Constant-waist two-level estimate used for the qualitative efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelResult {
    pub score: f64,
    pub saturation: f64,
    pub v_final: f64,
    pub t_h_final: f64,
    /// |U₀| (J)
    pub depth: f64,
    pub travel_time: f64,
}

/// Two-level model: fixed waist w(0), cycling detuning, no pumping, gravity,
/// initial velocity or initial temperature.
pub fn two_level_efficiency(
    beam: &BeamParams,
    species: &SpeciesParams,
    geometry: &Geometry,
    f_exponent: f64,
) -> TwoLevelResult {
    let (v_rec, t_rec) = recoil_quantities(species);
    let s = beam.saturation_parameter(species, beam.detuning, 0.0);
    let rate = scattering_rate(s, species);
    let d = geometry.trap_separation;
    let v = (2.0 * rate * d * v_rec).sqrt();
    let t_h = v / v_rec * t_rec / 6.0;
    let depth = (0.5 * HBAR * beam.detuning * s).abs();
    let v_cap = capture_velocity(species, geometry);
    let trap = if depth > 0.0 { 2.0 * KB * t_h / depth } else { f64::INFINITY };
    let score = conditional(trap, f_exponent) * conditional(v / v_cap, f_exponent);
    let travel_time = if rate > 0.0 { (2.0 * d / (rate * v_rec)).sqrt() } else { f64::INFINITY };
    TwoLevelResult { score, saturation: s, v_final: v, t_h_final: t_h, depth, travel_time }
}

/// Figures of merit of one transfer configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    pub v0: f64,
    pub v_arrival: f64,
    pub travel_time: f64,
    pub z_out: Option<f64>,
    pub delta_r_out: Option<f64>,
    pub delta_r_arrival: f64,
    /// horizontal temperature at the guide exit (K)
    pub t_h_out: Option<f64>,
    /// time from the guide exit to MOT2 (s)
    pub fall_time: Option<f64>,
    pub eta: f64,
    pub v_capture: f64,
    pub two_level_score: f64,
    pub refined_score: f64,
    /// max |dω_p/dt|/ω_p² over the guided part
    pub adiabaticity_max: f64,
    pub validity_flags: Vec<ValidityFlag>,
}

/// The averaged transport model for one configuration, with its cached grid.
#[derive(Debug, Clone)]
pub struct Transport {
    species: SpeciesParams,
    beam: BeamParams,
    geometry: Geometry,
    options: ModelOptions,
    pumping: PumpingState,
    v0: f64,
    v_rec: f64,
    t_rec: f64,
    /// Γ v_rec s̄(z₀) z_R bracket χ
    push_scale: f64,
    /// (T_rec/6)(Γ/2) s̄(0), zero with heating off
    heating_rate: f64,
    grid: Vec<f64>,
    elapsed: Vec<f64>,
    exit: GuideExit,
    flags: Vec<ValidityFlag>,
}

impl Transport {
    pub fn new(species: &SpeciesParams, beam: &BeamParams, geometry: &Geometry, options: &ModelOptions) -> Result<Self> {
        let v0 = entrance_velocity(beam, species, geometry)?;
        Self::with_entrance_velocity(species, beam, geometry, options, v0)
    }

    pub fn with_entrance_velocity(
        species: &SpeciesParams,
        beam: &BeamParams,
        geometry: &Geometry,
        options: &ModelOptions,
        v0: f64,
    ) -> Result<Self> {
        species.validate()?;
        geometry.validate()?;
        options.validate()?;
        if !(v0 >= 0.0 && v0.is_finite()) {
            return Err(Error::invalid("entrance velocity must be finite and >= 0"));
        }
        let pumping = pumping_for(beam, species)?;
        if pumping.lower_detuning >= 0.0 {
            return Err(Error::ModelValidity(
                "beam is blue of the lower ground state; no attractive guide".into(),
            ));
        }
        let (v_rec, t_rec) = recoil_quantities(species);
        let d = geometry.trap_separation;

        // s̄ peaks at the focus, or at the path end closest to it
        let z_peak = beam.focus_position.clamp(0.0, d);
        let s_peak = lower_saturation(beam, species, &pumping, z_peak);
        if s_peak > LOW_SATURATION_LIMIT {
            return Err(Error::ModelValidity(format!(
                "lower-state saturation {s_peak:.3} exceeds {LOW_SATURATION_LIMIT} on the trajectory"
            )));
        }

        let mut flags = Vec::new();
        let upper = effective_detuning(beam, species);
        let mot1_peak = beam.focus_position.clamp(0.0, geometry.mot1_radius);
        if beam.saturation_parameter(species, upper, mot1_peak) > LOW_SATURATION_LIMIT {
            flags.push(ValidityFlag::UpperSaturationHigh);
        }
        if !pumping.valid {
            flags.push(ValidityFlag::EtaHigh);
        }
        if mean_detuning_questionable(upper) {
            flags.push(ValidityFlag::MeanDetuningSmall);
        }
        if beam.rayleigh_supplied {
            let r = beam.rayleigh_ratio(species.wavelength);
            if !(0.8..=1.25).contains(&r) {
                flags.push(ValidityFlag::RayleighNonIdeal);
            }
        }

        let s_focus = lower_saturation(beam, species, &pumping, beam.focus_position);
        let push_scale = species.gamma
            * v_rec
            * s_focus
            * beam.rayleigh_length
            * pumping.bracket(options.bracket)
            * beam.transverse_average_factor;
        let heating_rate = if options.heating {
            t_rec / 6.0 * 0.5 * species.gamma * lower_saturation(beam, species, &pumping, 0.0)
        } else {
            0.0
        };

        let mut t = Transport {
            species: species.clone(),
            beam: beam.clone(),
            geometry: geometry.clone(),
            options: options.clone(),
            pumping,
            v0,
            v_rec,
            t_rec,
            push_scale,
            heating_rate,
            grid: Vec::new(),
            elapsed: Vec::new(),
            exit: GuideExit { z_out: None, never_guided: false, reentry: false },
            flags,
        };
        t.build_grid()?;
        t.exit = guide_exit(|z| t.trap_excess(z), &t.grid)?;
        if t.exit.never_guided {
            t.flags.push(ValidityFlag::NeverGuided);
        }
        if t.exit.reentry {
            t.flags.push(ValidityFlag::GuideReentry);
        }
        if t.adiabaticity_max() >= 1.0 {
            t.flags.push(ValidityFlag::Nonadiabatic);
        }
        t.flags.sort();
        t.flags.dedup();
        Ok(t)
    }

    fn build_grid(&mut self) -> Result<()> {
        let n = self.options.grid_points;
        let d = self.geometry.trap_separation;
        self.grid = (0..n).map(|i| d * i as f64 / (n - 1) as f64).collect();
        self.grid[n - 1] = d;
        let inv = |z: f64| 1.0 / self.velocity(z);
        for &z in &self.grid[1..] {
            if !(self.velocity(z) > 0.0) {
                return Err(Error::Numerical(format!("velocity is not positive at z = {z}")));
            }
        }
        let mut elapsed = Vec::with_capacity(n);
        elapsed.push(0.0);
        let mut acc = 0.0;
        for (i, w) in self.grid.windows(2).enumerate() {
            let dt = if i == 0 {
                simpson_sqrt_endpoint(|z| if z == 0.0 && self.v0 == 0.0 { 0.0 } else { inv(z) }, w[0], w[1], 1e-10)?
            } else {
                adaptive_simpson(inv, w[0], w[1], 1e-10)?
            };
            acc += dt;
            elapsed.push(acc);
        }
        self.elapsed = elapsed;
        Ok(())
    }

    pub fn species(&self) -> &SpeciesParams {
        &self.species
    }

    pub fn beam(&self) -> &BeamParams {
        &self.beam
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn options(&self) -> &ModelOptions {
        &self.options
    }

    pub fn pumping(&self) -> &PumpingState {
        &self.pumping
    }

    pub fn entrance_velocity(&self) -> f64 {
        self.v0
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn exit(&self) -> GuideExit {
        self.exit
    }

    pub fn flags(&self) -> &[ValidityFlag] {
        &self.flags
    }

    /// v(z) by energy conservation in the pushing potential plus gravity.
    pub fn velocity(&self, z: f64) -> f64 {
        let v2 = self.v0 * self.v0 + 2.0 * self.geometry.gravity * z + self.push_scale * arctan_span(&self.beam, z);
        v2.max(0.0).sqrt()
    }

    /// Time to travel from MOT1 to height z (s).
    pub fn elapsed_time(&self, z: f64) -> f64 {
        let d = self.geometry.trap_separation;
        let z = z.clamp(0.0, d);
        let n = self.grid.len();
        let h = d / (n - 1) as f64;
        let i = ((z / h).floor() as usize).min(n - 2);
        let base = self.elapsed[i];
        let a = self.grid[i];
        if z <= a {
            return base;
        }
        let inv = |x: f64| 1.0 / self.velocity(x);
        let part = if i == 0 && self.v0 == 0.0 {
            simpson_sqrt_endpoint(|x| if x == 0.0 { 0.0 } else { inv(x) }, a, z, 1e-10)
        } else {
            adaptive_simpson(inv, a, z, 1e-10)
        };
        base + part.unwrap_or(f64::NAN)
    }

    /// Δt from MOT1 to MOT2 by direct adaptive quadrature.
    pub fn travel_time(&self) -> Result<f64> {
        travel_time_for(|z| self.velocity(z), self.geometry.trap_separation, QUADRATURE_TOLERANCE)
    }

    /// On-axis guide depth U₀(z) (J, negative).
    pub fn guide_depth(&self, z: f64) -> f64 {
        crate::light_atom::guide_depth(&self.beam, &self.species, &self.pumping, z)
    }

    /// w(0)²/w(z)², the adiabatic scaling factor.
    fn adiabatic_factor(&self, z: f64) -> f64 {
        let w0 = self.beam.waist_at(0.0);
        let w = self.beam.waist_at(z);
        (w0 * w0) / (w * w)
    }

    /// Guided-phase horizontal temperature (closed-form solution).
    pub fn horizontal_temperature(&self, z: f64) -> f64 {
        self.adiabatic_factor(z) * (self.options.initial_temperature + self.heating_rate * self.elapsed_time(z))
    }

    /// Same quantity from integrating the temperature ODE with RK4;
    /// returns (z, T_h) at `n_steps + 1` evenly spaced heights.
    pub fn horizontal_temperature_ode(&self, n_steps: usize) -> Vec<(f64, f64)> {
        let s_ratio = |z: f64| self.adiabatic_factor(z);
        let rhs = |z: f64, t: f64| {
            let w = self.beam.waist_at(z);
            -t * 2.0 * self.beam.waist_slope(z) / w + s_ratio(z) * self.heating_rate / self.velocity(z)
        };
        rk4(rhs, 0.0, self.options.initial_temperature, self.geometry.trap_separation, n_steps)
    }

    /// 2k_B T_h − |U₀|: negative while guided.
    fn trap_excess(&self, z: f64) -> f64 {
        2.0 * KB * self.horizontal_temperature(z) - self.guide_depth(z).abs()
    }

    /// Harmonic transverse frequency ω_p(z).
    pub fn transverse_frequency(&self, z: f64) -> Result<f64> {
        crate::light_atom::transverse_frequency(&self.beam, &self.species, &self.pumping, z)
    }

    /// |dω_p/dt|/ω_p² at height z; infinite when there is no guide.
    pub fn adiabaticity(&self, z: f64) -> f64 {
        match self.transverse_frequency(z) {
            Ok(omega) => {
                let w = self.beam.waist_at(z);
                2.0 * self.beam.waist_slope(z).abs() * self.velocity(z) / (w * omega)
            }
            Err(_) => f64::INFINITY,
        }
    }

    /// Largest adiabaticity parameter over the guided heights.
    pub fn adiabaticity_max(&self) -> f64 {
        let end = match self.exit.z_out {
            Some(z) => z,
            None => self.geometry.trap_separation,
        };
        if self.exit.never_guided {
            return 0.0;
        }
        self.grid
            .iter()
            .take_while(|&&z| z <= end)
            .map(|&z| self.adiabaticity(z))
            .fold(0.0, f64::max)
    }

    /// Horizontal temperature with the post-exit freeze applied.
    pub fn temperature_at(&self, z: f64) -> f64 {
        match self.exit.z_out {
            Some(z_out) if z > z_out => self.horizontal_temperature(z_out),
            _ => self.horizontal_temperature(z),
        }
    }

    /// rms transverse radius along the path.
    pub fn cloud_radius(&self, z: f64) -> f64 {
        let m = self.species.mass;
        match self.exit.z_out {
            Some(z_out) if z >= z_out => {
                let r_out = self.beam.waist_at(z_out) / 8f64.sqrt();
                let t_out = self.horizontal_temperature(z_out);
                let t = self.elapsed_time(z) - self.elapsed_time(z_out);
                (r_out * r_out + KB * t_out / m * t * t).sqrt()
            }
            _ => {
                let omega = self.transverse_frequency(z).unwrap_or(f64::NAN);
                (KB * self.horizontal_temperature(z) / m).sqrt() / omega
            }
        }
    }

    pub fn state_at(&self, z: f64) -> TransportState {
        let guided = match self.exit.z_out {
            Some(z_out) => z < z_out,
            None => true,
        };
        TransportState {
            z,
            v: self.velocity(z),
            t_h: self.temperature_at(z),
            delta_r: self.cloud_radius(z),
            depth: self.guide_depth(z).abs(),
            guided,
        }
    }

    pub fn profile(&self) -> Result<TransportProfile> {
        let samples: Vec<TransportState> = self.grid.iter().map(|&z| self.state_at(z)).collect();
        let arrival = *samples.last().expect("grid has at least two nodes");
        Ok(TransportProfile { samples, z_out: self.exit.z_out, arrival, travel_time: self.travel_time()? })
    }

    pub fn report(&self) -> Result<EfficiencyReport> {
        let d = self.geometry.trap_separation;
        let n = self.options.f_exponent;
        let v_arrival = self.velocity(d);
        let delta_r_arrival = self.cloud_radius(d);
        let v_capture = capture_velocity(&self.species, &self.geometry);
        let refined_score = conditional(delta_r_arrival / self.geometry.mot2_radius, n) * conditional(v_arrival / v_capture, n);
        let two_level = two_level_efficiency(&self.beam, &self.species, &self.geometry, n);
        let (delta_r_out, t_h_out, fall_time) = match self.exit.z_out {
            Some(z_out) => (
                Some(self.beam.waist_at(z_out) / 8f64.sqrt()),
                Some(self.horizontal_temperature(z_out)),
                Some(self.elapsed_time(d) - self.elapsed_time(z_out)),
            ),
            None => (None, None, None),
        };
        Ok(EfficiencyReport {
            v0: self.v0,
            v_arrival,
            travel_time: self.travel_time()?,
            z_out: self.exit.z_out,
            delta_r_out,
            delta_r_arrival,
            t_h_out,
            fall_time,
            eta: self.pumping.eta,
            v_capture,
            two_level_score: two_level.score,
            refined_score,
            adiabaticity_max: self.adiabaticity_max(),
            validity_flags: self.flags.clone(),
        })
    }

    /// Recoil velocity and temperature of the species.
    pub fn recoil(&self) -> (f64, f64) {
        (self.v_rec, self.t_rec)
    }
}

/// Full-model efficiency in one call.
pub fn refined_efficiency(
    beam: &BeamParams,
    species: &SpeciesParams,
    geometry: &Geometry,
    options: &ModelOptions,
) -> Result<EfficiencyReport> {
    Transport::new(species, beam, geometry, options)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;

    fn rb() -> (SpeciesParams, BeamParams, Geometry, ModelOptions) {
        let s = SpeciesParams::rubidium_87();
        let b = BeamParams::new(0.021, angular(-1e9), 300e-6, -0.13, Some(0.26), s.wavelength).unwrap();
        let g = Geometry::new(0.72, 4e-3, 0.01).unwrap();
        (s, b, g, ModelOptions::with_temperature(40e-6))
    }

    #[test]
    fn conditional_function() {
        assert_eq!(conditional(0.0, 10.0), 1.0);
        assert_eq!(conditional(1.0, 10.0), 0.5);
        assert_eq!(conditional(f64::INFINITY, 10.0), 0.0);
        assert!(conditional(2.0, 10.0) < 1e-3);
    }

    #[test]
    fn free_fall_limits() {
        let (s, b, g, o) = rb();
        let dark = b.with_power(0.0);
        let v0 = entrance_velocity(&dark, &s, &g).unwrap();
        assert_relative_eq!(v0, (2.0 * 9.81 * 0.01f64).sqrt(), max_relative = 1e-10);

        let t = Transport::with_entrance_velocity(&s, &dark, &g, &o, 0.0).unwrap();
        for z in [0.0, 0.1, 0.5, 0.72] {
            assert_relative_eq!(t.velocity(z), (2.0 * 9.81 * z).sqrt(), max_relative = 1e-12);
        }
        // falling from rest: t = sqrt(2D/g)
        assert_relative_eq!(t.travel_time().unwrap(), (2.0 * 0.72 / 9.81f64).sqrt(), max_relative = 1e-7);
        assert_relative_eq!(t.elapsed_time(0.72), (2.0 * 0.72 / 9.81f64).sqrt(), max_relative = 1e-7);
        assert!(t.exit().never_guided);
    }

    #[test]
    fn constant_velocity_travel_time() {
        let t = travel_time_for(|_| 7.0, 0.5, 1e-10).unwrap();
        assert_relative_eq!(t, 0.5 / 7.0, max_relative = 1e-14);
        assert!(travel_time_for(|z| 1.0 - z, 2.0, 1e-8).is_err());
    }

    #[test]
    fn elapsed_time_is_consistent_with_quadrature() {
        let (s, b, g, o) = rb();
        let t = Transport::new(&s, &b, &g, &o).unwrap();
        for z in [0.0123, 0.25, 0.5001, 0.72] {
            let direct = adaptive_simpson(|x| 1.0 / t.velocity(x), 0.0, z, 1e-12).unwrap();
            assert_relative_eq!(t.elapsed_time(z), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn deep_guide_never_exits() {
        let (s, b, g, o) = rb();
        let t = Transport::new(&s, &b, &g, &o).unwrap();
        let exit = guide_exit(|z| 2.0 * KB * t.horizontal_temperature(z) - 1e6 * t.guide_depth(z).abs(), t.grid()).unwrap();
        assert_eq!(exit.z_out, None);
        assert!(!exit.never_guided);
    }

    #[test]
    fn exit_before_start_is_flagged() {
        let grid = [0.0, 0.1, 0.2];
        let exit = guide_exit(|_| 1.0, &grid).unwrap();
        assert_eq!(exit.z_out, Some(0.0));
        assert!(exit.never_guided);
        let exit = guide_exit(|z| if (0.05..0.15).contains(&z) { 1.0 } else { -1.0 }, &[0.0, 0.1, 0.2]).unwrap();
        assert!(exit.reentry);
    }

    #[test]
    fn cloud_radius_continuous_at_exit() {
        let (s, b, g, o) = rb();
        let t = Transport::new(&s, &b, &g, &o).unwrap();
        let z_out = t.exit().z_out.unwrap();
        let below = t.cloud_radius(z_out - 1e-9);
        let at = t.cloud_radius(z_out);
        assert_relative_eq!(below, at, max_relative = 1e-5);
        assert_relative_eq!(at / b.waist_at(z_out), 1.0 / 8f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn two_level_reference_points() {
        let s = SpeciesParams::cesium_133();
        let g = Geometry::new(0.57, 4e-3, 0.01).unwrap();
        let b = BeamParams::new(0.046, angular(-3e9), 650e-6, 0.0, Some(1.5), s.wavelength).unwrap();
        let r = two_level_efficiency(&b, &s, &g, 10.0);
        assert!(r.score > 0.0 && r.score <= 1.0);
        let (v_rec, t_rec) = recoil_quantities(&s);
        assert_relative_eq!(r.t_h_final, r.v_final / v_rec * t_rec / 6.0);
        assert_relative_eq!(r.travel_time, 2.0 * 0.57 / r.v_final, max_relative = 1e-12);
    }

    #[test]
    fn blue_of_lower_state_is_rejected() {
        let (s, b, g, o) = rb();
        let mut blue = b.clone();
        blue.detuning = angular(8e9);
        assert!(matches!(Transport::new(&s, &blue, &g, &o), Err(Error::ModelValidity(_))));
    }

    #[test]
    fn saturated_lower_state_is_rejected() {
        let (s, b, g, o) = rb();
        let hot = b.with_power(5.0);
        assert!(matches!(Transport::new(&s, &hot, &g, &o), Err(Error::ModelValidity(_))));
    }
}
