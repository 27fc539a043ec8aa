//! Event-level Monte Carlo of single atoms in the diverging guide.
//!
//! Each atom is propagated with velocity Verlet in the dipole potential
//! U₀(z)·exp(−2r²/w(z)²) plus gravity. Photon scattering is sampled as a
//! Poisson number of events per step; each event picks the ground state it
//! happened in from the stationary populations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::light_atom::{guide_depth, lower_saturation, transverse_frequency, PumpingBracket, PumpingState};
use crate::species::{recoil_quantities, Geometry, SpeciesParams};
use crate::units::KB;

/// Largest accepted expected number of scatterings per step.
pub const MAX_EVENTS_PER_STEP: f64 = 0.5;

/// Default expected number of scatterings per step.
pub const DEFAULT_EVENTS_PER_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ForceModel {
    /// On-axis scattering rate, push kicks thinned by the transverse-average
    /// factor and recoil heating from lower-state events only. This is the
    /// event-level version of the averaged analytic model.
    #[default]
    Averaged,
    /// Scattering at the local intensity, every event pushes and every event
    /// recoils.
    Local,
}

impl std::str::FromStr for ForceModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "averaged" => Ok(ForceModel::Averaged),
            "local" => Ok(ForceModel::Local),
            other => Err(Error::invalid(format!("unknown force model '{other}' (averaged|local)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub n_atoms: usize,
    pub seed: u64,
    /// None picks 0.1 expected scatterings per step at the brightest point
    pub time_step: Option<f64>,
    pub initial_temperature: f64,
    /// transverse rms of the initial cloud; None matches the guide at z = 0
    pub initial_radius: Option<f64>,
    /// heights where the ensemble is sampled; D is always added
    pub record_grid: Vec<f64>,
    pub force_model: ForceModel,
    pub bracket: PumpingBracket,
    /// dipole force on/off
    pub guide: bool,
    /// photon scattering on/off
    pub scattering: bool,
}

impl McConfig {
    pub fn new(n_atoms: usize, seed: u64, initial_temperature: f64) -> Self {
        McConfig {
            n_atoms,
            seed,
            time_step: None,
            initial_temperature,
            initial_radius: None,
            record_grid: Vec::new(),
            force_model: ForceModel::Averaged,
            bracket: PumpingBracket::Exact,
            guide: true,
            scattering: true,
        }
    }

    /// `n` evenly spaced heights on (0, D].
    pub fn with_even_grid(mut self, n: usize, trap_separation: f64) -> Self {
        let n = n.max(1);
        self.record_grid = (1..=n).map(|i| trap_separation * i as f64 / n as f64).collect();
        self.record_grid[n - 1] = trap_separation;
        self
    }
}

/// Ground state of the atom at its last scattering event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundState {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McAtom {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub ground_state: GroundState,
}

/// Ensemble statistics at one record height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McRecord {
    pub z: f64,
    /// atoms that reached this height
    pub n: usize,
    pub mean_vz: f64,
    pub stderr_vz: f64,
    /// M⟨v⊥²⟩/(2k_B)
    pub t_h_kinetic: f64,
    /// ⟨½Mv⊥² + U(r,z) − U₀(z)⟩/(2k_B), the harmonic-equivalent temperature
    pub t_h_energy: f64,
    /// √(⟨x² + y²⟩/2)
    pub rms_radius: f64,
    /// fraction with negative transverse energy in the guide
    pub fraction_bound: f64,
    /// energy temperature of the bound atoms only
    pub t_h_bound: f64,
    /// rms radius of the bound atoms only
    pub rms_radius_bound: f64,
    /// atoms with r < R at this height
    pub n_captured: usize,
    pub mean_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McStats {
    pub n_atoms: usize,
    pub time_step: f64,
    pub records: Vec<McRecord>,
    /// statistics at z = D
    pub arrival: McRecord,
    /// fraction of all atoms arriving with r < R
    pub capture_fraction: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sample {
    vz: f64,
    v_perp2: f64,
    e_perp: f64,
    r2: f64,
    t: f64,
}

/// Everything the integrator needs, precomputed once per ensemble.
struct Field<'a> {
    beam: &'a BeamParams,
    species: &'a SpeciesParams,
    geometry: &'a Geometry,
    config: &'a McConfig,
    v_rec: f64,
    /// s̄ at the focus
    s_focus: f64,
    /// U₀ at the focus (zero with the guide off)
    u_focus: f64,
    /// lower-state events per unit s̄
    lower_per_s: f64,
    /// upper-state events per unit s̄
    upper_per_s: f64,
    push_probability: f64,
}

/// Beam quantities at one height, all from w(z)²/w₀².
#[derive(Clone, Copy)]
struct Slice {
    /// w(z)²
    w2: f64,
    /// (dw/dz)/w
    log_slope: f64,
    /// U₀(z)
    u0: f64,
    /// on-axis s̄(z)
    s: f64,
}

impl<'a> Field<'a> {
    fn new(
        config: &'a McConfig,
        beam: &'a BeamParams,
        species: &'a SpeciesParams,
        pumping: &PumpingState,
        geometry: &'a Geometry,
    ) -> Self {
        let (v_rec, _) = recoil_quantities(species);
        let half_gamma = 0.5 * species.gamma;
        let lower_per_s = half_gamma * (1.0 - pumping.eta);
        let total_per_s = half_gamma * pumping.bracket(config.bracket);
        Field {
            beam,
            species,
            geometry,
            config,
            v_rec,
            s_focus: lower_saturation(beam, species, pumping, beam.focus_position),
            u_focus: if config.guide { guide_depth(beam, species, pumping, beam.focus_position) } else { 0.0 },
            lower_per_s,
            upper_per_s: (total_per_s - lower_per_s).max(0.0),
            push_probability: match config.force_model {
                ForceModel::Averaged => beam.transverse_average_factor.min(1.0),
                ForceModel::Local => 1.0,
            },
        }
    }
}

impl Field<'_> {
    fn slice(&self, z: f64) -> Slice {
        let b = self.beam;
        let x = (z - b.focus_position) / b.rayleigh_length;
        let spread = 1.0 + x * x;
        Slice {
            w2: b.waist_min * b.waist_min * spread,
            log_slope: x / (b.rayleigh_length * spread),
            u0: self.u_focus / spread,
            s: self.s_focus / spread,
        }
    }

    fn acceleration(&self, p: &[f64; 3], sl: &Slice) -> [f64; 3] {
        let g = self.geometry.gravity;
        if !self.config.guide {
            return [0.0, 0.0, g];
        }
        let r2 = p[0] * p[0] + p[1] * p[1];
        let u = sl.u0 * (-2.0 * r2 / sl.w2).exp();
        let m = self.species.mass;
        let radial = 4.0 * u / (sl.w2 * m);
        let dudz = u * 2.0 * sl.log_slope * (2.0 * r2 / sl.w2 - 1.0);
        [radial * p[0], radial * p[1], -dudz / m + g]
    }

    /// Total event rate and the fraction of events in the lower state.
    fn rates(&self, p: &[f64; 3], sl: &Slice) -> (f64, f64) {
        if !self.config.scattering {
            return (0.0, 1.0);
        }
        let mut s = sl.s;
        if self.config.force_model == ForceModel::Local {
            s *= (-2.0 * (p[0] * p[0] + p[1] * p[1]) / sl.w2).exp();
        }
        let total = self.lower_per_s + self.upper_per_s;
        (total * s, self.lower_per_s / total)
    }

    fn max_rate(&self) -> f64 {
        if !self.config.scattering {
            return 0.0;
        }
        let z_peak = self.beam.focus_position.clamp(0.0, self.geometry.trap_separation);
        (self.lower_per_s + self.upper_per_s) * self.slice(z_peak).s
    }

    fn transverse_energy(&self, p: &[f64; 3], v: &[f64; 3]) -> f64 {
        let sl = self.slice(p[2]);
        let r2 = p[0] * p[0] + p[1] * p[1];
        let u = sl.u0 * (-2.0 * r2 / sl.w2).exp();
        0.5 * self.species.mass * (v[0] * v[0] + v[1] * v[1]) + u - sl.u0
    }

    /// One velocity-Verlet step; `a` holds the acceleration at the current
    /// position on entry and at the new one on return.
    fn verlet_step(&self, atom: &mut McAtom, a: &mut [f64; 3], dt: f64) -> Slice {
        for i in 0..3 {
            atom.position[i] += atom.velocity[i] * dt + 0.5 * a[i] * dt * dt;
        }
        let sl = self.slice(atom.position[2]);
        let a_new = self.acceleration(&atom.position, &sl);
        for i in 0..3 {
            atom.velocity[i] += 0.5 * (a[i] + a_new[i]) * dt;
        }
        *a = a_new;
        sl
    }

    fn depth(&self, z: f64) -> f64 {
        self.slice(z).u0.abs()
    }
}

fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as u64
}

/// Runs the ensemble. Results depend only on `config` and the physics inputs,
/// never on the number of worker threads.
pub fn run_ensemble(
    config: &McConfig,
    beam: &BeamParams,
    species: &SpeciesParams,
    pumping: &PumpingState,
    geometry: &Geometry,
    entrance_velocity: f64,
) -> Result<McStats> {
    if config.n_atoms == 0 {
        return Err(Error::invalid("mc.n_atoms must be at least 1"));
    }
    if !(config.initial_temperature >= 0.0 && config.initial_temperature.is_finite()) {
        return Err(Error::invalid("initial temperature must be >= 0"));
    }
    let d = geometry.trap_separation;
    let mut grid: Vec<f64> = config.record_grid.iter().copied().filter(|&z| z > 0.0 && z < d).collect();
    if config.record_grid.iter().any(|&z| !(z > 0.0 && z <= d)) {
        return Err(Error::invalid("record heights must lie in (0, D]"));
    }
    grid.push(d);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let field = Field::new(config, beam, species, pumping, geometry);

    let max_rate = field.max_rate();
    let dt = match config.time_step {
        Some(dt) => {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::invalid("time step must be positive"));
            }
            dt
        }
        None if max_rate > 0.0 => DEFAULT_EVENTS_PER_STEP / max_rate,
        // no scattering: resolve the transverse oscillation instead
        None => match transverse_frequency(beam, species, pumping, 0.0) {
            Ok(omega) if config.guide => 0.01 / omega,
            _ => 1e-5,
        },
    };
    if max_rate * dt > MAX_EVENTS_PER_STEP {
        return Err(Error::invalid(format!(
            "time step {dt:e} s gives {:.2} scatterings per step (limit {MAX_EVENTS_PER_STEP})",
            max_rate * dt
        )));
    }

    let sigma_r = match config.initial_radius {
        Some(r) if r >= 0.0 => r,
        Some(_) => return Err(Error::invalid("initial radius must be >= 0")),
        None => {
            let omega = transverse_frequency(beam, species, pumping, 0.0).map_err(|_| {
                Error::invalid("initial radius must be given when there is no guide")
            })?;
            (KB * config.initial_temperature / species.mass).sqrt() / omega
        }
    };
    let sigma_v = (KB * config.initial_temperature / species.mass).sqrt();
    // generous bound: several free-fall times from rest
    let t_max = 5.0 * (2.0 * d / geometry.gravity.max(1.0)).sqrt() + 10.0 * d / entrance_velocity.max(1.0);
    let max_steps = (t_max / dt).ceil() as u64;

    let per_atom: Vec<Vec<Option<Sample>>> = (0..config.n_atoms)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            propagate(&field, &grid, &mut rng, sigma_r, sigma_v, entrance_velocity, dt, max_steps)
        })
        .collect();

    let m = species.mass;
    let records: Vec<McRecord> = grid
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let mut n = 0usize;
            let (mut svz, mut svz2, mut sv2, mut se, mut sr2, mut st) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            let mut bound = 0usize;
            let (mut se_b, mut sr2_b) = (0.0, 0.0);
            let mut captured = 0usize;
            for atom in &per_atom {
                if let Some(s) = atom[k] {
                    n += 1;
                    svz += s.vz;
                    svz2 += s.vz * s.vz;
                    sv2 += s.v_perp2;
                    se += s.e_perp;
                    sr2 += s.r2;
                    st += s.t;
                    if s.e_perp < field.depth(z) {
                        bound += 1;
                        se_b += s.e_perp;
                        sr2_b += s.r2;
                    }
                    if s.r2 < geometry.mot2_radius * geometry.mot2_radius {
                        captured += 1;
                    }
                }
            }
            let nf = n as f64;
            let mean_vz = if n > 0 { svz / nf } else { f64::NAN };
            let var = if n > 1 { (svz2 - nf * mean_vz * mean_vz).max(0.0) / (nf - 1.0) } else { f64::NAN };
            McRecord {
                z,
                n,
                mean_vz,
                stderr_vz: (var / nf).sqrt(),
                t_h_kinetic: m * sv2 / nf / (2.0 * KB),
                t_h_energy: se / nf / (2.0 * KB),
                rms_radius: (sr2 / nf / 2.0).sqrt(),
                fraction_bound: bound as f64 / nf,
                t_h_bound: se_b / bound as f64 / (2.0 * KB),
                rms_radius_bound: (sr2_b / bound as f64 / 2.0).sqrt(),
                n_captured: captured,
                mean_time: st / nf,
            }
        })
        .collect();
    let arrival = *records.last().expect("grid contains D");
    Ok(McStats {
        n_atoms: config.n_atoms,
        time_step: dt,
        capture_fraction: arrival.n_captured as f64 / config.n_atoms as f64,
        records,
        arrival,
    })
}

#[allow(clippy::too_many_arguments)]
fn propagate(
    field: &Field,
    grid: &[f64],
    rng: &mut ChaCha8Rng,
    sigma_r: f64,
    sigma_v: f64,
    v0: f64,
    dt: f64,
    max_steps: u64,
) -> Vec<Option<Sample>> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut atom = McAtom {
        position: [sigma_r * normal.sample(rng), sigma_r * normal.sample(rng), 0.0],
        velocity: [sigma_v * normal.sample(rng), sigma_v * normal.sample(rng), v0 + sigma_v * normal.sample(rng)],
        ground_state: GroundState::Lower,
    };
    let mut out = vec![None; grid.len()];
    let mut next = 0usize;
    let mut a = field.acceleration(&atom.position, &field.slice(atom.position[2]));
    let mut t = 0.0;
    for _ in 0..max_steps {
        let p_old = atom.position;
        let v_old = atom.velocity;
        let sl = field.verlet_step(&mut atom, &mut a, dt);

        let (rate, lower_fraction) = field.rates(&atom.position, &sl);
        for _ in 0..poisson_count(rng, rate * dt) {
            let is_lower = lower_fraction >= 1.0 || rng.random::<f64>() < lower_fraction;
            atom.ground_state = if is_lower { GroundState::Lower } else { GroundState::Upper };
            if field.push_probability >= 1.0 || rng.random::<f64>() < field.push_probability {
                atom.velocity[2] += field.v_rec;
            }
            if is_lower || field.config.force_model == ForceModel::Local {
                let dir: [f64; 3] = UnitSphere.sample(rng);
                for i in 0..3 {
                    atom.velocity[i] += field.v_rec * dir[i];
                }
            }
        }
        t += dt;

        while next < grid.len() && atom.position[2] >= grid[next] {
            let zr = grid[next];
            let span = atom.position[2] - p_old[2];
            let f = if span > 0.0 { (zr - p_old[2]) / span } else { 1.0 };
            let p = [
                p_old[0] + f * (atom.position[0] - p_old[0]),
                p_old[1] + f * (atom.position[1] - p_old[1]),
                zr,
            ];
            let v = [
                v_old[0] + f * (atom.velocity[0] - v_old[0]),
                v_old[1] + f * (atom.velocity[1] - v_old[1]),
                v_old[2] + f * (atom.velocity[2] - v_old[2]),
            ];
            out[next] = Some(Sample {
                vz: v[2],
                v_perp2: v[0] * v[0] + v[1] * v[1],
                e_perp: field.transverse_energy(&p, &v),
                r2: p[0] * p[0] + p[1] * p[1],
                t: t - dt + f * dt,
            });
            next += 1;
        }
        if next == grid.len() {
            break;
        }
    }
    out
}

/// Linear fit of heating in a fixed 2D harmonic trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatingFit {
    /// fitted dT_h/dt (K/s)
    pub slope: f64,
    /// Γ'·T_rec/6
    pub expected: f64,
}

/// Atoms in a fixed isotropic 2D harmonic trap scatter at constant `rate`
/// with one uniformly oriented recoil per event; the energy-based horizontal
/// temperature is recorded and fitted against time.
pub fn heating_calibration(
    species: &SpeciesParams,
    rate: f64,
    omega: f64,
    n_atoms: usize,
    seed: u64,
    duration: f64,
    n_records: usize,
) -> Result<HeatingFit> {
    if !(rate > 0.0 && omega > 0.0 && duration > 0.0) || n_atoms < 2 || n_records < 2 {
        return Err(Error::invalid("heating calibration needs positive rate, frequency and duration"));
    }
    let (v_rec, t_rec) = recoil_quantities(species);
    let m = species.mass;
    let dt = (DEFAULT_EVENTS_PER_STEP / rate).min(0.01 / omega);
    let steps = (duration / dt).ceil() as usize;
    let every = (steps / n_records).max(1);
    let energies: Vec<Vec<f64>> = (0..n_atoms)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut p = [0.0f64; 2];
            let mut v = [0.0f64; 2];
            let mut e = Vec::with_capacity(n_records + 1);
            for step in 1..=steps {
                for k in 0..2 {
                    let acc = -omega * omega * p[k];
                    v[k] += 0.5 * acc * dt;
                    p[k] += v[k] * dt;
                    v[k] += 0.5 * (-omega * omega * p[k]) * dt;
                }
                for _ in 0..poisson_count(&mut rng, rate * dt) {
                    let dir: [f64; 3] = UnitSphere.sample(&mut rng);
                    v[0] += v_rec * dir[0];
                    v[1] += v_rec * dir[1];
                }
                if step % every == 0 {
                    let r2 = p[0] * p[0] + p[1] * p[1];
                    let v2 = v[0] * v[0] + v[1] * v[1];
                    e.push(0.5 * m * (v2 + omega * omega * r2));
                }
            }
            e
        })
        .collect();
    let n_pts = energies[0].len();
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..n_pts {
        let t = ((j + 1) * every) as f64 * dt;
        let temp = energies.iter().map(|e| e[j]).sum::<f64>() / n_atoms as f64 / (2.0 * KB);
        sx += t;
        sy += temp;
        sxx += t * t;
        sxy += t * temp;
    }
    let n = n_pts as f64;
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(HeatingFit { slope, expected: rate * t_rec / 6.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::light_atom::pumping_for;
    use crate::units::angular;
    use approx::assert_relative_eq;

    fn rb() -> (SpeciesParams, BeamParams, Geometry, PumpingState) {
        let s = SpeciesParams::rubidium_87();
        let b = BeamParams::new(0.021, angular(-1e9), 300e-6, -0.13, Some(0.26), s.wavelength).unwrap();
        let g = Geometry::new(0.72, 4e-3, 0.01).unwrap();
        let p = pumping_for(&b, &s).unwrap();
        (s, b, g, p)
    }

    #[test]
    fn free_fall_point_source_stays_on_axis() {
        let (s, b, g, p) = rb();
        let mut c = McConfig::new(20, 1, 0.0).with_even_grid(5, g.trap_separation);
        c.guide = false;
        c.scattering = false;
        c.initial_radius = Some(0.0);
        let st = run_ensemble(&c, &b, &s, &p, &g, 0.0).unwrap();
        for r in &st.records {
            assert_eq!(r.n, 20);
            assert_eq!(r.rms_radius, 0.0);
            assert_relative_eq!(r.mean_vz, (2.0 * 9.81 * r.z).sqrt(), max_relative = 1e-6);
        }
    }

    #[test]
    fn coarse_step_is_rejected() {
        let (s, b, g, p) = rb();
        let mut c = McConfig::new(1, 1, 40e-6);
        c.time_step = Some(1e-3);
        assert!(run_ensemble(&c, &b, &s, &p, &g, 9.0).is_err());
    }

    #[test]
    fn same_seed_same_stats() {
        let (s, b, g, p) = rb();
        let c = McConfig::new(16, 7, 40e-6).with_even_grid(4, g.trap_separation);
        let a = run_ensemble(&c, &b, &s, &p, &g, 9.0).unwrap();
        let b2 = run_ensemble(&c, &b, &s, &p, &g, 9.0).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b2:?}"));
        let other = run_ensemble(&McConfig { seed: 8, ..c }, &b, &s, &p, &g, 9.0).unwrap();
        assert_ne!(a.arrival.mean_vz, other.arrival.mean_vz);
    }

    #[test]
    fn energy_conserved_without_scattering() {
        let (s, b, g, p) = rb();
        let mut c = McConfig::new(1, 1, 40e-6);
        c.scattering = false;
        let field = Field::new(&c, &b, &s, &p, &g);
        let omega = transverse_frequency(&b, &s, &p, 0.0).unwrap();
        let m = s.mass;
        let energy = |at: &McAtom| {
            let sl = field.slice(at.position[2]);
            let r2 = at.position[0].powi(2) + at.position[1].powi(2);
            let v2: f64 = at.velocity.iter().map(|v| v * v).sum();
            0.5 * m * v2 + sl.u0 * (-2.0 * r2 / sl.w2).exp() - m * g.gravity * at.position[2]
        };
        let mut atom = McAtom { position: [60e-6, -20e-6, 0.0], velocity: [2e-3, 5e-3, 9.0], ground_state: GroundState::Lower };
        let scale = field.depth(0.0);
        let e0 = energy(&atom);
        let period = std::f64::consts::TAU / omega;
        let dt = period / 2000.0;
        let mut a = field.acceleration(&atom.position, &field.slice(0.0));
        let mut worst: f64 = 0.0;
        let mut periods = 0.0;
        while atom.position[2] < g.trap_separation {
            field.verlet_step(&mut atom, &mut a, dt);
            worst = worst.max((energy(&atom) - e0).abs() / scale);
            periods += 1.0 / 2000.0;
        }
        assert!(periods > 5.0, "{periods}");
        assert!(worst < 1e-6 * periods, "drift {worst:e} over {periods} periods");
    }

    #[test]
    fn parse_force_model() {
        assert_eq!("local".parse::<ForceModel>().unwrap(), ForceModel::Local);
        assert!("sideways".parse::<ForceModel>().is_err());
    }
}
