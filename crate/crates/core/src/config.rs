//! Flat `key = value [unit]` configuration files.
//!
//! Keys carry their default unit as a suffix (`beam.power_mW`); a trailing
//! unit tag of the same dimension overrides it. Custom species fields have no
//! suffix and always need a tag.

use serde::Serialize;

use crate::beam::BeamParams;
use crate::error::{Error, Result};
use crate::monte_carlo::{ForceModel, McConfig};
use crate::species::{Geometry, SpeciesParams};
use crate::sweep::{FreeParam, Objective, OptimizeSpec, Param, ParamKey, Scenario, SweepAxis, SweepSpec};
use crate::transport::ModelOptions;
use crate::light_atom::PumpingBracket;
use crate::units::{Dimension, Unit, GRAVITY};

const CS_PAPER: &str = include_str!("../configs/cs_paper.cfg");
const RB_PAPER: &str = include_str!("../configs/rb_paper.cfg");

/// Text of a bundled configuration by name.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "cs_paper" | "cs_paper.cfg" => Some(CS_PAPER),
        "rb_paper" | "rb_paper.cfg" => Some(RB_PAPER),
        _ => None,
    }
}

pub const BUNDLED_NAMES: [&str; 2] = ["cs_paper", "rb_paper"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    /// physical quantity; `Some(unit)` when the key has a default unit suffix
    Quantity(Dimension, Option<&'static str>),
    Number,
    Integer,
    Flag,
    Text,
    Axis,
    Free,
}

const KEYS: &[(&str, Kind)] = &[
    ("species", Kind::Text),
    ("species.name", Kind::Text),
    ("species.gamma", Kind::Quantity(Dimension::AngularFrequency, None)),
    ("species.wavelength", Kind::Quantity(Dimension::Length, None)),
    ("species.mass", Kind::Quantity(Dimension::Mass, None)),
    ("species.hfs_ground", Kind::Quantity(Dimension::AngularFrequency, None)),
    ("species.hfs_excited", Kind::Quantity(Dimension::AngularFrequency, None)),
    ("species.f_lower", Kind::Integer),
    ("beam.power_mW", Kind::Quantity(Dimension::Power, Some("mW"))),
    ("beam.detuning_GHz", Kind::Quantity(Dimension::AngularFrequency, Some("GHz"))),
    ("beam.waist_um", Kind::Quantity(Dimension::Length, Some("um"))),
    ("beam.focus_cm", Kind::Quantity(Dimension::Length, Some("cm"))),
    ("beam.rayleigh_mm", Kind::Quantity(Dimension::Length, Some("mm"))),
    ("beam.polarization_factor", Kind::Number),
    ("beam.transverse_average_factor", Kind::Number),
    ("geometry.separation_mm", Kind::Quantity(Dimension::Length, Some("mm"))),
    ("geometry.mot2_radius_mm", Kind::Quantity(Dimension::Length, Some("mm"))),
    ("geometry.mot1_radius_mm", Kind::Quantity(Dimension::Length, Some("mm"))),
    ("geometry.gravity", Kind::Quantity(Dimension::Acceleration, Some("m/s2"))),
    ("model.T0_uK", Kind::Quantity(Dimension::Temperature, Some("uK"))),
    ("model.bracket", Kind::Text),
    ("model.f_exponent", Kind::Number),
    ("model.grid_points", Kind::Integer),
    ("model.heating", Kind::Flag),
    ("mc.n_atoms", Kind::Integer),
    ("mc.seed", Kind::Integer),
    ("mc.time_step_us", Kind::Quantity(Dimension::Time, Some("us"))),
    ("mc.initial_radius_um", Kind::Quantity(Dimension::Length, Some("um"))),
    ("mc.record_points", Kind::Integer),
    ("mc.force_model", Kind::Text),
    ("sweep.axis1", Kind::Axis),
    ("sweep.axis2", Kind::Axis),
    ("sweep.axis3", Kind::Axis),
    ("sweep.objective", Kind::Text),
    ("optimize.param1", Kind::Free),
    ("optimize.param2", Kind::Free),
    ("optimize.param3", Kind::Free),
    ("optimize.param4", Kind::Free),
    ("optimize.objective", Kind::Text),
    ("optimize.max_evals", Kind::Integer),
    ("optimize.tolerance", Kind::Number),
    ("rates.L1_per_s", Kind::Number),
    ("rates.tau_s", Kind::Quantity(Dimension::Time, Some("s"))),
    ("rates.gamma_per_s", Kind::Quantity(Dimension::Rate, Some("1/s"))),
    ("rates.N1_push", Kind::Number),
    ("rates.L2_per_s", Kind::Number),
    ("rates.push_loss_per_s", Kind::Quantity(Dimension::Rate, Some("1/s"))),
    ("rates.beta_cm3_per_s", Kind::Number),
    ("rates.density_per_cm3", Kind::Number),
];

/// Keys without which a model configuration cannot be built.
pub const REQUIRED_KEYS: [&str; 7] = [
    "species",
    "beam.power_mW",
    "beam.detuning_GHz",
    "beam.waist_um",
    "beam.focus_cm",
    "geometry.separation_mm",
    "geometry.mot2_radius_mm",
];

const CUSTOM_SPECIES_KEYS: [&str; 6] = [
    "species.gamma",
    "species.wavelength",
    "species.mass",
    "species.hfs_ground",
    "species.hfs_excited",
    "species.f_lower",
];

fn kind_of(key: &str) -> Option<Kind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

/// Keys that sweeps and the optimizer can address.
pub fn param_key(key: &str) -> Result<ParamKey> {
    let param = match key {
        "beam.power_mW" => Param::Power,
        "beam.detuning_GHz" => Param::Detuning,
        "beam.waist_um" => Param::WaistMin,
        "beam.focus_cm" => Param::FocusPosition,
        "beam.rayleigh_mm" => Param::RayleighLength,
        "model.T0_uK" => Param::InitialTemperature,
        "geometry.separation_mm" => Param::TrapSeparation,
        "geometry.mot2_radius_mm" => Param::Mot2Radius,
        other => return Err(Error::invalid(format!("'{other}' cannot be swept"))),
    };
    let Some(Kind::Quantity(_, Some(unit))) = kind_of(key) else { unreachable!("sweepable keys carry units") };
    Ok(ParamKey { key: key.to_string(), param, unit: Unit::parse(unit).expect("known unit") })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    /// 1-based line, 0 for overrides
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Raw entries of a configuration file, checked for syntax and known keys.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ConfigDocument {
    pub entries: Vec<Entry>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::config(line, format!("expected 'key = value', got '{content}'")));
            };
            let key = key.trim();
            let value = value.trim();
            if kind_of(key).is_none() {
                return Err(Error::config(line, format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(Error::config(line, format!("key '{key}' has no value")));
            }
            if let Some(prev) = doc.entries.iter().find(|e| e.key == key) {
                return Err(Error::config(line, format!("duplicate key '{key}' (first on line {})", prev.line)));
            }
            doc.entries.push(Entry { line, key: key.to_string(), value: value.to_string() });
        }
        Ok(doc)
    }

    /// Overrides (or adds) one key, as from `--set key=value`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        if kind_of(key).is_none() {
            return Err(Error::config(0, format!("unknown key '{key}'")));
        }
        let entry = Entry { line: 0, key: key.to_string(), value: value.trim().to_string() };
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(0, format!("override '{assignment}' is not key=value")))?;
        self.set(k, v)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// SI value of a quantity or plain number key.
    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let kind = kind_of(key).expect("checked at parse");
        let mut tokens = e.value.split_whitespace();
        let first = tokens.next().unwrap_or("");
        let v: f64 = first
            .parse()
            .map_err(|_| Error::config(e.line, format!("'{key}' expects a number, got '{first}'")))?;
        if !v.is_finite() {
            return Err(Error::config(e.line, format!("'{key}' must be finite")));
        }
        let tag = tokens.next();
        if let Some(extra) = tokens.next() {
            return Err(Error::config(e.line, format!("unexpected '{extra}' after '{key}'")));
        }
        match kind {
            Kind::Quantity(dim, default) => {
                let unit = match (tag, default) {
                    (Some(t), _) => Unit::parse(t)
                        .ok_or_else(|| Error::config(e.line, format!("unknown unit '{t}' for '{key}'")))?,
                    (None, Some(d)) => Unit::parse(d).expect("known unit"),
                    (None, None) => {
                        return Err(Error::config(e.line, format!("'{key}' needs a unit tag ({dim})")))
                    }
                };
                if unit.dimension != dim {
                    return Err(Error::config(
                        e.line,
                        format!("unit '{unit}' on '{key}' is a {}, expected {dim}", unit.dimension),
                    ));
                }
                Ok(Some(unit.to_si(v)))
            }
            Kind::Number => match tag {
                Some(t) => Err(Error::config(e.line, format!("'{key}' takes no unit, got '{t}'"))),
                None => Ok(Some(v)),
            },
            _ => Err(Error::config(e.line, format!("'{key}' is not numeric"))),
        }
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| Error::config(0, format!("missing required key '{key}'")))
    }

    pub fn integer(&self, key: &str) -> Result<Option<u64>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Error::config(e.line, format!("'{key}' expects a non-negative integer, got '{}'", e.value)))
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>> {
        let Some(e) = self.get(key) else { return Ok(None) };
        match e.value.as_str() {
            "true" | "on" | "yes" => Ok(Some(true)),
            "false" | "off" | "no" => Ok(Some(false)),
            other => Err(Error::config(e.line, format!("'{key}' expects true/false, got '{other}'"))),
        }
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map(|e| e.line).unwrap_or(0)
    }

    /// Wraps an error from building model objects with the line of `key`.
    fn at<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Config { line: 0, message } => Error::config(self.line(key), message),
            other => other,
        })
    }
}

/// Monte Carlo settings from the `mc.*` keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSettings {
    pub n_atoms: usize,
    pub seed: u64,
    pub time_step: Option<f64>,
    pub initial_radius: Option<f64>,
    pub record_points: usize,
    pub force_model: ForceModel,
}

impl McSettings {
    pub const DEFAULT_N_ATOMS: usize = 10_000;
    pub const DEFAULT_SEED: u64 = 1;
    pub const DEFAULT_RECORD_POINTS: usize = 50;

    pub fn to_config(&self, scenario: &Scenario) -> McConfig {
        let mut c = McConfig::new(self.n_atoms, self.seed, scenario.options.initial_temperature)
            .with_even_grid(self.record_points, scenario.geometry.trap_separation);
        c.time_step = self.time_step;
        c.initial_radius = self.initial_radius;
        c.force_model = self.force_model;
        c.bracket = scenario.options.bracket;
        c
    }
}

/// Inputs of the `rates` subcommand, all optional at parse time.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RateInputs {
    pub loading_rate: Option<f64>,
    pub background_loss: Option<f64>,
    pub pushed_number: Option<f64>,
    pub mot2_loading: Option<f64>,
    pub push_loss: Option<f64>,
    pub two_body_rate: Option<f64>,
    pub density: Option<f64>,
}

impl RateInputs {
    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let tau = doc.number("rates.tau_s")?;
        let gamma = doc.number("rates.gamma_per_s")?;
        let background_loss = match (tau, gamma) {
            (Some(_), Some(_)) => {
                return Err(Error::config(doc.line("rates.gamma_per_s"), "give either rates.tau_s or rates.gamma_per_s"))
            }
            (Some(t), None) if t <= 0.0 => return Err(Error::config(doc.line("rates.tau_s"), "rates.tau_s must be > 0")),
            (Some(t), None) => Some(1.0 / t),
            (None, g) => g,
        };
        Ok(RateInputs {
            loading_rate: doc.number("rates.L1_per_s")?,
            background_loss,
            pushed_number: doc.number("rates.N1_push")?,
            mot2_loading: doc.number("rates.L2_per_s")?,
            push_loss: doc.number("rates.push_loss_per_s")?,
            two_body_rate: doc.number("rates.beta_cm3_per_s")?,
            density: doc.number("rates.density_per_cm3")?,
        })
    }
}

/// Fully validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub mc: McSettings,
    pub sweep: Option<SweepSpec>,
    pub optimize: Option<OptimizeSpec>,
    pub rates: RateInputs,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_document(&ConfigDocument::parse(text)?)
    }

    pub fn from_document(doc: &ConfigDocument) -> Result<Self> {
        let missing: Vec<&str> = REQUIRED_KEYS.iter().copied().filter(|k| !doc.contains(k)).collect();
        if !missing.is_empty() {
            return Err(Error::config(0, format!("missing required keys: {}", missing.join(", "))));
        }
        let species = load_species(doc)?;

        let beam = BeamParams::new(
            doc.required_number("beam.power_mW")?,
            doc.required_number("beam.detuning_GHz")?,
            doc.required_number("beam.waist_um")?,
            doc.required_number("beam.focus_cm")?,
            doc.number("beam.rayleigh_mm")?,
            species.wavelength,
        );
        let beam = doc.at("beam.power_mW", beam)?;
        let beam = doc.at(
            "beam.polarization_factor",
            beam.with_factors(
                doc.number("beam.polarization_factor")?.unwrap_or(BeamParams::DEFAULT_POLARIZATION_FACTOR),
                doc.number("beam.transverse_average_factor")?.unwrap_or(BeamParams::DEFAULT_TRANSVERSE_AVERAGE_FACTOR),
            ),
        )?;

        let geometry = Geometry::with_gravity(
            doc.required_number("geometry.separation_mm")?,
            doc.required_number("geometry.mot2_radius_mm")?,
            doc.number("geometry.mot1_radius_mm")?.unwrap_or(0.01),
            doc.number("geometry.gravity")?.unwrap_or(GRAVITY),
        );
        let geometry = doc.at("geometry.separation_mm", geometry)?;

        let t0 = match doc.number("model.T0_uK")? {
            Some(t) => t,
            None => default_temperature(&species.name).ok_or_else(|| {
                Error::config(0, "model.T0_uK is required for a custom species")
            })?,
        };
        let bracket = match doc.text("model.bracket") {
            None | Some("exact") => PumpingBracket::Exact,
            Some("shortcut") => PumpingBracket::Shortcut,
            Some(other) => {
                return Err(Error::config(doc.line("model.bracket"), format!("model.bracket must be exact|shortcut, got '{other}'")))
            }
        };
        let options = ModelOptions {
            initial_temperature: t0,
            bracket,
            f_exponent: doc.number("model.f_exponent")?.unwrap_or(ModelOptions::DEFAULT_F_EXPONENT),
            grid_points: doc.integer("model.grid_points")?.map(|n| n as usize).unwrap_or(ModelOptions::DEFAULT_GRID_POINTS),
            heating: doc.flag("model.heating")?.unwrap_or(true),
        };
        doc.at("model.T0_uK", options.validate())?;
        let scenario = Scenario { species, beam, geometry, options };

        let force_model = match doc.text("mc.force_model") {
            None => ForceModel::Averaged,
            Some(s) => doc.at("mc.force_model", s.parse())?,
        };
        let mc = McSettings {
            n_atoms: doc.integer("mc.n_atoms")?.map(|n| n as usize).unwrap_or(McSettings::DEFAULT_N_ATOMS),
            seed: doc.integer("mc.seed")?.unwrap_or(McSettings::DEFAULT_SEED),
            time_step: doc.number("mc.time_step_us")?,
            initial_radius: doc.number("mc.initial_radius_um")?,
            record_points: doc.integer("mc.record_points")?.map(|n| n as usize).unwrap_or(McSettings::DEFAULT_RECORD_POINTS),
            force_model,
        };
        if mc.n_atoms == 0 {
            return Err(Error::config(doc.line("mc.n_atoms"), "mc.n_atoms must be at least 1"));
        }
        if mc.time_step.is_some_and(|dt| dt <= 0.0) {
            return Err(Error::config(doc.line("mc.time_step_us"), "mc.time_step_us must be > 0"));
        }

        Ok(RunConfig {
            scenario,
            mc,
            sweep: parse_sweep(doc)?,
            optimize: parse_optimize(doc)?,
            rates: RateInputs::from_document(doc)?,
        })
    }

    /// Every effective parameter as `(key, value)` in the key's own unit.
    pub fn effective_entries(&self) -> Vec<(String, String)> {
        let sc = &self.scenario;
        let mut out: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        let in_unit = |si: f64, unit: &str| Unit::parse(unit).expect("known unit").from_si(si);
        let builtin = SpeciesParams::builtin(&sc.species.name).is_some_and(|b| b == sc.species);
        if builtin {
            push("species", sc.species.name.clone());
        } else {
            push("species", "custom".into());
            push("species.name", sc.species.name.clone());
            push("species.gamma", format!("{} MHz", in_unit(sc.species.gamma, "MHz")));
            push("species.wavelength", format!("{} nm", in_unit(sc.species.wavelength, "nm")));
            push("species.mass", format!("{} u", in_unit(sc.species.mass, "u")));
            push("species.hfs_ground", format!("{} GHz", in_unit(sc.species.delta_hfs_ground, "GHz")));
            push("species.hfs_excited", format!("{} MHz", in_unit(sc.species.delta_hfs_excited, "MHz")));
            push("species.f_lower", sc.species.f_lower.to_string());
        }
        let b = &sc.beam;
        push("beam.power_mW", in_unit(b.power, "mW").to_string());
        push("beam.detuning_GHz", in_unit(b.detuning, "GHz").to_string());
        push("beam.waist_um", in_unit(b.waist_min, "um").to_string());
        push("beam.focus_cm", in_unit(b.focus_position, "cm").to_string());
        push("beam.rayleigh_mm", in_unit(b.rayleigh_length, "mm").to_string());
        push("beam.polarization_factor", b.polarization_factor.to_string());
        push("beam.transverse_average_factor", b.transverse_average_factor.to_string());
        let g = &sc.geometry;
        push("geometry.separation_mm", in_unit(g.trap_separation, "mm").to_string());
        push("geometry.mot2_radius_mm", in_unit(g.mot2_radius, "mm").to_string());
        push("geometry.mot1_radius_mm", in_unit(g.mot1_radius, "mm").to_string());
        push("geometry.gravity", g.gravity.to_string());
        let o = &sc.options;
        push("model.T0_uK", in_unit(o.initial_temperature, "uK").to_string());
        push(
            "model.bracket",
            match o.bracket {
                PumpingBracket::Exact => "exact".into(),
                PumpingBracket::Shortcut => "shortcut".into(),
            },
        );
        push("model.f_exponent", o.f_exponent.to_string());
        push("model.grid_points", o.grid_points.to_string());
        push("model.heating", o.heating.to_string());
        let mc = &self.mc;
        push("mc.n_atoms", mc.n_atoms.to_string());
        push("mc.seed", mc.seed.to_string());
        push("mc.time_step_us", mc.time_step.map(|t| in_unit(t, "us").to_string()).unwrap_or_else(|| "auto".into()));
        push(
            "mc.initial_radius_um",
            mc.initial_radius.map(|r| in_unit(r, "um").to_string()).unwrap_or_else(|| "auto".into()),
        );
        push("mc.record_points", mc.record_points.to_string());
        push(
            "mc.force_model",
            match mc.force_model {
                ForceModel::Averaged => "averaged".into(),
                ForceModel::Local => "local".into(),
            },
        );
        if let Some(s) = &self.sweep {
            for (i, a) in s.axes.iter().enumerate() {
                let values: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
                push(&format!("sweep.axis{}", i + 1), format!("{} values {}", a.param.key, values.join(" ")));
            }
            push("sweep.objective", s.objective.name().into());
        }
        if let Some(o) = &self.optimize {
            for (i, f) in o.free.iter().enumerate() {
                push(&format!("optimize.param{}", i + 1), format!("{} {} {}", f.param.key, f.lo, f.hi));
            }
            push("optimize.objective", o.objective.name().into());
            push("optimize.max_evals", o.max_evals.to_string());
            push("optimize.tolerance", o.tolerance.to_string());
        }
        let r = &self.rates;
        let rate_keys = [
            ("rates.L1_per_s", r.loading_rate),
            ("rates.gamma_per_s", r.background_loss),
            ("rates.N1_push", r.pushed_number),
            ("rates.L2_per_s", r.mot2_loading),
            ("rates.push_loss_per_s", r.push_loss),
            ("rates.beta_cm3_per_s", r.two_body_rate),
            ("rates.density_per_cm3", r.density),
        ];
        for (k, v) in rate_keys {
            if let Some(v) = v {
                push(k, v.to_string());
            }
        }
        out
    }
}

fn default_temperature(species: &str) -> Option<f64> {
    match species {
        "Cs133" => Some(25e-6),
        "Rb87" => Some(40e-6),
        _ => None,
    }
}

/// Species from the `species` key and, for `custom`, the `species.*` fields.
pub fn load_species(doc: &ConfigDocument) -> Result<SpeciesParams> {
    let name = doc.text("species").ok_or_else(|| Error::config(0, "missing required key 'species'"))?;
    let line = doc.line("species");
    if name != "custom" {
        if let Some(extra) = CUSTOM_SPECIES_KEYS.iter().chain(["species.name"].iter()).find(|k| doc.contains(k)) {
            return Err(Error::config(doc.line(extra), format!("'{extra}' is only allowed with species = custom")));
        }
        return SpeciesParams::builtin(name)
            .ok_or_else(|| Error::config(line, format!("unknown species '{name}' (Cs133, Rb87 or custom)")));
    }
    let missing: Vec<&str> = CUSTOM_SPECIES_KEYS.iter().copied().filter(|k| !doc.contains(k)).collect();
    if !missing.is_empty() {
        return Err(Error::config(line, format!("custom species needs: {}", missing.join(", "))));
    }
    let f_lower = doc.integer("species.f_lower")?.expect("checked above");
    let species = SpeciesParams::new(
        doc.text("species.name").unwrap_or("custom"),
        doc.required_number("species.gamma")?,
        doc.required_number("species.wavelength")?,
        doc.required_number("species.mass")?,
        doc.required_number("species.hfs_ground")?,
        doc.required_number("species.hfs_excited")?,
        u32::try_from(f_lower).map_err(|_| Error::config(doc.line("species.f_lower"), "species.f_lower is too large"))?,
    );
    doc.at("species.gamma", species)
}

fn parse_objective(doc: &ConfigDocument, key: &str) -> Result<Objective> {
    match doc.text(key) {
        None => Ok(Objective::RefinedScore),
        Some(s) => doc.at(key, s.parse()),
    }
}

fn parse_sweep(doc: &ConfigDocument) -> Result<Option<SweepSpec>> {
    let mut axes = Vec::new();
    for key in ["sweep.axis1", "sweep.axis2", "sweep.axis3"] {
        let Some(e) = doc.get(key) else { continue };
        let tokens: Vec<&str> = e.value.split_whitespace().collect();
        let bad = |msg: String| Error::config(e.line, msg);
        if tokens.len() < 3 {
            return Err(bad(format!("{key} expects '<key> range lo hi steps' or '<key> values v1 v2 ...'")));
        }
        let param = doc.at(key, param_key(tokens[0]))?;
        let numbers: Vec<f64> = tokens[2..]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("'{t}' in {key} is not a number"))))
            .collect::<Result<_>>()?;
        let axis = match tokens[1] {
            "range" => {
                if numbers.len() != 3 || numbers[2].fract() != 0.0 || numbers[2] < 0.0 {
                    return Err(bad(format!("{key} range needs lo hi steps")));
                }
                SweepAxis::range(param, numbers[0], numbers[1], numbers[2] as usize)
            }
            "values" => SweepAxis::values(param, numbers),
            other => return Err(bad(format!("{key}: expected 'range' or 'values', got '{other}'"))),
        };
        axes.push(doc.at(key, axis)?);
    }
    if axes.is_empty() {
        if doc.contains("sweep.objective") {
            return Err(Error::config(doc.line("sweep.objective"), "sweep.objective given without sweep.axis1"));
        }
        return Ok(None);
    }
    Ok(Some(SweepSpec { axes, objective: parse_objective(doc, "sweep.objective")? }))
}

fn parse_optimize(doc: &ConfigDocument) -> Result<Option<OptimizeSpec>> {
    let mut free = Vec::new();
    for key in ["optimize.param1", "optimize.param2", "optimize.param3", "optimize.param4"] {
        let Some(e) = doc.get(key) else { continue };
        let tokens: Vec<&str> = e.value.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::config(e.line, format!("{key} expects '<key> lo hi'")));
        }
        let param = doc.at(key, param_key(tokens[0]))?;
        let parse = |t: &str| t.parse::<f64>().map_err(|_| Error::config(e.line, format!("'{t}' in {key} is not a number")));
        free.push(FreeParam { param, lo: parse(tokens[1])?, hi: parse(tokens[2])? });
    }
    if free.is_empty() {
        return Ok(None);
    }
    let mut spec = OptimizeSpec::new(free, parse_objective(doc, "optimize.objective")?);
    if let Some(n) = doc.integer("optimize.max_evals")? {
        spec.max_evals = n as usize;
    }
    if let Some(t) = doc.number("optimize.tolerance")? {
        spec.tolerance = t;
    }
    doc.at("optimize.param1", spec.validate())?;
    Ok(Some(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;

    #[test]
    fn bundled_cs() {
        let c = RunConfig::parse(bundled("cs_paper").unwrap()).unwrap();
        let sc = &c.scenario;
        assert_eq!(sc.species, SpeciesParams::cesium_133());
        assert_relative_eq!(sc.geometry.trap_separation, 0.57, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.waist_min, 200e-6, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.rayleigh_length, 0.110, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.power, 0.063, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.detuning, angular(-2e9), max_relative = 1e-15);
        assert_relative_eq!(sc.options.initial_temperature, 25e-6, max_relative = 1e-15);
    }

    #[test]
    fn bundled_rb() {
        let c = RunConfig::parse(bundled("rb_paper").unwrap()).unwrap();
        let sc = &c.scenario;
        assert_eq!(sc.species, SpeciesParams::rubidium_87());
        assert_relative_eq!(sc.geometry.trap_separation, 0.72, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.focus_position, -0.13, max_relative = 1e-15);
        assert_relative_eq!(sc.beam.rayleigh_length, 0.26, max_relative = 1e-15);
        assert_relative_eq!(sc.options.initial_temperature, 40e-6, max_relative = 1e-15);
    }

    #[test]
    fn empty_file_lists_required_keys() {
        let err = RunConfig::parse("# nothing here\n").unwrap_err();
        let msg = err.to_string();
        for k in REQUIRED_KEYS {
            assert!(msg.contains(k), "{msg}");
        }
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "species = Rb87\nbeam.power_mW = 21\nbeam.colour = red\n";
        assert_eq!(ConfigDocument::parse(text).unwrap_err(), Error::config(3, "unknown key 'beam.colour'"));
        let text = format!("{}\nbeam.power_mW = 3 GHz\n", "species = Rb87");
        let doc = ConfigDocument::parse(&text).unwrap();
        assert!(matches!(doc.number("beam.power_mW"), Err(Error::Config { line: 2, .. })));
    }

    #[test]
    fn unit_tags_convert() {
        let doc = ConfigDocument::parse("beam.power_mW = 0.021 W\nbeam.detuning_GHz = -750 MHz\n").unwrap();
        assert_relative_eq!(doc.number("beam.power_mW").unwrap().unwrap(), 0.021);
        assert_relative_eq!(doc.number("beam.detuning_GHz").unwrap().unwrap(), angular(-0.75e9), max_relative = 1e-15);
    }

    #[test]
    fn custom_species_needs_tags() {
        let base = bundled("rb_paper").unwrap().replace("species = Rb87", "species = custom");
        let full = format!(
            "{base}\nspecies.gamma = 5.9 MHz\nspecies.wavelength = 780.2412097 nm\nspecies.mass = 86.90918053 u\n\
             species.hfs_ground = 6.8 GHz\nspecies.hfs_excited = 500 MHz\nspecies.f_lower = 1\n"
        );
        let c = RunConfig::parse(&full).unwrap();
        let rb = SpeciesParams::rubidium_87();
        assert_relative_eq!(c.scenario.species.gamma, rb.gamma, max_relative = 1e-14);
        assert_relative_eq!(c.scenario.species.mass, rb.mass, max_relative = 1e-14);
        let untagged = full.replace("5.9 MHz", "5.9");
        assert!(matches!(RunConfig::parse(&untagged), Err(Error::Config { .. })));
        let negative = full.replace("5.9 MHz", "-1 MHz");
        assert!(RunConfig::parse(&negative).is_err());
    }

    #[test]
    fn overrides_and_sweeps() {
        let mut doc = ConfigDocument::parse(bundled("rb_paper").unwrap()).unwrap();
        doc.set_assignment("beam.power_mW=10").unwrap();
        doc.set_assignment("sweep.axis1 = beam.detuning_GHz range -2.5 -0.2 24").unwrap();
        doc.set_assignment("sweep.axis2 = beam.power_mW values 10 15 21").unwrap();
        let c = RunConfig::from_document(&doc).unwrap();
        assert_relative_eq!(c.scenario.beam.power, 0.010, max_relative = 1e-15);
        let s = c.sweep.unwrap();
        assert_eq!(s.axes[0].values.len(), 24);
        assert_eq!(s.axes[1].values, vec![10.0, 15.0, 21.0]);
        assert!(doc.set_assignment("nonsense=1").is_err());
        assert!(doc.set_assignment("sweep.axis3 = species range 1 2 3").is_ok());
        assert!(RunConfig::from_document(&doc).is_err());
    }

    #[test]
    fn effective_entries_round_trip() {
        let c = RunConfig::parse(bundled("cs_paper").unwrap()).unwrap();
        let text: String = c
            .effective_entries()
            .into_iter()
            .filter(|(_, v)| v != "auto")
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(again.scenario.species, c.scenario.species);
        assert_relative_eq!(again.scenario.beam.power, c.scenario.beam.power, max_relative = 1e-15);
        assert_relative_eq!(again.scenario.beam.detuning, c.scenario.beam.detuning, max_relative = 1e-15);
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = ConfigDocument::parse("species = Rb87\nspecies = Cs133\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }
}
