//! Physical constants and lab-unit conversions.
//!
//! Everything inside the crate is coherent SI. Linewidths and detunings are
//! angular frequencies (rad/s); a user writing `-1 GHz` means δ/2π = −1 GHz,
//! which is stored as −2π × 10⁹ rad/s.

use std::f64::consts::PI;
use std::fmt;

/// reduced Planck constant (J s)
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant (J/K)
pub const KB: f64 = 1.380649e-23;

/// speed of light in vacuum (m/s)
pub const C: f64 = 299_792_458.0;

/// unified atomic mass unit (kg)
pub const AMU: f64 = 1.660539067e-27;

/// default gravitational acceleration (m/s²)
pub const GRAVITY: f64 = 9.81;

/// What a unit measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Entered as an ordinary frequency ν, stored as ω = 2πν.
    AngularFrequency,
    Power,
    Length,
    Temperature,
    Time,
    Mass,
    Acceleration,
    /// Plain inverse seconds (loss rates, fluxes); no 2π.
    Rate,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::AngularFrequency => "frequency",
            Dimension::Power => "power",
            Dimension::Length => "length",
            Dimension::Temperature => "temperature",
            Dimension::Time => "time",
            Dimension::Mass => "mass",
            Dimension::Acceleration => "acceleration",
            Dimension::Rate => "rate",
        };
        f.write_str(s)
    }
}

/// A recognised unit tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub symbol: &'static str,
    pub dimension: Dimension,
    /// SI value of one unit, before any 2π for angular frequencies.
    scale: f64,
}

const UNITS: &[Unit] = &[
    Unit { symbol: "Hz", dimension: Dimension::AngularFrequency, scale: 1.0 },
    Unit { symbol: "kHz", dimension: Dimension::AngularFrequency, scale: 1e3 },
    Unit { symbol: "MHz", dimension: Dimension::AngularFrequency, scale: 1e6 },
    Unit { symbol: "GHz", dimension: Dimension::AngularFrequency, scale: 1e9 },
    Unit { symbol: "W", dimension: Dimension::Power, scale: 1.0 },
    Unit { symbol: "mW", dimension: Dimension::Power, scale: 1e-3 },
    Unit { symbol: "uW", dimension: Dimension::Power, scale: 1e-6 },
    Unit { symbol: "m", dimension: Dimension::Length, scale: 1.0 },
    Unit { symbol: "cm", dimension: Dimension::Length, scale: 1e-2 },
    Unit { symbol: "mm", dimension: Dimension::Length, scale: 1e-3 },
    Unit { symbol: "um", dimension: Dimension::Length, scale: 1e-6 },
    Unit { symbol: "nm", dimension: Dimension::Length, scale: 1e-9 },
    Unit { symbol: "K", dimension: Dimension::Temperature, scale: 1.0 },
    Unit { symbol: "mK", dimension: Dimension::Temperature, scale: 1e-3 },
    Unit { symbol: "uK", dimension: Dimension::Temperature, scale: 1e-6 },
    Unit { symbol: "nK", dimension: Dimension::Temperature, scale: 1e-9 },
    Unit { symbol: "s", dimension: Dimension::Time, scale: 1.0 },
    Unit { symbol: "ms", dimension: Dimension::Time, scale: 1e-3 },
    Unit { symbol: "us", dimension: Dimension::Time, scale: 1e-6 },
    Unit { symbol: "kg", dimension: Dimension::Mass, scale: 1.0 },
    Unit { symbol: "u", dimension: Dimension::Mass, scale: AMU },
    Unit { symbol: "m/s2", dimension: Dimension::Acceleration, scale: 1.0 },
    Unit { symbol: "1/s", dimension: Dimension::Rate, scale: 1.0 },
];

impl Unit {
    /// Looks up a unit tag. `µ` is accepted as a synonym for `u`.
    pub fn parse(tag: &str) -> Option<Unit> {
        let normalized = tag.replace(['µ', 'μ'], "u");
        UNITS.iter().copied().find(|u| u.symbol == normalized)
    }

    pub fn to_si(&self, value: f64) -> f64 {
        match self.dimension {
            Dimension::AngularFrequency => 2.0 * PI * value * self.scale,
            _ => value * self.scale,
        }
    }

    pub fn from_si(&self, value: f64) -> f64 {
        match self.dimension {
            Dimension::AngularFrequency => value / (2.0 * PI * self.scale),
            _ => value / self.scale,
        }
    }

    pub fn all() -> &'static [Unit] {
        UNITS
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol)
    }
}

/// Angular frequency (rad/s) from an ordinary frequency in Hz.
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Ordinary frequency (Hz) of an angular frequency.
pub fn hertz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Temperature equivalent of an energy, E/k_B.
pub fn kelvin(energy: f64) -> f64 {
    energy / KB
}
