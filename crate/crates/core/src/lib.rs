//! Pushing–guiding transfer of cold atoms between two magneto-optical traps.

pub mod beam;
pub mod config;
pub mod error;
pub mod figures;
pub mod light_atom;
pub mod monte_carlo;
pub mod mot_rates;
pub mod numerics;
pub mod output;
pub mod species;
pub mod sweep;
pub mod transport;
pub mod units;

pub use beam::BeamParams;
pub use config::{ConfigDocument, McSettings, RateInputs, RunConfig};
pub use error::{Error, Result};
pub use light_atom::{PumpingBracket, PumpingState};
pub use monte_carlo::{run_ensemble, ForceModel, McConfig, McRecord, McStats};
pub use mot_rates::{outgoing_flux, steady_state_number, transfer_efficiency, MotRateParams};
pub use species::{Geometry, SpeciesParams};
pub use sweep::{optimize, run_sweep, Objective, OptimizeResult, OptimizeSpec, Param, Scenario, SweepSpec, SweepTable};
pub use transport::{EfficiencyReport, ModelOptions, Transport, TransportProfile, ValidityFlag};
