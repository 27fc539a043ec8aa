//! Steady-state MOT population and flux bookkeeping.

use serde::Serialize;

use crate::error::{Error, Result};

/// Rate-equation inputs of a single MOT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotRateParams {
    /// loading rate L (atoms/s)
    pub loading_rate: f64,
    /// background-collision loss γ (1/s)
    pub background_loss: f64,
    /// loss through the pushing beam γ_p (1/s)
    pub push_loss: f64,
    /// two-body loss coefficient β (cm³/s)
    pub two_body_rate: f64,
    /// atomic density n (atoms/cm³)
    pub density: f64,
}

impl MotRateParams {
    pub fn new(loading_rate: f64, background_loss: f64) -> Self {
        MotRateParams { loading_rate, background_loss, push_loss: 0.0, two_body_rate: 0.0, density: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("loading rate", self.loading_rate),
            ("background loss", self.background_loss),
            ("push loss", self.push_loss),
            ("two-body rate", self.two_body_rate),
            ("density", self.density),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn total_loss(&self) -> f64 {
        self.background_loss + self.push_loss + self.two_body_rate * self.density
    }
}

/// N = L/(γ + γ_p + βn).
pub fn steady_state_number(p: &MotRateParams) -> Result<f64> {
    p.validate()?;
    let loss = p.total_loss();
    if loss <= 0.0 {
        return Err(Error::invalid("total MOT loss rate is zero; no steady state"));
    }
    Ok(p.loading_rate / loss)
}

/// Flux leaving MOT1 through the guide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutgoingFlux {
    pub flux: f64,
    /// true when L1 − γN₁ᵖ came out negative and was clamped to zero
    pub clamped: bool,
}

/// L_out = L1 − γ·N₁ᵖ, clamped at zero.
pub fn outgoing_flux(loading_rate: f64, background_loss: f64, pushed_number: f64) -> Result<OutgoingFlux> {
    for (name, v) in [("L1", loading_rate), ("gamma", background_loss), ("N1_push", pushed_number)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    let raw = loading_rate - background_loss * pushed_number;
    if raw < 0.0 {
        log_warning(&format!("outgoing flux {raw:.3e} atoms/s is negative; clamped to 0"));
        return Ok(OutgoingFlux { flux: 0.0, clamped: true });
    }
    Ok(OutgoingFlux { flux: raw, clamped: false })
}

/// Ratio L2/L_out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferEfficiency {
    pub efficiency: f64,
    /// L2 exceeds L_out, which no real transfer can do
    pub inconsistent: bool,
}

pub fn transfer_efficiency(mot2_loading: f64, outgoing: f64) -> Result<TransferEfficiency> {
    if !(mot2_loading >= 0.0 && mot2_loading.is_finite()) {
        return Err(Error::invalid("L2 must be finite and >= 0"));
    }
    if !(outgoing > 0.0 && outgoing.is_finite()) {
        return Err(Error::invalid("outgoing flux must be positive"));
    }
    let efficiency = mot2_loading / outgoing;
    let inconsistent = efficiency > 1.0;
    if inconsistent {
        log_warning(&format!("transfer efficiency {efficiency:.3} exceeds 1; check the flux data"));
    }
    Ok(TransferEfficiency { efficiency, inconsistent })
}

fn log_warning(msg: &str) {
    eprintln!("warning: {msg}");
}
