//! Attenuating fiber span.
//!
//! Power transmittance follows `L = exp(-alpha * l)`; the field amplitude
//! scales by `sqrt(L)` with no added noise, phase rotation, dispersion or
//! nonlinearity.

use crate::error::{Error, Result};
use crate::types::OpticalField;

/// Fiber span parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Natural-log power loss factor per kilometre, >= 0.
    pub alpha_per_km: f64,
    /// Span length in kilometres, >= 0.
    pub length_km: f64,
}

impl ChannelConfig {
    /// Builds from the usual dB/km attenuation figure:
    /// `alpha = ln(10)/10 * alpha_dB`.
    pub fn from_db_per_km(db_per_km: f64, length_km: f64) -> Self {
        Self {
            alpha_per_km: std::f64::consts::LN_10 / 10.0 * db_per_km,
            length_km,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_per_km >= 0.0) || !self.alpha_per_km.is_finite() {
            return Err(Error::invalid_config(
                "channel.alpha_per_km",
                format!("must be >= 0, got {}", self.alpha_per_km),
            ));
        }
        if !(self.length_km >= 0.0) || !self.length_km.is_finite() {
            return Err(Error::invalid_config(
                "channel.length_km",
                format!("must be >= 0, got {}", self.length_km),
            ));
        }
        Ok(())
    }

    /// Power transmittance `exp(-alpha * l)` in (0, 1].
    pub fn transmittance(&self) -> f64 {
        (-self.alpha_per_km * self.length_km).exp()
    }

    /// Field amplitude factor `sqrt(L)`.
    pub fn amplitude_factor(&self) -> f64 {
        self.transmittance().sqrt()
    }
}

/// Propagates a field through the span: amplitude scales by `sqrt(L)`.
pub fn propagate(field: OpticalField, cfg: &ChannelConfig) -> OpticalField {
    field.scaled(cfg.amplitude_factor())
}
