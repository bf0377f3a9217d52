//! Receive-side digitizer: mid-tread quantization with symmetric clipping.
//!
//! The representable range is `[-V_pp/2, +V_pp/2]` with step
//! `V_step = V_pp / (2^n - 1)`; codes are `m * V_step` with
//! `m = round(V / V_step)` and half-steps rounding toward +infinity.

use crate::error::{Error, Result};
use crate::metrics::stats;

/// ADC resolution, range and front-end gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcConfig {
    /// Resolution in bits, 1..=48.
    pub n_bits: u32,
    /// Peak-to-peak input range, volts.
    pub v_pp_volts: f64,
    /// Transimpedance converting detector current to ADC input voltage, V/A.
    pub transimpedance_v_per_a: f64,
}

impl AdcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bits < 1 || self.n_bits > 48 {
            return Err(Error::invalid_config(
                "adc.n_bits",
                format!("must be in 1..=48, got {}", self.n_bits),
            ));
        }
        if !(self.v_pp_volts > 0.0) || !self.v_pp_volts.is_finite() {
            return Err(Error::invalid_config(
                "adc.v_pp_volts",
                format!("must be a positive finite number, got {}", self.v_pp_volts),
            ));
        }
        if !(self.transimpedance_v_per_a > 0.0) || !self.transimpedance_v_per_a.is_finite() {
            return Err(Error::invalid_config(
                "adc.transimpedance_v_per_a",
                format!(
                    "must be a positive finite number, got {}",
                    self.transimpedance_v_per_a
                ),
            ));
        }
        Ok(())
    }

    /// Voltage step `V_pp / (2^n - 1)`.
    pub fn v_step(&self) -> f64 {
        self.v_pp_volts / ((1u64 << self.n_bits) - 1) as f64
    }

    /// Largest representable code magnitude: outputs stay within
    /// `[-V_pp/2, +V_pp/2]`.
    pub fn max_code(&self) -> i64 {
        (1i64 << (self.n_bits - 1)) - 1
    }

    /// Sizes the front end so an analog RMS of `rms` loads the converter at
    /// `loading_sigma` standard deviations per half range.
    pub fn auto(n_bits: u32, rms: f64, loading_sigma: f64, v_pp_volts: f64) -> Self {
        let transimpedance = if rms > 0.0 {
            v_pp_volts / (2.0 * loading_sigma * rms)
        } else {
            1.0
        };
        Self {
            n_bits,
            v_pp_volts,
            transimpedance_v_per_a: transimpedance,
        }
    }
}

/// Mid-tread quantization with clipping to `[-V_pp/2, +V_pp/2]`.
pub fn adc_quantize(v: f64, cfg: &AdcConfig) -> f64 {
    let step = cfg.v_step();
    let half = cfg.v_pp_volts / 2.0;
    let clipped = v.clamp(-half, half);
    // floor(x + 1/2) implements round-half-up: ties go toward +infinity.
    let m = (clipped / step + 0.5).floor() as i64;
    let m = m.clamp(-cfg.max_code(), cfg.max_code());
    m as f64 * step
}

/// Measured-to-analog variance ratio as a function of ADC resolution.
///
/// For each resolution the converter is auto-loaded from the sample RMS of
/// `analog` at `loading_sigma` standard deviations of headroom; eta is
/// `Var(quantized) / Var(analog)` on the same samples.
pub fn eta_vs_adc_bits(
    bits: &[u32],
    analog: &[f64],
    loading_sigma: f64,
    v_pp_volts: f64,
) -> Result<Vec<(u32, f64)>> {
    if analog.len() < 2 {
        return Err(Error::InvalidArgument(
            "eta_vs_adc_bits needs at least 2 analog samples".into(),
        ));
    }
    let var_in = stats::variance(analog)?;
    let rms = var_in.sqrt();
    let mut out = Vec::with_capacity(bits.len());
    for &n in bits {
        let cfg = AdcConfig::auto(n, rms, loading_sigma, v_pp_volts);
        cfg.validate()?;
        let quantized: Vec<f64> = analog.iter().map(|&v| adc_quantize(v, &cfg)).collect();
        out.push((n, stats::variance(&quantized)? / var_in));
    }
    Ok(out)
}
