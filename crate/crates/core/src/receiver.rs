//! Phase-diverse coherent receiver.
//!
//! A lossless 90° hybrid splits signal `S` and local oscillator `L` into the
//! four combinations `(S ± L)/2`, `(S ± jL)/2`. Two balanced photodiode
//! pairs take port power differences, leaving the beat terms
//!
//! ```text
//! i_x = R_D |L||S| cos(phi)      i_p = R_D |L||S| sin(phi)
//! ```
//!
//! with `phi` the signal-LO phase difference. This single-diode-equivalent
//! gain convention (no factor 2) follows from the chosen hybrid split; see
//! [`DETECTION_GAIN`] to move to the alternative convention.
//!
//! Each quadrature current then receives additive white Gaussian noise with
//! variance `sigma_shot^2 + sigma_thermal^2`, where
//! `sigma_shot^2 = 2 e I df` (I the DC photocurrent per balanced pair) and
//! `sigma_thermal^2 = 4 K T df / R_L`.

use crate::constants::{BOLTZMANN_J_PER_K, ELECTRON_CHARGE_C};
use crate::error::{Error, Result};
use crate::types::{OpticalField, QuadraturePair};
use crate::units::UnitsTag;
use num_complex::Complex;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Gain convention of the balanced pair relative to the single-diode beat
/// term. 1.0 reproduces `i = R_D L S cos(phi)` from the `(S ± L)/2` hybrid;
/// set 2.0 for the full-swing balanced convention.
pub const DETECTION_GAIN: f64 = 1.0;

/// Detector and local-oscillator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Photodiode responsivity, A/W.
    pub responsivity_a_per_w: f64,
    /// Detector temperature, kelvin.
    pub temperature_k: f64,
    /// Load resistance, ohms.
    pub load_resistance_ohm: f64,
    /// Detection bandwidth, Hz.
    pub bandwidth_hz: f64,
    /// Local-oscillator power, watts.
    pub lo_power_w: f64,
    /// Phase of the LO relative to the signal frame, radians.
    pub lo_phase_rad: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            responsivity_a_per_w: 1.0,
            temperature_k: 300.0,
            load_resistance_ohm: 50.0,
            bandwidth_hz: 1.2e9,
            lo_power_w: crate::units::dbm_to_watts(14.1),
            lo_phase_rad: 0.0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("detector.responsivity_a_per_w", self.responsivity_a_per_w),
            ("detector.temperature_k", self.temperature_k),
            ("detector.load_resistance_ohm", self.load_resistance_ohm),
            ("detector.bandwidth_hz", self.bandwidth_hz),
            ("detector.lo_power_w", self.lo_power_w),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid_config(
                    name,
                    format!("must be a positive finite number, got {value}"),
                ));
            }
        }
        if !self.lo_phase_rad.is_finite() {
            return Err(Error::invalid_config(
                "detector.lo_phase_rad",
                "must be finite",
            ));
        }
        Ok(())
    }

    /// LO field amplitude in sqrt-watts, including the phase reference.
    pub fn lo_field(&self) -> OpticalField {
        OpticalField::new(Complex::from_polar(self.lo_power_w.sqrt(), self.lo_phase_rad))
    }
}

/// The four output fields of a lossless 90° hybrid.
pub fn hybrid_mix(signal: OpticalField, lo: OpticalField) -> [OpticalField; 4] {
    let s = signal.amplitude;
    let l = lo.amplitude;
    let j = Complex::new(0.0, 1.0);
    [
        OpticalField::new((s + l) / 2.0),
        OpticalField::new((s - l) / 2.0),
        OpticalField::new((s + j * l) / 2.0),
        OpticalField::new((s - j * l) / 2.0),
    ]
}

/// Noiseless difference currents of the two balanced pairs, amperes.
pub fn balanced_photocurrents(ports: &[OpticalField; 4], responsivity_a_per_w: f64) -> (f64, f64) {
    let i_x = responsivity_a_per_w * (ports[0].power() - ports[1].power());
    let i_p = responsivity_a_per_w * (ports[2].power() - ports[3].power());
    (DETECTION_GAIN * i_x, DETECTION_GAIN * i_p)
}

/// Shot-noise variance `2 e I df` with `I = R_D (P_LO + P_S)`, amperes^2.
pub fn shot_noise_variance(cfg: &DetectorConfig, signal_power_w: f64) -> f64 {
    let photocurrent =
        cfg.responsivity_a_per_w * (cfg.lo_power_w + signal_power_w) * DETECTION_GAIN;
    2.0 * ELECTRON_CHARGE_C * photocurrent * cfg.bandwidth_hz
}

/// Thermal (Johnson) noise variance `4 K T df / R_L`, amperes^2.
pub fn thermal_noise_variance(cfg: &DetectorConfig) -> f64 {
    4.0 * BOLTZMANN_J_PER_K * cfg.temperature_k * cfg.bandwidth_hz / cfg.load_resistance_ohm
}

/// LO power at which shot and thermal variances cross:
/// `P_LO* = 2 K T / (e R_L R_D)`, watts.
pub fn crossover_lo_power_w(cfg: &DetectorConfig) -> f64 {
    2.0 * BOLTZMANN_J_PER_K * cfg.temperature_k
        / (ELECTRON_CHARGE_C * cfg.load_resistance_ohm * cfg.responsivity_a_per_w * DETECTION_GAIN)
}

/// One point of the LO-power noise characterization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NoisePoint {
    pub lo_power_w: f64,
    pub shot_variance_a2: f64,
    pub thermal_variance_a2: f64,
}

/// Shot and thermal variances over an LO power sweep (dark signal port).
pub fn noise_vs_lo_power(cfg: &DetectorConfig, lo_powers_w: &[f64]) -> Vec<NoisePoint> {
    lo_powers_w
        .iter()
        .map(|&lo_power_w| {
            let point_cfg = DetectorConfig {
                lo_power_w,
                ..*cfg
            };
            NoisePoint {
                lo_power_w,
                shot_variance_a2: shot_noise_variance(&point_cfg, 0.0),
                thermal_variance_a2: thermal_noise_variance(&point_cfg),
            }
        })
        .collect()
}

/// Which noise terms are injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseToggles {
    pub shot: bool,
    pub thermal: bool,
}

impl NoiseToggles {
    pub const ON: Self = Self {
        shot: true,
        thermal: true,
    };
    pub const OFF: Self = Self {
        shot: false,
        thermal: false,
    };
}

/// Per-run receiver state: precomputed noise sigmas and the LO field.
#[derive(Debug)]
pub struct ReceiverContext {
    pub cfg: DetectorConfig,
    pub toggles: NoiseToggles,
    lo: OpticalField,
    sigma_shot: f64,
    sigma_thermal: f64,
}

impl ReceiverContext {
    /// `mean_signal_power_w` enters the DC photocurrent for the shot term.
    pub fn new(cfg: DetectorConfig, toggles: NoiseToggles, mean_signal_power_w: f64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            lo: cfg.lo_field(),
            sigma_shot: if toggles.shot {
                shot_noise_variance(&cfg, mean_signal_power_w).sqrt()
            } else {
                0.0
            },
            sigma_thermal: if toggles.thermal {
                thermal_noise_variance(&cfg).sqrt()
            } else {
                0.0
            },
            cfg,
            toggles,
        })
    }

    /// Hybrid mix, balanced detection and noise injection for one symbol.
    ///
    /// `signal` is the received field in sqrt-watt units. The two noise
    /// streams stay independent between quadratures and across symbols.
    pub fn detect(
        &self,
        signal: OpticalField,
        shot_rng: &mut ChaCha12Rng,
        thermal_rng: &mut ChaCha12Rng,
    ) -> QuadraturePair {
        let ports = hybrid_mix(signal, self.lo);
        let (mut i_x, mut i_p) = balanced_photocurrents(&ports, self.cfg.responsivity_a_per_w);
        if self.toggles.shot {
            let nx: f64 = StandardNormal.sample(shot_rng);
            let np: f64 = StandardNormal.sample(shot_rng);
            i_x += self.sigma_shot * nx;
            i_p += self.sigma_shot * np;
        }
        if self.toggles.thermal {
            let nx: f64 = StandardNormal.sample(thermal_rng);
            let np: f64 = StandardNormal.sample(thermal_rng);
            i_x += self.sigma_thermal * nx;
            i_p += self.sigma_thermal * np;
        }
        QuadraturePair {
            x: i_x,
            p: i_p,
            units: UnitsTag::Amperes,
        }
    }

    /// Total injected noise variance per quadrature, amperes^2.
    pub fn noise_variance_a2(&self) -> f64 {
        self.sigma_shot.powi(2) + self.sigma_thermal.powi(2)
    }
}
