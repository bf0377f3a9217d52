//! End-to-end chain orchestration.
//!
//! `run_chain` executes source -> pre-distortion -> DAC -> IQ modulator ->
//! fiber -> 90° hybrid + balanced detection -> ADC -> metrics, honouring
//! per-stage bypass toggles so any subset of non-idealities can be isolated.
//!
//! Unit bookkeeping: the transmit path works in SNU amplitudes. At the
//! receiver the field converts to sqrt-watts through the power of a 1-SNU
//! field, `P_1SNU = 2 e df / R_D`, chosen so that the beat-note gain of one
//! SNU equals the square root of the blocked-signal shot variance. Bob's
//! currents divide by the calibrated shot-noise reference, which puts his
//! samples back in SNU with the vacuum unit at 1.

use crate::adc::{self, AdcConfig};
use crate::channel::ChannelConfig;
use crate::constants::ELECTRON_CHARGE_C;
use crate::error::{Error, Result};
use crate::metrics::{self, stats, Histogram2d, MetricsReport, SnuCalibration};
use crate::modulator::{self, ModulatorConfig};
use crate::receiver::{DetectorConfig, NoiseToggles, ReceiverContext, DETECTION_GAIN};
use crate::rng::{labels, StreamFactory};
use crate::source::{self, SourceConfig};
use crate::txdsp::{self, DacConfig, PredistortConfig};
use crate::types::QuadratureBuffer;
use crate::units::{self, UnitsTag};
use std::collections::BTreeMap;

/// Transmit-DSP options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxConfig {
    /// Half carrier covers this many source standard deviations.
    pub headroom_sigma: f64,
    /// Invert the full finite-extinction map instead of the ideal path.
    pub compensate_extinction: bool,
    /// Abort on the first saturated symbol instead of clamping it.
    pub strict_saturation: bool,
}

impl Default for TxConfig {
    fn default() -> Self {
        Self {
            headroom_sigma: 4.0,
            compensate_extinction: false,
            strict_saturation: false,
        }
    }
}

/// DAC settings; the output range defaults to `[0, V_pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DacSettings {
    pub n_bits: u32,
    /// Peak-to-peak range; `None` uses the modulator's V_pi, matching the
    /// span of the arccos pre-distortion output.
    pub v_pp_volts: Option<f64>,
}

impl Default for DacSettings {
    fn default() -> Self {
        Self {
            n_bits: 8,
            v_pp_volts: None,
        }
    }
}

/// Modulator settings; the carrier defaults to the headroom-scaled value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatorSettings {
    pub v_pi_volts: f64,
    pub insertion_loss_db: f64,
    /// `f64::INFINITY` selects the ideal arm.
    pub extinction_db: f64,
    /// `None` derives `2 * headroom_sigma * sqrt(V_A)`.
    pub carrier_amplitude: Option<f64>,
}

impl Default for ModulatorSettings {
    fn default() -> Self {
        Self {
            v_pi_volts: 4.0,
            insertion_loss_db: 2.0,
            extinction_db: 20.0,
            carrier_amplitude: None,
        }
    }
}

/// Fiber settings, attenuation given in dB/km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSettings {
    pub attenuation_db_per_km: f64,
    pub length_km: f64,
}

impl Default for ChannelSettings {
    fn default() -> Self {
        Self {
            attenuation_db_per_km: 0.2,
            length_km: 20.0,
        }
    }
}

/// Detector settings; LO power is configured in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSettings {
    pub responsivity_a_per_w: f64,
    pub temperature_k: f64,
    pub load_resistance_ohm: f64,
    pub bandwidth_hz: f64,
    pub lo_power_dbm: f64,
    pub lo_phase_rad: f64,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            responsivity_a_per_w: 1.0,
            temperature_k: 300.0,
            load_resistance_ohm: 50.0,
            bandwidth_hz: 1.2e9,
            lo_power_dbm: 14.1,
            lo_phase_rad: 0.0,
        }
    }
}

impl DetectorSettings {
    pub fn detector_config(&self) -> DetectorConfig {
        DetectorConfig {
            responsivity_a_per_w: self.responsivity_a_per_w,
            temperature_k: self.temperature_k,
            load_resistance_ohm: self.load_resistance_ohm,
            bandwidth_hz: self.bandwidth_hz,
            lo_power_w: units::dbm_to_watts(self.lo_power_dbm),
            lo_phase_rad: self.lo_phase_rad,
        }
    }
}

/// ADC settings; the front-end gain defaults to the configured loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcSettings {
    pub n_bits: u32,
    /// Half range covers this many standard deviations of the analog input.
    pub loading_sigma: f64,
    pub v_pp_volts: f64,
    /// `None` sizes the transimpedance from the realized analog RMS.
    pub transimpedance_v_per_a: Option<f64>,
}

impl Default for AdcSettings {
    fn default() -> Self {
        Self {
            n_bits: 8,
            loading_sigma: 4.0,
            v_pp_volts: 2.0,
            transimpedance_v_per_a: None,
        }
    }
}

/// Per-stage enable flags; a disabled stage passes its input through
/// untouched (ideal behaviour).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageToggles {
    pub dac: bool,
    pub modulator: bool,
    pub channel: bool,
    pub receiver: bool,
    pub adc: bool,
    pub shot_noise: bool,
    pub thermal_noise: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            dac: true,
            modulator: true,
            channel: true,
            receiver: true,
            adc: true,
            shot_noise: true,
            thermal_noise: true,
        }
    }
}

impl StageToggles {
    /// Everything bypassed: the identity chain.
    pub const IDENTITY: Self = Self {
        dac: false,
        modulator: false,
        channel: false,
        receiver: false,
        adc: false,
        shot_noise: false,
        thermal_noise: false,
    };
}

/// Complete configuration of one chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub source: SourceConfig,
    pub tx: TxConfig,
    pub dac: DacSettings,
    pub modulator: ModulatorSettings,
    pub channel: ChannelSettings,
    pub detector: DetectorSettings,
    pub adc: AdcSettings,
    pub stages: StageToggles,
    pub hist_bins: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            source: SourceConfig::default(),
            tx: TxConfig::default(),
            dac: DacSettings::default(),
            modulator: ModulatorSettings::default(),
            channel: ChannelSettings::default(),
            detector: DetectorSettings::default(),
            adc: AdcSettings::default(),
            stages: StageToggles::default(),
            hist_bins: 64,
        }
    }
}

impl ChainConfig {
    /// Carrier amplitude in SNU units, explicit or headroom-derived.
    pub fn carrier_amplitude(&self) -> f64 {
        self.modulator.carrier_amplitude.unwrap_or_else(|| {
            2.0 * self.tx.headroom_sigma * self.source.modulation_variance_snu.sqrt()
        })
    }

    pub fn modulator_config(&self) -> ModulatorConfig {
        ModulatorConfig {
            v_pi_volts: self.modulator.v_pi_volts,
            insertion_loss_db: self.modulator.insertion_loss_db,
            extinction_db: self.modulator.extinction_db,
            carrier_amplitude: self.carrier_amplitude(),
        }
    }

    pub fn dac_config(&self) -> DacConfig {
        DacConfig {
            n_bits: self.dac.n_bits,
            v_pp_volts: self.dac.v_pp_volts.unwrap_or(self.modulator.v_pi_volts),
        }
    }

    pub fn channel_config(&self) -> ChannelConfig {
        ChannelConfig::from_db_per_km(self.channel.attenuation_db_per_km, self.channel.length_km)
    }

    pub fn predistort_config(&self) -> PredistortConfig {
        PredistortConfig {
            compensate_extinction: self.tx.compensate_extinction,
            ..Default::default()
        }
    }

    pub fn noise_toggles(&self) -> NoiseToggles {
        NoiseToggles {
            shot: self.stages.shot_noise,
            thermal: self.stages.thermal_noise,
        }
    }

    /// Optical power of a field with unit SNU amplitude, watts.
    ///
    /// `P_1SNU = 2 e df / (R_D gain)` makes the receiver's per-SNU beat
    /// gain equal to the blocked-signal shot-noise sigma, which is what
    /// anchors Bob's shot-noise-unit scale to the vacuum variance.
    pub fn snu_unit_power_w(&self) -> f64 {
        2.0 * ELECTRON_CHARGE_C * self.detector.bandwidth_hz
            / (self.detector.responsivity_a_per_w * DETECTION_GAIN)
    }

    /// Photons per squared SNU amplitude implied by the unit power.
    pub fn photons_per_snu(&self) -> f64 {
        self.snu_unit_power_w() / (self.source.photon_energy_j * self.source.symbol_rate_hz)
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if !(self.tx.headroom_sigma > 0.0) || !self.tx.headroom_sigma.is_finite() {
            return Err(Error::invalid_config(
                "tx.headroom_sigma",
                format!("must be a positive finite number, got {}", self.tx.headroom_sigma),
            ));
        }
        self.dac_config().validate()?;
        self.modulator_config().validate()?;
        self.channel_config().validate()?;
        self.detector.detector_config().validate()?;
        if !(self.adc.loading_sigma > 0.0) || !self.adc.loading_sigma.is_finite() {
            return Err(Error::invalid_config(
                "adc.loading_sigma",
                format!("must be a positive finite number, got {}", self.adc.loading_sigma),
            ));
        }
        if let Some(t) = self.adc.transimpedance_v_per_a {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid_config(
                    "adc.transimpedance_v_per_a",
                    format!("must be a positive finite number, got {t}"),
                ));
            }
        }
        AdcConfig {
            n_bits: self.adc.n_bits,
            v_pp_volts: self.adc.v_pp_volts,
            transimpedance_v_per_a: 1.0,
        }
        .validate()?;
        if self.hist_bins == 0 {
            return Err(Error::invalid_config("metrics.hist_bins", "must be >= 1"));
        }
        Ok(())
    }
}

/// Optional per-stage sample dump of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageSamples {
    pub drive_v_x: Vec<f64>,
    pub drive_v_p: Vec<f64>,
    pub tx_field_x: Vec<f64>,
    pub tx_field_p: Vec<f64>,
    pub rx_current_x: Vec<f64>,
    pub rx_current_p: Vec<f64>,
    pub adc_volts_x: Vec<f64>,
    pub adc_volts_p: Vec<f64>,
}

/// Output of one chain run.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub report: MetricsReport,
    /// Alice's drawn quadratures, SNU.
    pub alice: QuadratureBuffer,
    /// Bob's measured quadratures, SNU.
    pub bob: QuadratureBuffer,
    pub calibration: Option<SnuCalibration>,
    pub samples: Option<StageSamples>,
}

/// Runs the chain under the default `"run"` stream scope.
pub fn run_chain(cfg: &ChainConfig) -> Result<ChainRun> {
    run_chain_scoped(cfg, "run", false)
}

/// Runs the chain with an explicit stream scope, optionally collecting
/// per-stage samples.
pub fn run_chain_scoped(cfg: &ChainConfig, scope: &str, collect: bool) -> Result<ChainRun> {
    cfg.validate()?;
    let n = cfg.source.n_symbols;
    let factory = StreamFactory::from_seed(cfg.source.seed);
    let mut samples = collect.then(StageSamples::default);
    let mut budget = BTreeMap::new();

    // Source.
    let alice = source::draw_quadratures_with(&cfg.source, &factory, scope)
        .map_err(|e| e.in_stage("source"))?;

    // Transmit DSP and modulator: SNU field quadratures.
    let mod_cfg = cfg.modulator_config();
    let mut clipped = 0usize;
    let (mut field_x, mut field_p) = if cfg.stages.modulator {
        let pd = cfg.predistort_config();
        let (mut v_x, mut v_p, clip_count) = txdsp::predistort_block(
            &alice.x,
            &alice.p,
            &mod_cfg,
            &pd,
            cfg.tx.strict_saturation,
        )
        .map_err(|e| e.in_stage("txdsp"))?;
        clipped = clip_count;
        if cfg.stages.dac {
            let dac_cfg = cfg.dac_config();
            for v in v_x.iter_mut().chain(v_p.iter_mut()) {
                *v = txdsp::dac_quantize(*v, &dac_cfg);
            }
        }
        let mut fx = Vec::with_capacity(n);
        let mut fp = Vec::with_capacity(n);
        for i in 0..n {
            let field = modulator::modulate(v_x[i], v_p[i], &mod_cfg);
            fx.push(field.amplitude.re);
            fp.push(field.amplitude.im);
        }
        if let Some(s) = samples.as_mut() {
            s.drive_v_x = v_x;
            s.drive_v_p = v_p;
        }
        (fx, fp)
    } else {
        (alice.x.clone(), alice.p.clone())
    };

    let tx_distortion = {
        let dx: Vec<f64> = field_x.iter().zip(&alice.x).map(|(f, a)| f - a).collect();
        let dp: Vec<f64> = field_p.iter().zip(&alice.p).map(|(f, a)| f - a).collect();
        if n >= 2 {
            stats::pooled_variance(&[&dx, &dp]).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    budget.insert("tx_distortion_snu".to_string(), tx_distortion);
    if let Some(s) = samples.as_mut() {
        s.tx_field_x = field_x.clone();
        s.tx_field_p = field_p.clone();
    }

    // Fiber span: pure sqrt(transmittance) scaling.
    let chan_cfg = cfg.channel_config();
    let transmittance = if cfg.stages.channel {
        let factor = chan_cfg.amplitude_factor();
        for v in field_x.iter_mut().chain(field_p.iter_mut()) {
            *v *= factor;
        }
        chan_cfg.transmittance()
    } else {
        1.0
    };

    // Receiver: physical units, balanced detection, noise.
    let det_cfg = cfg.detector.detector_config();
    let noise = cfg.noise_toggles();
    let mut calibration = None;
    let (mut out_x, mut out_p, units_after_rx, snu_per_out);
    if cfg.stages.receiver {
        let amp_scale = cfg.snu_unit_power_w().sqrt();
        let mean_signal_power_w = if n > 0 {
            field_x
                .iter()
                .zip(&field_p)
                .map(|(&x, &p)| x * x + p * p)
                .sum::<f64>()
                / n as f64
                * cfg.snu_unit_power_w()
        } else {
            0.0
        };
        let rx = ReceiverContext::new(det_cfg, noise, mean_signal_power_w)
            .map_err(|e| e.in_stage("receiver"))?;
        let mut shot_rng = factory.scoped_stream(scope, labels::SHOT_NOISE);
        let mut thermal_rng = factory.scoped_stream(scope, labels::THERMAL_NOISE);
        let mut ix = Vec::with_capacity(n);
        let mut ip = Vec::with_capacity(n);
        for i in 0..n {
            let signal = crate::types::OpticalField::new(num_complex::Complex::new(
                field_x[i] * amp_scale,
                field_p[i] * amp_scale,
            ));
            let pair = rx.detect(signal, &mut shot_rng, &mut thermal_rng);
            ix.push(pair.x);
            ip.push(pair.p);
        }
        let cal = metrics::calibrate_snu(&det_cfg, noise, n.max(2), &factory, scope)
            .map_err(|e| e.in_stage("receiver"))?;
        let reference = cal.reference_a2;
        if !(reference > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "shot-noise-unit reference must be positive, got {reference}"
            ))
            .in_stage("receiver"));
        }
        if cfg.stages.shot_noise {
            budget.insert(
                "shot_snu".to_string(),
                crate::receiver::shot_noise_variance(&det_cfg, mean_signal_power_w) / reference,
            );
        } else {
            budget.insert("shot_snu".to_string(), 0.0);
        }
        if cfg.stages.thermal_noise {
            budget.insert(
                "thermal_snu".to_string(),
                crate::receiver::thermal_noise_variance(&det_cfg) / reference,
            );
        } else {
            budget.insert("thermal_snu".to_string(), 0.0);
        }
        if let Some(s) = samples.as_mut() {
            s.rx_current_x = ix.clone();
            s.rx_current_p = ip.clone();
        }
        snu_per_out = 1.0 / reference.sqrt();
        calibration = Some(cal);
        out_x = ix;
        out_p = ip;
        units_after_rx = UnitsTag::Amperes;
    } else {
        budget.insert("shot_snu".to_string(), 0.0);
        budget.insert("thermal_snu".to_string(), 0.0);
        out_x = field_x;
        out_p = field_p;
        units_after_rx = UnitsTag::Snu;
        snu_per_out = 1.0;
    }

    // ADC: mid-tread quantization of the receiver output.
    let mut eta_adc = 1.0;
    if cfg.stages.adc {
        let rms = if n >= 2 {
            stats::pooled_variance(&[&out_x, &out_p])
                .map_err(|e| e.in_stage("adc"))?
                .sqrt()
        } else {
            0.0
        };
        let adc_cfg = match cfg.adc.transimpedance_v_per_a {
            Some(t) => AdcConfig {
                n_bits: cfg.adc.n_bits,
                v_pp_volts: cfg.adc.v_pp_volts,
                transimpedance_v_per_a: t,
            },
            None => AdcConfig::auto(cfg.adc.n_bits, rms, cfg.adc.loading_sigma, cfg.adc.v_pp_volts),
        };
        adc_cfg.validate().map_err(|e| e.in_stage("adc"))?;
        let gain = adc_cfg.transimpedance_v_per_a;
        let mut analog_var = 0.0;
        let mut quant_var = 0.0;
        let mut diff_var = 0.0;
        {
            let analog_x: Vec<f64> = out_x.iter().map(|&v| v * gain).collect();
            let analog_p: Vec<f64> = out_p.iter().map(|&v| v * gain).collect();
            let q_x: Vec<f64> = analog_x.iter().map(|&v| adc::adc_quantize(v, &adc_cfg)).collect();
            let q_p: Vec<f64> = analog_p.iter().map(|&v| adc::adc_quantize(v, &adc_cfg)).collect();
            if n >= 2 {
                analog_var = stats::pooled_variance(&[&analog_x, &analog_p]).unwrap();
                quant_var = stats::pooled_variance(&[&q_x, &q_p]).unwrap();
                let d_x: Vec<f64> = q_x.iter().zip(&analog_x).map(|(q, a)| q - a).collect();
                let d_p: Vec<f64> = q_p.iter().zip(&analog_p).map(|(q, a)| q - a).collect();
                diff_var = stats::pooled_variance(&[&d_x, &d_p]).unwrap();
            }
            if let Some(s) = samples.as_mut() {
                s.adc_volts_x = q_x.clone();
                s.adc_volts_p = q_p.clone();
            }
            out_x = q_x.iter().map(|&v| v / gain).collect();
            out_p = q_p.iter().map(|&v| v / gain).collect();
        }
        if analog_var > 0.0 {
            eta_adc = quant_var / analog_var;
        }
        // Convert the quantization spread back to SNU at Bob.
        budget.insert(
            "adc_quantization_snu".to_string(),
            diff_var / (gain * gain) * snu_per_out * snu_per_out,
        );
    } else {
        budget.insert("adc_quantization_snu".to_string(), 0.0);
    }

    // Bob in SNU.
    let bob = QuadratureBuffer {
        x: out_x.iter().map(|&v| v * snu_per_out).collect(),
        p: out_p.iter().map(|&v| v * snu_per_out).collect(),
        units: if units_after_rx == UnitsTag::Amperes {
            UnitsTag::Snu
        } else {
            units_after_rx
        },
    };

    // Metrics.
    let alice_var = stats::pooled_variance(&[&alice.x, &alice.p]).map_err(|e| e.in_stage("metrics"))?;
    let bob_var = stats::pooled_variance(&[&bob.x, &bob.p]).map_err(|e| e.in_stage("metrics"))?;
    let eta = bob_var / alice_var;
    let pearson_x = stats::pearson(&alice.x, &bob.x).map_err(|e| e.in_stage("metrics"))?;
    let pearson_p = stats::pearson(&alice.p, &bob.p).map_err(|e| e.in_stage("metrics"))?;

    // Correlation display rescales Bob by the known sqrt(transmittance);
    // Pearson r is unaffected by the positive scaling.
    let display_gain = 1.0 / transmittance.sqrt();
    let disp_x: Vec<f64> = bob.x.iter().map(|&v| v * display_gain).collect();
    let disp_p: Vec<f64> = bob.p.iter().map(|&v| v * display_gain).collect();
    let hist_x = Histogram2d::from_samples(&alice.x, &disp_x, cfg.hist_bins)
        .map_err(|e| e.in_stage("metrics"))?;
    let hist_p = Histogram2d::from_samples(&alice.p, &disp_p, cfg.hist_bins)
        .map_err(|e| e.in_stage("metrics"))?;

    let (snu_reference_a2, shot_variance_a2, thermal_variance_a2) = match &calibration {
        Some(cal) => (
            cal.reference_a2,
            if cfg.stages.shot_noise { cal.shot_analytic_a2 } else { 0.0 },
            if cfg.stages.thermal_noise { cal.thermal_analytic_a2 } else { 0.0 },
        ),
        None => (0.0, 0.0, 0.0),
    };

    let report = MetricsReport {
        eta,
        eta_adc,
        pearson_x,
        pearson_p,
        clip_fraction: clipped as f64 / (2 * n.max(1)) as f64,
        alice_variance_snu: alice_var,
        bob_variance_snu: bob_var,
        snu_reference_a2,
        shot_variance_a2,
        thermal_variance_a2,
        noise_budget: budget,
        n_symbols: n,
        hist_x,
        hist_p,
    };

    Ok(ChainRun {
        report,
        alice,
        bob,
        calibration,
        samples,
    })
}
