//! Preset configurations reproducing the published sweep and correlation
//! data sets.
//!
//! Each preset pins the chain toggles that isolate one effect:
//!
//! * `1b` — eta vs DAC resolution, otherwise-ideal transmitter, ideal
//!   measurement.
//! * `1c` — modulated constellation with the default insertion loss and
//!   extinction ratio.
//! * `2a` — eta vs fiber length, ideal transceiver.
//! * `2b` — analytic shot/thermal noise vs LO power.
//! * `2c` — ADC output/input eta vs resolution with detector noise on.
//! * `2d`/`2e` — Alice/Bob correlation histograms in the shot-noise
//!   dominated and thermal-noise dominated LO regimes.

use crate::chain::{run_chain_scoped, ChainConfig, ChainRun, StageToggles};
use crate::error::{Error, Result};
use crate::receiver::{self, NoisePoint};
use crate::sweep::{run_sweep, SweepAxis, SweepTable};
use crate::units;

/// Identifiers of the preset data sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    DacResolution1b,
    Constellation1c,
    ChannelLength2a,
    NoiseVsLo2b,
    AdcResolution2c,
    CorrelationHighLo2d,
    CorrelationLowLo2e,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::DacResolution1b,
        FigureId::Constellation1c,
        FigureId::ChannelLength2a,
        FigureId::NoiseVsLo2b,
        FigureId::AdcResolution2c,
        FigureId::CorrelationHighLo2d,
        FigureId::CorrelationLowLo2e,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1b" => Ok(FigureId::DacResolution1b),
            "1c" => Ok(FigureId::Constellation1c),
            "2a" => Ok(FigureId::ChannelLength2a),
            "2b" => Ok(FigureId::NoiseVsLo2b),
            "2c" => Ok(FigureId::AdcResolution2c),
            "2d" => Ok(FigureId::CorrelationHighLo2d),
            "2e" => Ok(FigureId::CorrelationLowLo2e),
            other => Err(Error::InvalidArgument(format!(
                "unknown figure id `{other}`; valid: 1b, 1c, 2a, 2b, 2c, 2d, 2e"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::DacResolution1b => "1b",
            FigureId::Constellation1c => "1c",
            FigureId::ChannelLength2a => "2a",
            FigureId::NoiseVsLo2b => "2b",
            FigureId::AdcResolution2c => "2c",
            FigureId::CorrelationHighLo2d => "2d",
            FigureId::CorrelationLowLo2e => "2e",
        }
    }
}

/// The data behind one preset.
#[derive(Debug, Clone)]
pub enum FigureData {
    Sweep(SweepTable),
    Noise {
        points: Vec<NoisePoint>,
        crossover_w: f64,
    },
    Constellation(Vec<(f64, f64)>),
    Run(Box<ChainRun>),
}

/// The chain configuration a preset runs with.
pub fn preset_config(id: FigureId, seed: u64, n_symbols: usize) -> ChainConfig {
    let mut cfg = ChainConfig::default();
    cfg.source.seed = seed;
    cfg.source.n_symbols = n_symbols;
    match id {
        FigureId::DacResolution1b => {
            // Quantization isolated: ideal modulator, ideal measurement.
            cfg.modulator.insertion_loss_db = 0.0;
            cfg.modulator.extinction_db = f64::INFINITY;
            cfg.stages = StageToggles {
                dac: true,
                modulator: true,
                ..StageToggles::IDENTITY
            };
        }
        FigureId::Constellation1c => {
            // Transmit side only; default loss and extinction show the
            // shrink and shift.
            cfg.stages = StageToggles {
                dac: true,
                modulator: true,
                ..StageToggles::IDENTITY
            };
        }
        FigureId::ChannelLength2a => {
            cfg.stages = StageToggles {
                channel: true,
                ..StageToggles::IDENTITY
            };
        }
        FigureId::NoiseVsLo2b => {}
        FigureId::AdcResolution2c => {
            // Full default chain; the reported column for this preset is
            // eta_adc, the ADC output/input ratio.
        }
        FigureId::CorrelationHighLo2d => {
            cfg.detector.lo_power_dbm = 14.1;
        }
        FigureId::CorrelationLowLo2e => {
            cfg.detector.lo_power_dbm = -25.9;
        }
    }
    cfg
}

/// Runs a preset.
pub fn run_figure(
    id: FigureId,
    seed: u64,
    n_symbols: usize,
    threads: Option<usize>,
) -> Result<FigureData> {
    let cfg = preset_config(id, seed, n_symbols);
    match id {
        FigureId::DacResolution1b => {
            let values: Vec<f64> = (1..=10).map(f64::from).collect();
            Ok(FigureData::Sweep(run_sweep(
                &cfg,
                SweepAxis::DacBits,
                &values,
                threads,
            )?))
        }
        FigureId::Constellation1c => {
            let run = run_chain_scoped(&cfg, "figure/1c", true)?;
            let samples = run.samples.expect("requested stage samples");
            let points = samples
                .tx_field_x
                .iter()
                .zip(&samples.tx_field_p)
                .map(|(&re, &im)| (re, im))
                .collect();
            Ok(FigureData::Constellation(points))
        }
        FigureId::ChannelLength2a => {
            let values = [0.0, 20.0, 40.0, 60.0, 80.0];
            Ok(FigureData::Sweep(run_sweep(
                &cfg,
                SweepAxis::LengthKm,
                &values,
                threads,
            )?))
        }
        FigureId::NoiseVsLo2b => {
            let det = cfg.detector.detector_config();
            let lo_powers: Vec<f64> = (-30..=20)
                .map(|dbm| units::dbm_to_watts(f64::from(dbm)))
                .collect();
            Ok(FigureData::Noise {
                points: receiver::noise_vs_lo_power(&det, &lo_powers),
                crossover_w: receiver::crossover_lo_power_w(&det),
            })
        }
        FigureId::AdcResolution2c => {
            let values: Vec<f64> = (1..=12).map(f64::from).collect();
            Ok(FigureData::Sweep(run_sweep(
                &cfg,
                SweepAxis::AdcBits,
                &values,
                threads,
            )?))
        }
        FigureId::CorrelationHighLo2d | FigureId::CorrelationLowLo2e => {
            let scope = format!("figure/{}", id.name());
            Ok(FigureData::Run(Box::new(run_chain_scoped(
                &cfg, &scope, false,
            )?)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(FigureId::parse(id.name()).unwrap(), id);
        }
        assert!(FigureId::parse("3z").is_err());
    }

    #[test]
    fn dac_preset_isolates_quantization() {
        let data = run_figure(FigureId::DacResolution1b, 1, 50_000, Some(2)).unwrap();
        let FigureData::Sweep(table) = data else {
            panic!("expected sweep")
        };
        assert_eq!(table.rows.len(), 10);
        // eta approaches 1 with resolution.
        let eta = table.eta_series();
        assert!((eta.last().unwrap().1 - 1.0).abs() < 0.01);
        for pair in eta.windows(2) {
            assert!(
                (pair[1].1 - 1.0).abs() <= (pair[0].1 - 1.0).abs() + 5e-3,
                "eta not monotone: {pair:?}"
            );
        }
    }

    #[test]
    fn noise_preset_brackets_the_crossover() {
        let data = run_figure(FigureId::NoiseVsLo2b, 1, 1, None).unwrap();
        let FigureData::Noise { points, crossover_w } = data else {
            panic!("expected noise sweep")
        };
        assert_eq!(points.len(), 51);
        // Shot is below thermal at -30 dBm and above at +20 dBm.
        assert!(points[0].shot_variance_a2 < points[0].thermal_variance_a2);
        assert!(points[50].shot_variance_a2 > points[50].thermal_variance_a2);
        assert!(crossover_w > points[0].lo_power_w && crossover_w < points[50].lo_power_w);
    }

    #[test]
    fn constellation_preset_shows_loss_and_shift() {
        let FigureData::Constellation(points) =
            run_figure(FigureId::Constellation1c, 2, 20_000, None).unwrap()
        else {
            panic!("expected constellation")
        };
        assert_eq!(points.len(), 20_000);
        // Centroid displaced from the origin by the extinction residue.
        let n = points.len() as f64;
        let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let cp = points.iter().map(|p| p.1).sum::<f64>() / n;
        assert!((cx * cx + cp * cp).sqrt() > 0.01);
    }
}
