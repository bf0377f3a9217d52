//! Parameter sweeps over the chain.
//!
//! Each sweep point runs the full chain with an independent, deterministic
//! stream scope derived from `(seed, axis, value)`, so a sweep produces the
//! same table whether the points execute serially or in a worker pool.

use crate::chain::{run_chain_scoped, ChainConfig};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use rayon::prelude::*;

/// The parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DacBits,
    AdcBits,
    LoPowerDbm,
    LengthKm,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [
        SweepAxis::DacBits,
        SweepAxis::AdcBits,
        SweepAxis::LoPowerDbm,
        SweepAxis::LengthKm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::DacBits => "dac.n_bits",
            SweepAxis::AdcBits => "adc.n_bits",
            SweepAxis::LoPowerDbm => "detector.lo_power_dbm",
            SweepAxis::LengthKm => "channel.length_km",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "dac.n_bits" => Ok(SweepAxis::DacBits),
            "adc.n_bits" => Ok(SweepAxis::AdcBits),
            "detector.lo_power_dbm" | "detector.p_lo" => Ok(SweepAxis::LoPowerDbm),
            "channel.length_km" => Ok(SweepAxis::LengthKm),
            other => Err(Error::UnknownAxis {
                given: other.to_string(),
                valid: Self::ALL.iter().map(|a| a.name().to_string()).collect(),
            }),
        }
    }

    fn bits_value(&self, value: f64) -> Result<u32> {
        if value.fract() != 0.0 || !(1.0..=48.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "{} must be an integer in 1..=48, got {value}",
                self.name()
            )));
        }
        Ok(value as u32)
    }

    /// Applies the axis value onto a copy of the base configuration.
    pub fn apply(&self, base: &ChainConfig, value: f64) -> Result<ChainConfig> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::DacBits => cfg.dac.n_bits = self.bits_value(value)?,
            SweepAxis::AdcBits => cfg.adc.n_bits = self.bits_value(value)?,
            SweepAxis::LoPowerDbm => {
                if !value.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "detector.lo_power_dbm must be finite, got {value}"
                    )));
                }
                cfg.detector.lo_power_dbm = value;
            }
            SweepAxis::LengthKm => {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "channel.length_km must be >= 0, got {value}"
                    )));
                }
                cfg.channel.length_km = value;
            }
        }
        Ok(cfg)
    }
}

/// One sweep row: the axis value and the run's report.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub report: MetricsReport,
}

/// Ordered sweep results.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const SCALAR_COLUMNS: [&'static str; 12] = [
        "eta",
        "eta_adc",
        "pearson_x",
        "pearson_p",
        "clip_fraction",
        "alice_variance_snu",
        "bob_variance_snu",
        "snu_reference_a2",
        "shot_variance_a2",
        "thermal_variance_a2",
        "tx_distortion_snu",
        "adc_quantization_snu",
    ];

    /// RFC-4180-style CSV with a header row; floats print in Rust's
    /// shortest round-trippable form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.axis);
        for col in Self::SCALAR_COLUMNS {
            out.push(',');
            out.push_str(col);
        }
        out.push('\n');
        for row in &self.rows {
            let r = &row.report;
            let budget = |key: &str| r.noise_budget.get(key).copied().unwrap_or(0.0);
            let values = [
                row.value,
                r.eta,
                r.eta_adc,
                r.pearson_x,
                r.pearson_p,
                r.clip_fraction,
                r.alice_variance_snu,
                r.bob_variance_snu,
                r.snu_reference_a2,
                r.shot_variance_a2,
                r.thermal_variance_a2,
                budget("tx_distortion_snu"),
                budget("adc_quantization_snu"),
            ];
            let mut first = true;
            for v in values {
                if !first {
                    out.push(',');
                }
                out.push_str(&format!("{v}"));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// `(value, eta)` pairs, convenient for threshold checks.
    pub fn eta_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.value, r.report.eta)).collect()
    }
}

/// Stream scope of one sweep point.
pub fn point_scope(axis: SweepAxis, value: f64) -> String {
    format!("sweep/{}={}", axis.name(), value)
}

/// Runs the chain once per axis value.
///
/// `threads` limits the worker pool; `None` uses the process-global pool.
/// Rows come back in input order and are identical for any thread count.
pub fn run_sweep(
    base: &ChainConfig,
    axis: SweepAxis,
    values: &[f64],
    threads: Option<usize>,
) -> Result<SweepTable> {
    let run_point = |&value: &f64| -> Result<SweepRow> {
        let cfg = axis.apply(base, value)?;
        let run = run_chain_scoped(&cfg, &point_scope(axis, value), false)?;
        Ok(SweepRow {
            value,
            report: run.report,
        })
    };

    let rows: Result<Vec<SweepRow>> = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| values.par_iter().map(run_point).collect())
        }
        None => values.par_iter().map(run_point).collect(),
    };

    Ok(SweepTable {
        axis: axis.name().to_string(),
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{ChainConfig, StageToggles};
    use crate::source::SourceConfig;

    fn base(n: usize) -> ChainConfig {
        ChainConfig {
            source: SourceConfig {
                n_symbols: n,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn unknown_axis_lists_valid_names() {
        let err = SweepAxis::parse("detector.gain").unwrap_err();
        let text = err.to_string();
        for name in ["dac.n_bits", "adc.n_bits", "detector.lo_power_dbm", "channel.length_km"] {
            assert!(text.contains(name), "{text}");
        }
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let table = run_sweep(&base(100), SweepAxis::DacBits, &[], Some(1)).unwrap();
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("dac.n_bits,eta,"));
    }

    #[test]
    fn non_integer_bits_are_rejected() {
        let err = run_sweep(&base(100), SweepAxis::AdcBits, &[2.5], Some(1)).unwrap_err();
        assert!(err.to_string().contains("adc.n_bits"));
    }

    #[test]
    fn serial_and_parallel_tables_are_identical() {
        let mut cfg = base(20_000);
        cfg.stages = StageToggles::default();
        let values = [0.0, 10.0, 20.0, 40.0];
        let serial = run_sweep(&cfg, SweepAxis::LengthKm, &values, Some(1)).unwrap();
        let parallel = run_sweep(&cfg, SweepAxis::LengthKm, &values, Some(4)).unwrap();
        assert_eq!(serial.to_csv(), parallel.to_csv());
    }

    #[test]
    fn csv_round_trips_exact_doubles() {
        let table = run_sweep(&base(5000), SweepAxis::LengthKm, &[12.5], Some(1)).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        let _header = lines.next().unwrap();
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row[0], 12.5);
        assert_eq!(row[1], table.rows[0].report.eta);
        assert_eq!(row[3], table.rows[0].report.pearson_x);
    }
}
