//! Unit tags and decibel conversions.

use serde::Serialize;

/// Unit system a quadrature sample is expressed in.
///
/// The tag travels with sample buffers so that stages can assert the units
/// they accept instead of silently mixing shot-noise units with electrical
/// quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnitsTag {
    /// Shot-noise units: vacuum quadrature variance is 1 by convention.
    Snu,
    /// Volts (DAC/ADC domain).
    Volts,
    /// Amperes (photocurrent domain).
    Amperes,
}

impl std::fmt::Display for UnitsTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitsTag::Snu => write!(f, "SNU"),
            UnitsTag::Volts => write!(f, "V"),
            UnitsTag::Amperes => write!(f, "A"),
        }
    }
}

/// dB value to linear power ratio.
pub fn db_to_power_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn power_ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// dB value to linear field (amplitude) ratio.
pub fn db_to_field_ratio(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        for dbm in [-25.9, 0.0, 0.15, 14.1] {
            assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_dbm_is_one_milliwatt() {
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn field_ratio_is_sqrt_of_power_ratio() {
        let db = 2.0;
        let f = db_to_field_ratio(db);
        assert!((f * f - db_to_power_ratio(db)).abs() < 1e-15);
    }
}
