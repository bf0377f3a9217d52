//! Flat key/value config files.
//!
//! One `section.key = value` assignment per line, `#` comments, blank lines
//! ignored. Values are numbers, booleans, `inf` for the ideal-extinction
//! sentinel, or `auto` for fields the chain derives itself. `emit` writes
//! every key with its unit in a trailing comment and round-trips exactly:
//! `parse(emit(cfg)) == cfg`.

use crate::chain::ChainConfig;
use crate::error::{Error, Result};

/// Canonical `(key, value, unit)` listing of a configuration.
pub fn to_pairs(cfg: &ChainConfig) -> Vec<(String, String, &'static str)> {
    let fmt = |v: f64| format!("{v}");
    let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_else(|| "auto".into());
    vec![
        (
            "source.modulation_variance_snu".into(),
            fmt(cfg.source.modulation_variance_snu),
            "SNU",
        ),
        ("source.n_symbols".into(), cfg.source.n_symbols.to_string(), "count"),
        ("source.seed".into(), cfg.source.seed.to_string(), "integer"),
        ("source.symbol_rate_hz".into(), fmt(cfg.source.symbol_rate_hz), "Hz"),
        ("source.photon_energy_j".into(), fmt(cfg.source.photon_energy_j), "J"),
        ("tx.headroom_sigma".into(), fmt(cfg.tx.headroom_sigma), "sigma"),
        (
            "tx.compensate_extinction".into(),
            cfg.tx.compensate_extinction.to_string(),
            "bool",
        ),
        (
            "tx.strict_saturation".into(),
            cfg.tx.strict_saturation.to_string(),
            "bool",
        ),
        ("dac.n_bits".into(), cfg.dac.n_bits.to_string(), "bits"),
        ("dac.v_pp_volts".into(), opt(cfg.dac.v_pp_volts), "V (auto = V_pi)"),
        ("modulator.v_pi_volts".into(), fmt(cfg.modulator.v_pi_volts), "V"),
        (
            "modulator.insertion_loss_db".into(),
            fmt(cfg.modulator.insertion_loss_db),
            "dB",
        ),
        (
            "modulator.extinction_db".into(),
            fmt(cfg.modulator.extinction_db),
            "dB (inf = ideal)",
        ),
        (
            "modulator.carrier_amplitude".into(),
            opt(cfg.modulator.carrier_amplitude),
            "SNU amplitude (auto = headroom)",
        ),
        (
            "channel.attenuation_db_per_km".into(),
            fmt(cfg.channel.attenuation_db_per_km),
            "dB/km",
        ),
        ("channel.length_km".into(), fmt(cfg.channel.length_km), "km"),
        (
            "detector.responsivity_a_per_w".into(),
            fmt(cfg.detector.responsivity_a_per_w),
            "A/W",
        ),
        ("detector.temperature_k".into(), fmt(cfg.detector.temperature_k), "K"),
        (
            "detector.load_resistance_ohm".into(),
            fmt(cfg.detector.load_resistance_ohm),
            "ohm",
        ),
        ("detector.bandwidth_hz".into(), fmt(cfg.detector.bandwidth_hz), "Hz"),
        ("detector.lo_power_dbm".into(), fmt(cfg.detector.lo_power_dbm), "dBm"),
        ("detector.lo_phase_rad".into(), fmt(cfg.detector.lo_phase_rad), "rad"),
        ("adc.n_bits".into(), cfg.adc.n_bits.to_string(), "bits"),
        ("adc.loading_sigma".into(), fmt(cfg.adc.loading_sigma), "sigma"),
        ("adc.v_pp_volts".into(), fmt(cfg.adc.v_pp_volts), "V"),
        (
            "adc.transimpedance_v_per_a".into(),
            opt(cfg.adc.transimpedance_v_per_a),
            "V/A (auto = loading)",
        ),
        ("stages.dac".into(), cfg.stages.dac.to_string(), "bool"),
        ("stages.modulator".into(), cfg.stages.modulator.to_string(), "bool"),
        ("stages.channel".into(), cfg.stages.channel.to_string(), "bool"),
        ("stages.receiver".into(), cfg.stages.receiver.to_string(), "bool"),
        ("stages.adc".into(), cfg.stages.adc.to_string(), "bool"),
        ("stages.shot_noise".into(), cfg.stages.shot_noise.to_string(), "bool"),
        (
            "stages.thermal_noise".into(),
            cfg.stages.thermal_noise.to_string(),
            "bool",
        ),
        ("metrics.hist_bins".into(), cfg.hist_bins.to_string(), "count"),
    ]
}

/// Renders a config file with per-key unit comments.
pub fn emit(cfg: &ChainConfig) -> String {
    let mut out = String::from("# chain configuration; units per key in trailing comments\n");
    let mut section = String::new();
    for (key, value, unit) in to_pairs(cfg) {
        let this_section = key.split('.').next().unwrap_or("").to_string();
        if this_section != section {
            out.push('\n');
            section = this_section;
        }
        out.push_str(&format!("{key} = {value}  # {unit}\n"));
    }
    out
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| Error::ConfigParse {
        line,
        reason: format!("`{key}` expects a number, got `{value}`"),
    })?;
    if v.is_nan() {
        return Err(Error::ConfigParse {
            line,
            reason: format!("`{key}` must not be NaN"),
        });
    }
    Ok(v)
}

fn parse_opt_f64(value: &str, line: usize, key: &str) -> Result<Option<f64>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse_f64(value, line, key).map(Some)
    }
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool> {
    value.parse().map_err(|_| Error::ConfigParse {
        line,
        reason: format!("`{key}` expects true or false, got `{value}`"),
    })
}

fn parse_u64(value: &str, line: usize, key: &str) -> Result<u64> {
    value.parse().map_err(|_| Error::ConfigParse {
        line,
        reason: format!("`{key}` expects an unsigned integer, got `{value}`"),
    })
}

/// Parses a config file, starting from defaults and applying each key.
pub fn parse(text: &str) -> Result<ChainConfig> {
    let mut cfg = ChainConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
            line,
            reason: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut cfg, key, value, line)?;
    }
    Ok(cfg)
}

fn apply_key(cfg: &mut ChainConfig, key: &str, value: &str, line: usize) -> Result<()> {
    match key {
        "source.modulation_variance_snu" => {
            cfg.source.modulation_variance_snu = parse_f64(value, line, key)?
        }
        "source.n_symbols" => cfg.source.n_symbols = parse_u64(value, line, key)? as usize,
        "source.seed" => cfg.source.seed = parse_u64(value, line, key)?,
        "source.symbol_rate_hz" => cfg.source.symbol_rate_hz = parse_f64(value, line, key)?,
        "source.photon_energy_j" => cfg.source.photon_energy_j = parse_f64(value, line, key)?,
        "tx.headroom_sigma" => cfg.tx.headroom_sigma = parse_f64(value, line, key)?,
        "tx.compensate_extinction" => {
            cfg.tx.compensate_extinction = parse_bool(value, line, key)?
        }
        "tx.strict_saturation" => cfg.tx.strict_saturation = parse_bool(value, line, key)?,
        "dac.n_bits" => cfg.dac.n_bits = parse_u64(value, line, key)? as u32,
        "dac.v_pp_volts" => cfg.dac.v_pp_volts = parse_opt_f64(value, line, key)?,
        "modulator.v_pi_volts" => cfg.modulator.v_pi_volts = parse_f64(value, line, key)?,
        "modulator.insertion_loss_db" => {
            cfg.modulator.insertion_loss_db = parse_f64(value, line, key)?
        }
        "modulator.extinction_db" => cfg.modulator.extinction_db = parse_f64(value, line, key)?,
        "modulator.carrier_amplitude" => {
            cfg.modulator.carrier_amplitude = parse_opt_f64(value, line, key)?
        }
        "channel.attenuation_db_per_km" => {
            cfg.channel.attenuation_db_per_km = parse_f64(value, line, key)?
        }
        // Natural-log loss factor accepted as an alternative spelling.
        "channel.alpha_per_km" => {
            cfg.channel.attenuation_db_per_km =
                parse_f64(value, line, key)? * 10.0 / std::f64::consts::LN_10
        }
        "channel.length_km" => cfg.channel.length_km = parse_f64(value, line, key)?,
        "detector.responsivity_a_per_w" => {
            cfg.detector.responsivity_a_per_w = parse_f64(value, line, key)?
        }
        "detector.temperature_k" => cfg.detector.temperature_k = parse_f64(value, line, key)?,
        "detector.load_resistance_ohm" => {
            cfg.detector.load_resistance_ohm = parse_f64(value, line, key)?
        }
        "detector.bandwidth_hz" => cfg.detector.bandwidth_hz = parse_f64(value, line, key)?,
        "detector.lo_power_dbm" => cfg.detector.lo_power_dbm = parse_f64(value, line, key)?,
        "detector.lo_phase_rad" => cfg.detector.lo_phase_rad = parse_f64(value, line, key)?,
        "adc.n_bits" => cfg.adc.n_bits = parse_u64(value, line, key)? as u32,
        "adc.loading_sigma" => cfg.adc.loading_sigma = parse_f64(value, line, key)?,
        "adc.v_pp_volts" => cfg.adc.v_pp_volts = parse_f64(value, line, key)?,
        "adc.transimpedance_v_per_a" => {
            cfg.adc.transimpedance_v_per_a = parse_opt_f64(value, line, key)?
        }
        "stages.dac" => cfg.stages.dac = parse_bool(value, line, key)?,
        "stages.modulator" => cfg.stages.modulator = parse_bool(value, line, key)?,
        "stages.channel" => cfg.stages.channel = parse_bool(value, line, key)?,
        "stages.receiver" => cfg.stages.receiver = parse_bool(value, line, key)?,
        "stages.adc" => cfg.stages.adc = parse_bool(value, line, key)?,
        "stages.shot_noise" => cfg.stages.shot_noise = parse_bool(value, line, key)?,
        "stages.thermal_noise" => cfg.stages.thermal_noise = parse_bool(value, line, key)?,
        "metrics.hist_bins" => cfg.hist_bins = parse_u64(value, line, key)? as usize,
        other => {
            return Err(Error::ConfigParse {
                line,
                reason: format!("unknown key `{other}`"),
            })
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::StageToggles;

    #[test]
    fn round_trip_default() {
        let cfg = ChainConfig::default();
        assert_eq!(parse(&emit(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn round_trip_non_defaults_and_sentinels() {
        let mut cfg = ChainConfig::default();
        cfg.source.modulation_variance_snu = 3.7e-1;
        cfg.source.seed = u64::MAX;
        cfg.modulator.extinction_db = f64::INFINITY;
        cfg.modulator.carrier_amplitude = Some(11.25);
        cfg.dac.v_pp_volts = Some(3.3);
        cfg.adc.transimpedance_v_per_a = Some(1234.5678e-3);
        cfg.detector.lo_power_dbm = -25.9;
        cfg.stages = StageToggles::IDENTITY;
        assert_eq!(parse(&emit(&cfg)).unwrap(), cfg);
    }

    #[test]
    fn alpha_per_km_alias() {
        let cfg = parse("channel.alpha_per_km = 0.046051701859880914").unwrap();
        assert!((cfg.channel.attenuation_db_per_km - 0.2).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_is_an_error_with_line_number() {
        let err = parse("source.seed = 1\nchannel.alpha = 0.2\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line 2"), "{text}");
        assert!(text.contains("channel.alpha"), "{text}");
    }

    #[test]
    fn malformed_line_is_an_error() {
        assert!(parse("just words\n").is_err());
        assert!(parse("dac.n_bits = eight\n").is_err());
        assert!(parse("source.modulation_variance_snu = NaN\n").is_err());
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let cfg = parse("\n# comment\nsource.seed = 7  # trailing\n\n").unwrap();
        assert_eq!(cfg.source.seed, 7);
    }
}
