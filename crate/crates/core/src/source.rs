//! Gaussian quadrature source.
//!
//! Alice draws each symbol's quadratures from two i.i.d. zero-mean normal
//! distributions with variance `modulation_variance_snu`. Shot-noise units
//! use the convention that the vacuum quadrature variance equals 1, and the
//! coherent amplitude of a symbol is `x + j p` with no extra rescaling.

use crate::constants;
use crate::error::{Error, Result};
use crate::rng::{labels, StreamFactory};
use crate::types::{OpticalField, QuadratureBuffer, QuadraturePair};
use crate::units::UnitsTag;
use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

/// Configuration of the Gaussian symbol source.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SourceConfig {
    /// Alice's modulation variance in shot-noise units. Must be > 0.
    pub modulation_variance_snu: f64,
    /// Number of symbols per run. Must be >= 1.
    pub n_symbols: usize,
    /// Master seed; all named streams derive from it.
    pub seed: u64,
    /// Symbol rate in baud. Only enters the photon-number/power bridge.
    pub symbol_rate_hz: f64,
    /// Photon energy in joules (h*nu). Defaults to the 1550 nm value.
    pub photon_energy_j: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            modulation_variance_snu: 2.0,
            n_symbols: 1_000_000,
            seed: 42,
            symbol_rate_hz: 1e9,
            photon_energy_j: constants::photon_energy_j(constants::DEFAULT_WAVELENGTH_M),
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.modulation_variance_snu > 0.0) || !self.modulation_variance_snu.is_finite() {
            return Err(Error::invalid_config(
                "source.modulation_variance_snu",
                format!("must be a positive finite number, got {}", self.modulation_variance_snu),
            ));
        }
        if self.n_symbols < 1 {
            return Err(Error::invalid_config(
                "source.n_symbols",
                "must be at least 1",
            ));
        }
        if !(self.symbol_rate_hz > 0.0) || !self.symbol_rate_hz.is_finite() {
            return Err(Error::invalid_config(
                "source.symbol_rate_hz",
                format!("must be a positive finite number, got {}", self.symbol_rate_hz),
            ));
        }
        if !(self.photon_energy_j > 0.0) || !self.photon_energy_j.is_finite() {
            return Err(Error::invalid_config(
                "source.photon_energy_j",
                format!("must be a positive finite number, got {}", self.photon_energy_j),
            ));
        }
        Ok(())
    }
}

/// Draws `n_symbols` quadrature pairs in SNU.
///
/// The x and p series come from independent named streams
/// (`<scope>/source-x`, `<scope>/source-p`), so the two are statistically
/// independent and each run is reproducible for a fixed `(seed, scope)`.
pub fn draw_quadratures(cfg: &SourceConfig, scope: &str) -> Result<QuadratureBuffer> {
    cfg.validate()?;
    let factory = StreamFactory::from_seed(cfg.seed);
    draw_quadratures_with(cfg, &factory, scope)
}

/// Same as [`draw_quadratures`], reusing an existing stream factory.
pub fn draw_quadratures_with(
    cfg: &SourceConfig,
    factory: &StreamFactory,
    scope: &str,
) -> Result<QuadratureBuffer> {
    cfg.validate()?;
    let sigma = cfg.modulation_variance_snu.sqrt();
    let mut rng_x = factory.scoped_stream(scope, labels::SOURCE_X);
    let mut rng_p = factory.scoped_stream(scope, labels::SOURCE_P);
    let mut buf = QuadratureBuffer::with_capacity(cfg.n_symbols, UnitsTag::Snu);
    for _ in 0..cfg.n_symbols {
        let gx: f64 = StandardNormal.sample(&mut rng_x);
        let gp: f64 = StandardNormal.sample(&mut rng_p);
        buf.x.push(sigma * gx);
        buf.p.push(sigma * gp);
    }
    Ok(buf)
}

/// Maps an SNU quadrature pair onto a coherent-state envelope.
///
/// `photons_per_snu` scales squared SNU amplitude to mean photon number per
/// symbol: the returned envelope is `(x + j p) * sqrt(photons_per_snu)`, so
/// `|amplitude|^2` is the photon number and optical power follows from
/// [`OpticalField::power_watts`].
pub fn snu_to_amplitude(q: &QuadraturePair, photons_per_snu: f64) -> Result<OpticalField> {
    if q.units != UnitsTag::Snu {
        return Err(Error::InvalidArgument(format!(
            "snu_to_amplitude expects SNU input, got {}",
            q.units
        )));
    }
    let scale = photons_per_snu.sqrt();
    Ok(OpticalField::new(Complex::new(q.x * scale, q.p * scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::stats;

    #[test]
    fn sample_variance_converges_to_v_a() {
        let cfg = SourceConfig {
            modulation_variance_snu: 2.0,
            n_symbols: 1_000_000,
            seed: 42,
            ..Default::default()
        };
        let buf = draw_quadratures(&cfg, "test").unwrap();
        // 3-sigma band of the chi-square variance estimator at n = 1e6 is
        // ~0.42% relative; the stated tolerance 0.5% covers it.
        let vx = stats::variance(&buf.x).unwrap();
        let vp = stats::variance(&buf.p).unwrap();
        assert!((vx / 2.0 - 1.0).abs() < 5e-3, "Var(x) = {vx}");
        assert!((vp / 2.0 - 1.0).abs() < 5e-3, "Var(p) = {vp}");
        assert!(stats::mean(&buf.x).abs() < 3.0 * (2.0f64 / 1e6).sqrt());
    }

    #[test]
    fn single_symbol_is_finite_and_reproducible() {
        let cfg = SourceConfig {
            modulation_variance_snu: 1.0,
            n_symbols: 1,
            seed: 9,
            ..Default::default()
        };
        let a = draw_quadratures(&cfg, "test").unwrap();
        let b = draw_quadratures(&cfg, "test").unwrap();
        assert!(a.pair(0).is_finite());
        assert_eq!(a, b);
    }

    #[test]
    fn x_and_p_are_independent() {
        let cfg = SourceConfig {
            modulation_variance_snu: 5.0,
            n_symbols: 1_000_000,
            seed: 3,
            ..Default::default()
        };
        let buf = draw_quadratures(&cfg, "test").unwrap();
        let bound = 3.0 / (cfg.n_symbols as f64).sqrt();
        let r = stats::pearson(&buf.x, &buf.p).unwrap();
        assert!(r.abs() < bound, "|r| = {} >= {bound}", r.abs());

        // Independence oracle: two streams drawn from fresh, distinct labels
        // obey the same bound.
        let factory = StreamFactory::from_seed(123);
        let mut ra = factory.stream("oracle-a");
        let mut rb = factory.stream("oracle-b");
        let a: Vec<f64> = (0..cfg.n_symbols)
            .map(|_| StandardNormal.sample(&mut ra))
            .collect();
        let b: Vec<f64> = (0..cfg.n_symbols)
            .map(|_| StandardNormal.sample(&mut rb))
            .collect();
        let r0 = stats::pearson(&a, &b).unwrap();
        assert!(r0.abs() < bound, "oracle |r| = {} >= {bound}", r0.abs());
    }

    #[test]
    fn distinct_seeds_are_uncorrelated() {
        let mut cfg = SourceConfig {
            n_symbols: 200_000,
            seed: 1,
            ..Default::default()
        };
        let a = draw_quadratures(&cfg, "test").unwrap();
        cfg.seed = 2;
        let b = draw_quadratures(&cfg, "test").unwrap();
        let r = stats::pearson(&a.x, &b.x).unwrap();
        assert!(r.abs() < 3.0 / (cfg.n_symbols as f64).sqrt());
    }

    #[test]
    fn bad_config_names_the_field() {
        let cfg = SourceConfig {
            modulation_variance_snu: -1.0,
            ..Default::default()
        };
        let err = draw_quadratures(&cfg, "test").unwrap_err();
        assert!(err.to_string().contains("source.modulation_variance_snu"));

        let cfg = SourceConfig {
            n_symbols: 0,
            ..Default::default()
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("source.n_symbols"));
    }

    #[test]
    fn amplitude_mapping() {
        // Vacuum maps to the zero field.
        let f = snu_to_amplitude(&QuadraturePair::snu(0.0, 0.0), 1.0).unwrap();
        assert_eq!(f.power(), 0.0);

        // Identity scale keeps the amplitude as written.
        let f = snu_to_amplitude(&QuadraturePair::snu(1.0, 0.0), 1.0).unwrap();
        assert_eq!(f.amplitude, Complex::new(1.0, 0.0));

        // |3 + 4j|^2 = 25 photons -> power 25 * h*nu * R.
        let cfg = SourceConfig::default();
        let f = snu_to_amplitude(&QuadraturePair::snu(3.0, 4.0), 1.0).unwrap();
        let p = f.power_watts(cfg.photon_energy_j, cfg.symbol_rate_hz);
        let expected = 25.0 * cfg.photon_energy_j * cfg.symbol_rate_hz;
        assert!((p - expected).abs() / expected < 1e-12);

        // Volt-tagged input is rejected.
        let bad = QuadraturePair {
            x: 1.0,
            p: 0.0,
            units: UnitsTag::Volts,
        };
        assert!(snu_to_amplitude(&bad, 1.0).is_err());
    }
}
