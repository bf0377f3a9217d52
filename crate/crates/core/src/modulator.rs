//! Non-ideal IQ Mach-Zehnder modulator.
//!
//! Each child MZM maps a drive voltage to a field through a cosine transfer
//! with argument `phi = pi * V / V_pi`. A finite extinction ratio is modelled
//! as extra loss in one interferometer arm: with arm balance
//! `r = (sqrt(ER) - 1) / (sqrt(ER) + 1)` the child field is
//!
//! ```text
//! E_child(phi) = (A/4) * ((1 + r) cos(phi) + j (1 - r) sin(phi))
//! ```
//!
//! which leaves a quadrature-leakage residue at the null and reproduces the
//! max/min arm-sweep power ratio ER = ((1+r)/(1-r))^2. Insertion loss scales
//! the combined output field by `g = 10^(-IL_dB/20)`. In the ideal limit
//! (r = 1, g = 1) the output reduces exactly to
//! `(A/2) (cos(phi_x) + j cos(phi_p))`.
//!
//! The model is memoryless: no chirp, bias drift or RF bandwidth.

use crate::error::{Error, Result};
use crate::types::OpticalField;
use crate::units;
use num_complex::Complex;

/// IQ modulator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatorConfig {
    /// Half-wave voltage of each child MZM, volts.
    pub v_pi_volts: f64,
    /// Insertion loss in dB (>= 0). 0 means lossless.
    pub insertion_loss_db: f64,
    /// Extinction ratio in dB (> 0). `f64::INFINITY` selects the ideal arm.
    pub extinction_db: f64,
    /// Amplitude of the unmodulated carrier field, in the signal-path units.
    pub carrier_amplitude: f64,
}

impl ModulatorConfig {
    /// A lossless, infinite-extinction modulator with the given carrier.
    pub fn ideal(v_pi_volts: f64, carrier_amplitude: f64) -> Self {
        Self {
            v_pi_volts,
            insertion_loss_db: 0.0,
            extinction_db: f64::INFINITY,
            carrier_amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_pi_volts > 0.0) || !self.v_pi_volts.is_finite() {
            return Err(Error::invalid_config(
                "modulator.v_pi_volts",
                format!("must be a positive finite number, got {}", self.v_pi_volts),
            ));
        }
        if !(self.insertion_loss_db >= 0.0) || !self.insertion_loss_db.is_finite() {
            return Err(Error::invalid_config(
                "modulator.insertion_loss_db",
                format!("must be >= 0, got {}", self.insertion_loss_db),
            ));
        }
        if !(self.extinction_db > 0.0) {
            return Err(Error::invalid_config(
                "modulator.extinction_db",
                format!("must be > 0 (or inf for ideal), got {}", self.extinction_db),
            ));
        }
        if !(self.carrier_amplitude > 0.0) || !self.carrier_amplitude.is_finite() {
            return Err(Error::invalid_config(
                "modulator.carrier_amplitude",
                format!("must be a positive finite number, got {}", self.carrier_amplitude),
            ));
        }
        Ok(())
    }

    /// Field scaling factor from the insertion loss, `g` in (0, 1].
    pub fn loss_factor(&self) -> f64 {
        units::db_to_field_ratio(-self.insertion_loss_db)
    }

    /// Arm-balance factor `r` in [0, 1]; 1 means infinite extinction.
    pub fn arm_balance(&self) -> f64 {
        if self.extinction_db.is_infinite() {
            return 1.0;
        }
        let er_sqrt = units::db_to_field_ratio(self.extinction_db);
        (er_sqrt - 1.0) / (er_sqrt + 1.0)
    }

    /// Drive phase for a voltage: `phi = pi * V / V_pi`.
    pub fn phase(&self, volts: f64) -> f64 {
        std::f64::consts::PI * volts / self.v_pi_volts
    }
}

/// Field at one child MZM output (before insertion loss).
pub fn child_field(phi: f64, cfg: &ModulatorConfig) -> Complex<f64> {
    let r = cfg.arm_balance();
    let a4 = cfg.carrier_amplitude / 4.0;
    Complex::new(a4 * (1.0 + r) * phi.cos(), a4 * (1.0 - r) * phi.sin())
}

/// Modulates a voltage pair onto the carrier.
///
/// Output: `g * (E_child(phi_x) + j E_child(phi_p))` with
/// `phi = pi * V / V_pi`. Insertion loss is applied as a single final field
/// scaling, so `modulate` with loss equals `g *` the lossless output exactly.
pub fn modulate(v_x: f64, v_p: f64, cfg: &ModulatorConfig) -> OpticalField {
    let ex = child_field(cfg.phase(v_x), cfg);
    let ep = child_field(cfg.phase(v_p), cfg);
    let combined = ex + Complex::new(0.0, 1.0) * ep;
    OpticalField::new(combined * cfg.loss_factor())
}

/// Extinction ratio recovered from a dense arm sweep, in dB.
///
/// Sweeps the child drive phase over [0, pi] and reports
/// `10 log10(max |E|^2 / min |E|^2)` including the insertion-loss scaling
/// (which cancels in the ratio).
pub fn measured_extinction_ratio(cfg: &ModulatorConfig) -> f64 {
    // The grid contains pi/2 exactly so the null is sampled even for very
    // large extinction ratios.
    let n = 10_000usize;
    let g = cfg.loss_factor();
    let mut max_p = f64::MIN;
    let mut min_p = f64::MAX;
    for i in 0..=n {
        let phi = std::f64::consts::PI * i as f64 / n as f64;
        let p = (child_field(phi, cfg) * g).norm_sqr();
        max_p = max_p.max(p);
        min_p = min_p.min(p);
    }
    units::power_ratio_to_db(max_p / min_p)
}

/// Modulated constellation for pre-distorted, quantized drive voltages.
pub fn constellation_snapshot(
    v_x: &[f64],
    v_p: &[f64],
    cfg: &ModulatorConfig,
) -> Vec<Complex<f64>> {
    v_x.iter()
        .zip(v_p)
        .map(|(&vx, &vp)| modulate(vx, vp, cfg).amplitude)
        .collect()
}

/// Mean of a point cloud.
pub fn centroid(points: &[Complex<f64>]) -> Complex<f64> {
    if points.is_empty() {
        return Complex::new(0.0, 0.0);
    }
    points.iter().sum::<Complex<f64>>() / points.len() as f64
}

/// Root-mean-square radius of a point cloud about the origin.
pub fn rms_radius(points: &[Complex<f64>]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    (points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn ideal(carrier: f64) -> ModulatorConfig {
        ModulatorConfig::ideal(4.0, carrier)
    }

    #[test]
    fn quadrature_null_at_half_wave_phase() {
        // phi = pi/2 on both children nulls an ideal modulator.
        let cfg = ideal(2.0);
        let v = cfg.v_pi_volts / 2.0;
        let out = modulate(v, v, &cfg);
        assert!(out.power().sqrt() < 1e-12 * cfg.carrier_amplitude);
    }

    #[test]
    fn zero_phase_gives_half_carrier() {
        let cfg = ideal(2.0);
        let out = modulate(0.0, 1.2345, &cfg);
        assert!((out.amplitude.re - cfg.carrier_amplitude / 2.0).abs() < 1e-12);
    }

    #[test]
    fn arm_balance_at_20_db() {
        let cfg = ModulatorConfig {
            extinction_db: 20.0,
            ..ideal(1.0)
        };
        // ER = 100, sqrt(ER) = 10, r = 9/11.
        assert!((cfg.arm_balance() - 9.0 / 11.0).abs() < 1e-12);
        // Null residue per child: (A/4)(1 - r) = A/22.
        let null = child_field(std::f64::consts::FRAC_PI_2, &cfg);
        assert!((null.norm() - cfg.carrier_amplitude / 22.0).abs() < 1e-12);
    }

    #[test]
    fn extinction_ratio_round_trips() {
        for zeta in [10.0, 20.0, 30.0, 40.0] {
            let cfg = ModulatorConfig {
                extinction_db: zeta,
                ..ideal(1.0)
            };
            let measured = measured_extinction_ratio(&cfg);
            assert!(
                (measured - zeta).abs() < 0.1,
                "zeta = {zeta}, measured = {measured}"
            );
        }
    }

    #[test]
    fn extinction_ratio_ignores_insertion_loss() {
        let cfg = ModulatorConfig {
            extinction_db: 20.0,
            insertion_loss_db: 2.0,
            ..ideal(1.0)
        };
        assert!((measured_extinction_ratio(&cfg) - 20.0).abs() < 0.1);
    }

    #[test]
    fn ideal_limit_extinction_is_large() {
        let cfg = ideal(1.0);
        assert!(measured_extinction_ratio(&cfg) > 60.0);
    }

    #[test]
    fn reduces_to_cosine_transfer_in_ideal_limit() {
        let cfg = ideal(3.0);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let vx: f64 = rng.random_range(-2.0 * cfg.v_pi_volts..2.0 * cfg.v_pi_volts);
            let vp: f64 = rng.random_range(-2.0 * cfg.v_pi_volts..2.0 * cfg.v_pi_volts);
            let out = modulate(vx, vp, &cfg).amplitude;
            let expected = Complex::new(
                cfg.carrier_amplitude / 2.0 * cfg.phase(vx).cos(),
                cfg.carrier_amplitude / 2.0 * cfg.phase(vp).cos(),
            );
            assert!(
                (out - expected).norm() <= 1e-12 * cfg.carrier_amplitude,
                "out = {out}, expected = {expected}"
            );
        }
    }

    #[test]
    fn insertion_loss_is_a_pure_field_scaling() {
        let lossless = ModulatorConfig {
            extinction_db: 20.0,
            ..ideal(1.7)
        };
        let lossy = ModulatorConfig {
            insertion_loss_db: 2.0,
            ..lossless
        };
        let g = lossy.loss_factor();
        for (vx, vp) in [(0.3, 1.1), (2.0, 0.0), (3.9, 2.2)] {
            let a = modulate(vx, vp, &lossy).amplitude;
            let b = modulate(vx, vp, &lossless).amplitude * g;
            assert_eq!(a, b);
        }
    }

    proptest! {
        #[test]
        fn never_amplifies(
            vx in -10.0f64..10.0,
            vp in -10.0f64..10.0,
            il in 0.0f64..6.0,
            zeta in 10.0f64..60.0,
        ) {
            let cfg = ModulatorConfig {
                v_pi_volts: 4.0,
                insertion_loss_db: il,
                extinction_db: zeta,
                carrier_amplitude: 1.0,
            };
            let out = modulate(vx, vp, &cfg);
            prop_assert!(out.power() <= cfg.carrier_amplitude.powi(2) * (1.0 + 1e-12));
        }
    }
}
