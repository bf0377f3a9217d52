//! Shared domain types: quadrature samples and optical field envelopes.

use crate::error::{Error, Result};
use crate::units::UnitsTag;
use num_complex::Complex;

/// One symbol's pair of quadrature values, tagged with its unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair {
    pub x: f64,
    pub p: f64,
    pub units: UnitsTag,
}

impl QuadraturePair {
    pub fn snu(x: f64, p: f64) -> Self {
        Self {
            x,
            p,
            units: UnitsTag::Snu,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }
}

/// A column-oriented buffer of quadrature samples sharing one unit tag.
///
/// The chain operates on buffers rather than per-symbol structs; the tag
/// makes accidental unit mixing an explicit error instead of a silent bug.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureBuffer {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub units: UnitsTag,
}

impl QuadratureBuffer {
    pub fn with_capacity(n: usize, units: UnitsTag) -> Self {
        Self {
            x: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            units,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn pair(&self, i: usize) -> QuadraturePair {
        QuadraturePair {
            x: self.x[i],
            p: self.p[i],
            units: self.units,
        }
    }

    /// Errors unless the buffer carries the expected unit tag.
    pub fn expect_units(&self, expected: UnitsTag, context: &str) -> Result<()> {
        if self.units == expected {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{context} expects {expected} samples, got {}",
                self.units
            )))
        }
    }
}

/// Complex baseband envelope of an optical field.
///
/// The magnitude convention follows the surrounding stage: the transmit
/// path works in shot-noise-unit amplitudes (|amplitude|^2 is a photon-rate
/// proxy), while the receiver converts to sqrt-watt amplitudes so that
/// |amplitude|^2 is optical power in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalField {
    pub amplitude: Complex<f64>,
}

impl OpticalField {
    pub fn new(amplitude: Complex<f64>) -> Self {
        Self { amplitude }
    }

    pub fn zero() -> Self {
        Self {
            amplitude: Complex::new(0.0, 0.0),
        }
    }

    /// Squared magnitude in the buffer's native units.
    pub fn power(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    /// Optical power in watts for a dimensionless (photon-number) envelope:
    /// `|amplitude|^2 * photon_energy * symbol_rate`.
    pub fn power_watts(&self, photon_energy_j: f64, symbol_rate_hz: f64) -> f64 {
        self.power() * photon_energy_j * symbol_rate_hz
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amplitude.re.is_finite() && self.amplitude.im.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_power_is_norm_squared() {
        let f = OpticalField::new(Complex::new(3.0, 4.0));
        assert_eq!(f.power(), 25.0);
        assert!(f.is_finite());
    }

    #[test]
    fn unit_mismatch_is_an_error() {
        let buf = QuadratureBuffer {
            x: vec![0.0],
            p: vec![0.0],
            units: UnitsTag::Volts,
        };
        assert!(buf.expect_units(UnitsTag::Snu, "test").is_err());
        assert!(buf.expect_units(UnitsTag::Volts, "test").is_ok());
    }
}
