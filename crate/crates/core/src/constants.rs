//! Physical constants (CODATA 2018 exact values) and derived quantities.

/// Electronic charge in coulombs.
pub const ELECTRON_CHARGE_C: f64 = 1.602_176_634e-19;

/// Boltzmann constant in joules per kelvin.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Planck constant in joule-seconds.
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum, metres per second.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Default carrier wavelength (C-band) in metres.
pub const DEFAULT_WAVELENGTH_M: f64 = 1550e-9;

/// Photon energy `h*c/lambda` in joules.
pub fn photon_energy_j(wavelength_m: f64) -> f64 {
    PLANCK_J_S * SPEED_OF_LIGHT_M_PER_S / wavelength_m
}

/// Fixed set of physical constants carried by configs that need them.
///
/// Values are the CODATA exact definitions; the struct exists so that code
/// depending on them takes an explicit, immutable handle rather than
/// scattering literals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub electron_charge_c: f64,
    pub boltzmann_j_per_k: f64,
    pub planck_j_s: f64,
}

impl PhysicalConstants {
    pub const fn codata() -> Self {
        Self {
            electron_charge_c: ELECTRON_CHARGE_C,
            boltzmann_j_per_k: BOLTZMANN_J_PER_K,
            planck_j_s: PLANCK_J_S,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_energy_at_1550nm() {
        let e = photon_energy_j(DEFAULT_WAVELENGTH_M);
        assert!((e - 1.2815779723541474e-19).abs() / e < 1e-12);
    }
}
