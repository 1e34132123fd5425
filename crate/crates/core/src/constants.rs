//! Physical constants (CODATA 2018) and unit conversions.
//!
//! Every eV/joule and celsius/kelvin conversion in the crate goes through
//! this module.

/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Electron rest mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Offset between the celsius and kelvin scales.
pub const ZERO_CELSIUS_K: f64 = 273.15;

#[inline]
pub fn ev_to_joule(ev: f64) -> f64 {
    ev * ELEMENTARY_CHARGE
}

#[inline]
pub fn joule_to_ev(j: f64) -> f64 {
    j / ELEMENTARY_CHARGE
}

#[inline]
pub fn celsius_to_kelvin(c: f64) -> f64 {
    c + ZERO_CELSIUS_K
}

#[inline]
pub fn kelvin_to_celsius(k: f64) -> f64 {
    k - ZERO_CELSIUS_K
}
