//! Physical constants and unit conversions.
//!
//! Internally every frequency is an angular frequency in rad/s and every
//! field is in tesla.

use std::f64::consts::PI;

/// Electron gyromagnetic ratio (CODATA 2018), rad s⁻¹ T⁻¹.
pub const GAMMA_E: f64 = 1.760_859_630_23e11;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// μ₀/4π in SI units, T m A⁻¹.
pub const MU0_OVER_4PI: f64 = 1.0e-7;

pub const GAUSS: f64 = 1.0e-4;

/// Dipolar prefactor α = (μ₀/4π) γ_e² ħ, in rad s⁻¹ m³.
pub fn dipolar_alpha(gamma_e: f64) -> f64 {
    MU0_OVER_4PI * gamma_e * gamma_e * HBAR
}

pub fn gauss_to_tesla(g: f64) -> f64 {
    g * GAUSS
}

pub fn tesla_to_gauss(t: f64) -> f64 {
    t / GAUSS
}

pub fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

pub fn mhz_to_rad(mhz: f64) -> f64 {
    2.0 * PI * mhz * 1.0e6
}

pub fn rad_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}
