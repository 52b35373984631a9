//! Physical constants and unit conversions.
//!
//! Internally everything runs with ħ = 1, time in ns and energies as angular
//! frequencies in rad/ns. Junction capacitance is given in pF, the critical
//! current in µA and every pulse current in nA.

use std::f64::consts::PI;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum h/2e (Wb).
pub const FLUX_QUANTUM: f64 = PI * HBAR / ELEMENTARY_CHARGE;
/// Reduced flux quantum Φ₀/2π (Wb).
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);

const PICO: f64 = 1e-12;
const MICRO: f64 = 1e-6;
const NANO: f64 = 1e-9;

/// Energy in joules to angular frequency in rad/ns.
pub fn joules_to_rad_per_ns(energy: f64) -> f64 {
    energy / HBAR * NANO
}

/// Angular frequency (rad/ns) to ordinary frequency (GHz).
pub fn rad_per_ns_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

pub fn ghz_to_rad_per_ns(freq: f64) -> f64 {
    freq * 2.0 * PI
}

pub fn picofarad(c: f64) -> f64 {
    c * PICO
}

pub fn microamp(i: f64) -> f64 {
    i * MICRO
}

/// Energy (rad/ns) of the coupling −(Φ₀/2π)·I·δ per nA of current and per
/// radian of phase.
///
/// Equals 1/(2e) expressed in rad/ns per nA, about 3.1208.
pub fn current_coupling_per_na() -> f64 {
    joules_to_rad_per_ns(REDUCED_FLUX_QUANTUM * NANO)
}
