//! Physical constants (CODATA 2018 exact values where defined).

use core::f64::consts::PI;

/// Boltzmann constant in eV/K.
pub const KB_EV: f64 = 8.617_333_262e-5;
/// Reduced Planck constant in eV·s.
pub const HBAR_EVS: f64 = 6.582_119_569e-16;
/// Reduced Planck constant in J·s.
pub const HBAR_JS: f64 = 1.054_571_817e-34;
/// Vacuum permeability in H/m.
pub const MU0: f64 = 4.0e-7 * PI;
/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Angular frequency (rad/s) from a frequency in Hz.
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}
