//! Notch-type resonator model and the fitting pipeline for complex `S21`.
//!
//! ```text
//! S21(f) = a e^{jα} e^{−j2πfτ} [1 − (Ql/|Qc|) e^{jφ} / (1 + 2jQl (f/fr − 1))]
//! 1/Qi   = 1/Ql − cos(φ)/|Qc|
//! ```
//!
//! [`fit_notch`] removes the cable delay, fits a circle to the calibrated
//! data, fits the phase around the circle centre for `fr` and `Ql`, reads the
//! environment and `φ` off the circle geometry and finally refines all seven
//! parameters jointly with Levenberg-Marquardt.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::err;
use crate::Result;

mod circle;
mod delay;
pub mod lm;
mod notch;
mod phase;
mod shift;
mod synth;

pub use circle::{circle_fit, Circle};
pub use delay::{estimate_delay, DelayEstimate};
pub use notch::{fit_notch, fit_notch_with, NotchFitOptions};
#[allow(unused_imports)]
use num_traits::Float;
pub use phase::{phase_fit, PhaseFit};
pub use shift::{resonance_shift, DEFAULT_T_REF_TOLERANCE_K};
pub use synth::{linewidth_grid, synth_trace};

/// Optional acquisition metadata.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceMeta {
    pub temperature_k: Option<f64>,
    pub power_dbm: Option<f64>,
}

/// A complex transmission sweep on an ascending frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct S21Trace {
    pub freq_hz: Vec<f64>,
    pub s21: Vec<Complex64>,
    pub meta: TraceMeta,
}

impl S21Trace {
    pub fn new(freq_hz: Vec<f64>, s21: Vec<Complex64>, meta: TraceMeta) -> Result<Self> {
        let t = Self { freq_hz, s21, meta };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.freq_hz.len() != self.s21.len() {
            return Err(err!(Domain, "S21Trace", "{} frequencies but {} samples", self.freq_hz.len(), self.s21.len()));
        }
        if self.freq_hz.len() < 2 {
            return Err(err!(Domain, "S21Trace", "need at least 2 points, got {}", self.freq_hz.len()));
        }
        if let Some(i) = self.freq_hz.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(err!(Domain, "S21Trace", "frequencies not strictly ascending at index {}", i + 1));
        }
        if self.freq_hz.iter().any(|f| !f.is_finite()) || self.s21.iter().any(|z| !z.is_finite()) {
            return Err(err!(Domain, "S21Trace", "non-finite sample"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    pub fn span_hz(&self) -> f64 {
        self.freq_hz[self.len() - 1] - self.freq_hz[0]
    }

    /// Midpoint of the grid.
    pub fn center_hz(&self) -> f64 {
        0.5 * (self.freq_hz[0] + self.freq_hz[self.len() - 1])
    }

    /// Copy multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { freq_hz: self.freq_hz.clone(), s21: self.s21.iter().map(|z| z * c).collect(), meta: self.meta }
    }
}

/// Parameters of the notch model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchParams {
    pub fr_hz: f64,
    pub ql: f64,
    pub qc_mag: f64,
    /// Impedance-mismatch angle.
    pub phi_rad: f64,
    pub amp: f64,
    pub phase0_rad: f64,
    /// Cable delay.
    pub tau_s: f64,
}

impl NotchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.fr_hz > 0.0) || !(self.ql > 0.0) || !(self.qc_mag > 0.0) || !(self.amp > 0.0) {
            return Err(err!(Domain, "NotchParams", "fr, Ql, |Qc| and amplitude must be positive"));
        }
        if !(self.phi_rad.abs() < PI / 2.0) {
            return Err(err!(Domain, "NotchParams", "|phi| must be below π/2, got {}", self.phi_rad));
        }
        Ok(())
    }

    /// Internal quality factor `1 / (1/Ql − cos φ / |Qc|)`; non-positive when
    /// the parameters describe no physical resonance.
    pub fn qi(&self) -> f64 {
        1.0 / (1.0 / self.ql - self.phi_rad.cos() / self.qc_mag)
    }

    /// Builds parameters from `Qi` instead of `Ql`.
    pub fn from_qi(fr_hz: f64, qi: f64, qc_mag: f64, phi_rad: f64, amp: f64, phase0_rad: f64, tau_s: f64) -> Self {
        let ql = 1.0 / (1.0 / qi + phi_rad.cos() / qc_mag);
        Self { fr_hz, ql, qc_mag, phi_rad, amp, phase0_rad, tau_s }
    }

    pub fn linewidth_hz(&self) -> f64 {
        self.fr_hz / self.ql
    }
}

/// One-sigma uncertainties for [`NotchParams`] and the derived `Qi`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchStderr {
    pub fr_hz: f64,
    pub ql: f64,
    pub qc_mag: f64,
    pub phi_rad: f64,
    pub amp: f64,
    pub phase0_rad: f64,
    pub tau_s: f64,
    pub qi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchFitResult {
    pub params: NotchParams,
    pub qi: f64,
    pub stderr: NotchStderr,
    /// RMS of the complex residual relative to the baseline amplitude.
    pub rms_residual: f64,
    pub n_points: usize,
    pub iterations: usize,
    /// `Qi <= 0` or `|φ| >= π/2`.
    pub nonphysical: bool,
}

/// Model value at one frequency.
pub fn model_s21(p: &NotchParams, f: f64) -> Complex64 {
    let env = Complex64::from_polar(p.amp, p.phase0_rad - 2.0 * PI * f * p.tau_s);
    env * resonator_factor(p, f)
}

/// The bracketed resonator response without the environment.
pub(crate) fn resonator_factor(p: &NotchParams, f: f64) -> Complex64 {
    let x = (f - p.fr_hz) / p.fr_hz;
    let coupling = Complex64::from_polar(p.ql / p.qc_mag, p.phi_rad);
    Complex64::new(1.0, 0.0) - coupling / Complex64::new(1.0, 2.0 * p.ql * x)
}

/// Unwraps a phase sequence in place.
pub(crate) fn unwrap_phase(ph: &mut [f64]) {
    for i in 1..ph.len() {
        let mut d = ph[i] - ph[i - 1];
        while d > PI {
            ph[i] -= 2.0 * PI;
            d -= 2.0 * PI;
        }
        while d < -PI {
            ph[i] += 2.0 * PI;
            d += 2.0 * PI;
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params() -> NotchParams {
        NotchParams { fr_hz: 5.95e9, ql: 5e4, qc_mag: 1e5, phi_rad: 0.2, amp: 0.8, phase0_rad: 1.0, tau_s: 40e-9 }
    }

    #[test]
    fn on_resonance_closed_form() {
        let p = NotchParams { amp: 1.0, phase0_rad: 0.0, tau_s: 0.0, ..params() };
        let z = model_s21(&p, p.fr_hz);
        let expect = Complex64::new(1.0, 0.0) - Complex64::from_polar(0.5, 0.2);
        assert!((z - expect).norm() < 1e-15);
    }

    #[test]
    fn far_off_resonance_is_baseline() {
        let p = params();
        let f = p.fr_hz * 1.5;
        let base = Complex64::from_polar(p.amp, p.phase0_rad - 2.0 * PI * f * p.tau_s);
        assert!((model_s21(&p, f) - base).norm() < 1e-4);
    }

    #[test]
    fn traces_circle_of_expected_diameter() {
        let p = NotchParams { tau_s: 0.0, ..params() };
        let pts: Vec<Complex64> = (0..400)
            .map(|i| model_s21(&p, p.fr_hz * (1.0 + (i as f64 - 200.0) * 1e-6)) / Complex64::from_polar(p.amp, p.phase0_rad))
            .collect();
        let c = circle_fit(&pts).unwrap();
        assert!((2.0 * c.radius - p.ql / p.qc_mag).abs() < 1e-9);
    }

    #[test]
    fn qi_relation() {
        let p = NotchParams::from_qi(5.95e9, 2.571e5, 1e5, 0.3, 1.0, 0.0, 0.0);
        assert!((p.qi() / 2.571e5 - 1.0).abs() < 1e-12);
        assert!(p.qi() >= p.ql);
    }

    #[test]
    fn trace_validation() {
        let z = Complex64::new(1.0, 0.0);
        assert!(S21Trace::new(vec![1.0], vec![z], TraceMeta::default()).is_err());
        assert!(S21Trace::new(vec![1.0, 1.0], vec![z, z], TraceMeta::default()).is_err());
        assert!(S21Trace::new(vec![1.0, 2.0], vec![z], TraceMeta::default()).is_err());
        assert!(S21Trace::new(vec![1.0, 2.0], vec![z, Complex64::new(f64::NAN, 0.0)], TraceMeta::default()).is_err());
        assert!(S21Trace::new(vec![1.0, 2.0], vec![z, z], TraceMeta::default()).is_ok());
    }

    #[test]
    fn angle_helpers() {
        let mut ph = vec![3.0, -3.0, 3.1, -3.1];
        unwrap_phase(&mut ph);
        assert!(ph.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
