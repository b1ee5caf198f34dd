use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::lm::{minimize, LeastSquares, LmConfig};
use super::{unwrap_phase, S21Trace};
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit {
    pub fr_hz: f64,
    pub ql: f64,
    /// Phase about the circle centre at `f = fr`.
    pub theta0: f64,
    pub rms_residual: f64,
}

struct PhaseProblem<'a> {
    f: &'a [f64],
    theta: &'a [f64],
}

// p = [theta0, ln Ql, fr]
impl LeastSquares for PhaseProblem<'_> {
    fn n_params(&self) -> usize {
        3
    }
    fn n_residuals(&self) -> usize {
        self.f.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let ql = p[1].exp();
        for (i, (&f, &th)) in self.f.iter().zip(self.theta).enumerate() {
            out[i] = p[0] + 2.0 * (2.0 * ql * (p[2] - f) / p[2]).atan() - th;
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let ql = p[1].exp();
        let fr = p[2];
        for (i, &f) in self.f.iter().enumerate() {
            let u = 2.0 * ql * (fr - f) / fr;
            let d = 2.0 / (1.0 + u * u);
            out[i * 3] = 1.0;
            out[i * 3 + 1] = d * u;
            out[i * 3 + 2] = d * 2.0 * ql * f / (fr * fr);
        }
    }
}

/// Fits `θ(f) = θ0 + 2 arctan(2Ql (1 − f/fr))` to the angle of the
/// delay-corrected trace about `center`.
pub fn phase_fit(trace: &S21Trace, center: Complex64) -> Result<PhaseFit> {
    trace.validate()?;
    let n = trace.len();
    let f = &trace.freq_hz;
    let mut theta: Vec<f64> = trace.s21.iter().map(|z| (z - center).arg()).collect();
    unwrap_phase(&mut theta);
    let swing = theta[0] - theta[n - 1];
    if !(swing.abs() > FRAC_PI_2) {
        return Err(err!(Fit, "phase_fit", "phase swings only {swing:.3} rad about the centre; no resonance in the data"));
    }
    if swing < 0.0 {
        return Err(err!(Fit, "phase_fit", "phase winds the wrong way about the centre"));
    }

    // Seeds from the crossings of θ0 and θ0 ± π/2.
    let theta0 = 0.5 * (theta[0] + theta[n - 1]);
    let cross = |level: f64| -> Option<f64> {
        (1..n).find_map(|i| {
            let (a, b) = (theta[i - 1] - level, theta[i] - level);
            (a >= 0.0 && b < 0.0).then(|| f[i - 1] + (f[i] - f[i - 1]) * a / (a - b))
        })
    };
    let fr0 = cross(theta0).unwrap_or(0.5 * (f[0] + f[n - 1]));
    let ql0 = match (cross(theta0 + FRAC_PI_2), cross(theta0 - FRAC_PI_2)) {
        (Some(lo), Some(hi)) if hi > lo => fr0 / (hi - lo),
        _ => 4.0 * fr0 / trace.span_hz(),
    };

    let problem = PhaseProblem { f, theta: &theta };
    let rep = minimize(&problem, &[theta0, ql0.ln(), fr0], LmConfig::default()).map_err(|e| err!(Fit, "phase_fit", "{e}"))?;
    let (th, ql, fr) = (rep.params[0], rep.params[1].exp(), rep.params[2]);
    if !(fr >= f[0] && fr <= f[n - 1]) {
        return Err(err!(Fit, "phase_fit", "fitted resonance {fr} Hz lies outside the sweep"));
    }
    if ql * trace.span_hz() / fr < 1.0 {
        return Err(err!(Fit, "phase_fit", "fitted linewidth exceeds the sweep span; resonance not resolved"));
    }
    let rms_residual = (2.0 * rep.cost / n as f64).sqrt();
    if rms_residual > 0.5 * PI {
        return Err(err!(Fit, "phase_fit", "phase residual {rms_residual:.3} rad too large"));
    }
    Ok(PhaseFit { fr_hz: fr, ql, theta0: th, rms_residual })
}
