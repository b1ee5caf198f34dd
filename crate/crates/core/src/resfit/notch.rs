use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::delay::dip_index;
use super::lm::{minimize, LeastSquares, LmConfig};
use super::{circle_fit, estimate_delay, median, phase_fit, wrap_angle, NotchFitResult, NotchParams, NotchStderr, S21Trace};
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Knobs for [`fit_notch_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NotchFitOptions {
    pub max_iterations: usize,
    pub cost_tolerance: f64,
    /// A dip must exceed this many noise standard deviations.
    pub min_dip_snr: f64,
}

impl Default for NotchFitOptions {
    fn default() -> Self {
        Self { max_iterations: 200, cost_tolerance: 1e-12, min_dip_snr: 6.0 }
    }
}

/// Full notch model on stacked real/imaginary residuals.
///
/// Internal parameters: `[fr, ln Ql, ln|Qc|, φ, ln a, θc, τ]`, where `θc` is
/// the environment phase at the grid centre `fc`.
struct NotchProblem<'a> {
    trace: &'a S21Trace,
    fc: f64,
}

impl NotchProblem<'_> {
    fn terms(&self, p: &[f64], f: f64) -> (Complex64, Complex64, Complex64) {
        let (fr, ql, qc, phi, amp, theta_c, tau) = (p[0], p[1].exp(), p[2].exp(), p[3], p[4].exp(), p[5], p[6]);
        let env = Complex64::from_polar(amp, theta_c - 2.0 * PI * (f - self.fc) * tau);
        let d = Complex64::new(1.0, 2.0 * ql * (f - fr) / fr);
        let r = Complex64::from_polar(ql / qc, phi) / d;
        (env, r, d)
    }
}

impl LeastSquares for NotchProblem<'_> {
    fn n_params(&self) -> usize {
        7
    }
    fn n_residuals(&self) -> usize {
        2 * self.trace.len()
    }
    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        let n = self.trace.len();
        for (i, (&f, z)) in self.trace.freq_hz.iter().zip(&self.trace.s21).enumerate() {
            let (env, r, _) = self.terms(p, f);
            let res = env * (1.0 - r) - z;
            out[i] = res.re;
            out[n + i] = res.im;
        }
    }
    fn jacobian(&self, p: &[f64], out: &mut [f64]) {
        let n = self.trace.len();
        let j = Complex64::new(0.0, 1.0);
        let (fr, ql) = (p[0], p[1].exp());
        for (i, &f) in self.trace.freq_hz.iter().enumerate() {
            let (env, r, d) = self.terms(p, f);
            let s = env * (1.0 - r);
            let cols = [
                -env * r * j * 2.0 * ql * f / (fr * fr * d),
                -env * r / d,
                env * r,
                -env * r * j,
                s,
                j * s,
                -j * 2.0 * PI * (f - self.fc) * s,
            ];
            for (k, c) in cols.iter().enumerate() {
                out[i * 7 + k] = c.re;
                out[(n + i) * 7 + k] = c.im;
            }
        }
    }
}

/// Robust noise level of `|S21|` from successive differences.
fn magnitude_noise(trace: &S21Trace) -> f64 {
    let mut d: Vec<f64> = trace.s21.windows(2).map(|w| (w[1].norm() - w[0].norm()).abs()).collect();
    1.4826 * median(&mut d) / core::f64::consts::SQRT_2
}

/// [`fit_notch_with`] using default options.
pub fn fit_notch(trace: &S21Trace) -> Result<NotchFitResult> {
    fit_notch_with(trace, &NotchFitOptions::default())
}

pub fn fit_notch_with(trace: &S21Trace, opts: &NotchFitOptions) -> Result<NotchFitResult> {
    trace.validate()?;
    let n = trace.len();

    // Resonance present at all?
    let dip = dip_index(trace);
    let mags: Vec<f64> = trace.s21.iter().map(|z| z.norm()).collect();
    let (f0, f1) = (trace.freq_hz[0], trace.freq_hz[n - 1]);
    let base = mags[0] + (mags[n - 1] - mags[0]) * (trace.freq_hz[dip] - f0) / (f1 - f0);
    let depth = (mags[dip] - base).abs();
    let noise = magnitude_noise(trace);
    if !(depth > opts.min_dip_snr * noise) || !(depth > 1e-9 * base.abs().max(f64::MIN_POSITIVE)) {
        return Err(err!(Fit, "fit_notch", "no resonance found (dip {depth:e} vs noise {noise:e})"));
    }

    // Environment delay, then the calibrated circle.
    let delay = estimate_delay(trace)?;
    let calibrated = S21Trace {
        freq_hz: trace.freq_hz.clone(),
        s21: trace.freq_hz.iter().zip(&trace.s21).map(|(&f, z)| z * Complex64::from_polar(1.0, 2.0 * PI * f * delay.tau_s)).collect(),
        meta: trace.meta,
    };
    let circle = circle_fit(&calibrated.s21)?;
    let ph = phase_fit(&calibrated, circle.center)?;

    // Off-resonant point on the circle is the environment a·e^{jα}.
    let off = circle.center + Complex64::from_polar(circle.radius, ph.theta0 + PI);
    if !(off.norm() > 0.0) {
        return Err(err!(Fit, "fit_notch", "degenerate off-resonant point"));
    }
    let coupling = 2.0 * (1.0 - circle.center / off);
    let phi0 = coupling.arg();
    let qc0 = ph.ql / coupling.norm();

    let fc = trace.center_hz();
    let start = [ph.fr_hz, ph.ql.ln(), qc0.ln(), phi0, off.norm().ln(), off.arg() - 2.0 * PI * fc * delay.tau_s, delay.tau_s];
    let problem = NotchProblem { trace, fc };
    let lm = LmConfig { max_iterations: opts.max_iterations, cost_tolerance: opts.cost_tolerance, ..LmConfig::default() };
    let rep = minimize(&problem, &start, lm)?;
    let p = &rep.params;

    let phi = wrap_angle(p[3]);
    let params = NotchParams {
        fr_hz: p[0],
        ql: p[1].exp(),
        qc_mag: p[2].exp(),
        phi_rad: phi,
        amp: p[4].exp(),
        phase0_rad: wrap_angle(p[5] + 2.0 * PI * fc * p[6]),
        tau_s: p[6],
    };
    let qi = params.qi();
    let nonphysical = !(qi > 0.0) || !(phi.abs() < FRAC_PI_2);
    if nonphysical {
        log::warn!("non-physical notch fit: Qi = {qi:e}, phi = {phi}");
    }
    if params.ql * trace.span_hz() / params.fr_hz < 5.0 {
        log::warn!("sweep spans fewer than 5 linewidths; Q estimates may be biased");
    }

    let dof = (2 * n).saturating_sub(7).max(1) as f64;
    let s2 = 2.0 * rep.cost / dof;
    let stderr = rep
        .jtj_inverse
        .as_ref()
        .map(|inv| {
            let var = |g: &[f64; 7]| -> f64 {
                let mut v = 0.0;
                for a in 0..7 {
                    for b in 0..7 {
                        v += g[a] * inv[a * 7 + b] * g[b];
                    }
                }
                (s2 * v).max(0.0).sqrt()
            };
            let unit = |k: usize| {
                let mut g = [0.0; 7];
                g[k] = 1.0;
                g
            };
            let (ql, qc) = (params.ql, params.qc_mag);
            // d(1/Qi) with respect to ln Ql, ln Qc, φ.
            let q2 = qi * qi;
            let g_qi = [0.0, q2 / ql, -q2 * phi.cos() / qc, -q2 * phi.sin() / qc, 0.0, 0.0, 0.0];
            let mut g_phase0 = [0.0; 7];
            g_phase0[5] = 1.0;
            g_phase0[6] = 2.0 * PI * fc;
            NotchStderr {
                fr_hz: var(&unit(0)),
                ql: ql * var(&unit(1)),
                qc_mag: qc * var(&unit(2)),
                phi_rad: var(&unit(3)),
                amp: params.amp * var(&unit(4)),
                phase0_rad: var(&g_phase0),
                tau_s: var(&unit(6)),
                qi: var(&g_qi),
            }
        })
        .unwrap_or(NotchStderr {
            fr_hz: f64::INFINITY,
            ql: f64::INFINITY,
            qc_mag: f64::INFINITY,
            phi_rad: f64::INFINITY,
            amp: f64::INFINITY,
            phase0_rad: f64::INFINITY,
            tau_s: f64::INFINITY,
            qi: f64::INFINITY,
        });

    Ok(NotchFitResult {
        params,
        qi,
        stderr,
        rms_residual: (2.0 * rep.cost / n as f64).sqrt() / params.amp,
        n_points: n,
        iterations: rep.iterations,
        nonphysical,
    })
}
