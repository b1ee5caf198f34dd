use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{unwrap_phase, S21Trace};
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Fraction of the grid at each end treated as off-resonant wing.
const WING_FRACTION: f64 = 0.1;
const MIN_POINTS: usize = 16;
/// Wing phase scatter (rad) above which the regression is meaningless.
const MAX_WING_RMS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayEstimate {
    pub tau_s: f64,
    /// One-sigma uncertainty from the wing regression.
    pub stderr_s: f64,
    /// Set when the uncertainty exceeds the estimate itself, or when the wing
    /// phase is not described by a straight line at all.
    pub unreliable: bool,
}

/// Cable delay from the unwrapped phase on the outer 20% of the grid.
///
/// The wings are regressed on `a + b (f − fc) + c / (f − fd)`, where `fd` is
/// the frequency of the largest excursion from the baseline; the last term
/// absorbs the resonance's residual phase tail so it does not bias the slope.
/// Returns `τ = −b / 2π`.
pub fn estimate_delay(trace: &S21Trace) -> Result<DelayEstimate> {
    trace.validate()?;
    let n = trace.len();
    if n < MIN_POINTS {
        return Err(err!(Fit, "estimate_delay", "need at least {MIN_POINTS} points, got {n}"));
    }
    let wing = ((n as f64 * WING_FRACTION).floor() as usize).max(3);
    let mut phase: Vec<f64> = trace.s21.iter().map(|z| z.arg()).collect();
    unwrap_phase(&mut phase);

    let fc = trace.center_hz();
    let fd = trace.freq_hz[dip_index(trace)];
    let half_span = 0.5 * trace.span_hz();

    let idx: Vec<usize> = (0..wing).chain(n - wing..n).collect();
    let rows: Vec<[f64; 3]> = idx
        .iter()
        .map(|&i| {
            let f = trace.freq_hz[i];
            let tail = if f != fd { half_span / (f - fd) } else { 0.0 };
            [1.0, (f - fc) / half_span, tail]
        })
        .collect();
    let y: Vec<f64> = idx.iter().map(|&i| phase[i]).collect();
    let use_tail = fd > trace.freq_hz[wing - 1] && fd < trace.freq_hz[n - wing];
    let k = if use_tail { 3 } else { 2 };

    // Normal equations on at most 3 unknowns.
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (r, &yi) in rows.iter().zip(&y) {
        for a in 0..k {
            aty[a] += r[a] * yi;
            for b in 0..k {
                ata[a][b] += r[a] * r[b];
            }
        }
    }
    let inv = invert_small(&ata, k).ok_or_else(|| err!(Fit, "estimate_delay", "singular wing regression"))?;
    let mut coef = [0.0; 3];
    for a in 0..k {
        coef[a] = (0..k).map(|b| inv[a][b] * aty[b]).sum();
    }
    let ssr: f64 = rows
        .iter()
        .zip(&y)
        .map(|(r, &yi)| {
            let fit: f64 = (0..k).map(|a| r[a] * coef[a]).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let dof = (rows.len() - k) as f64;
    let s2 = ssr / dof;
    let slope = coef[1] / half_span;
    let slope_se = (s2 * inv[1][1]).sqrt() / half_span;
    let tau_s = -slope / (2.0 * PI);
    let stderr_s = slope_se / (2.0 * PI);
    if !tau_s.is_finite() {
        return Err(err!(Fit, "estimate_delay", "non-finite delay estimate"));
    }
    // Unwrapping pure noise yields a random walk whose slope looks precise,
    // so the scatter about the fit is checked as well.
    let unreliable = (stderr_s > tau_s.abs() && stderr_s * 2.0 * PI * trace.span_hz() > 0.1) || s2.sqrt() > MAX_WING_RMS;
    if unreliable {
        log::warn!("cable delay poorly determined: {tau_s:e} ± {stderr_s:e} s");
    }
    Ok(DelayEstimate { tau_s, stderr_s, unreliable })
}

/// Index of the point farthest from the straight line joining the two ends of
/// the magnitude trace.
pub(crate) fn dip_index(trace: &S21Trace) -> usize {
    let n = trace.len();
    let m: Vec<f64> = trace.s21.iter().map(|z| z.norm()).collect();
    let (f0, f1) = (trace.freq_hz[0], trace.freq_hz[n - 1]);
    let (m0, m1) = (m[0], m[n - 1]);
    let mut best = 0;
    let mut best_dev = -1.0;
    for (i, (&mi, &f)) in m.iter().zip(&trace.freq_hz).enumerate() {
        let base = m0 + (m1 - m0) * (f - f0) / (f1 - f0);
        let dev = (mi - base).abs();
        if dev > best_dev {
            best_dev = dev;
            best = i;
        }
    }
    best
}

fn invert_small(a: &[[f64; 3]; 3], k: usize) -> Option<[[f64; 3]; 3]> {
    let mut flat = [0.0; 9];
    for i in 0..k {
        for j in 0..k {
            flat[i * k + j] = a[i][j];
        }
    }
    let inv = super::lm::spd_inverse(&flat[..k * k], k)?;
    let mut out = [[0.0; 3]; 3];
    for i in 0..k {
        for j in 0..k {
            out[i][j] = inv[i * k + j];
        }
    }
    Some(out)
}
