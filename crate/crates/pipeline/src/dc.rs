//! Critical temperature, normal-state sheet resistance and residual
//! resistance ratio from an R(T) sweep.

use serde::{Deserialize, Serialize};

use crate::error::{PipelineError, Result};

/// Normal-state window above Tc used for the plateau median, in K.
pub const PLATEAU_WINDOW_K: (f64, f64) = (2.0, 20.0);
/// Room-temperature reference for the resistance ratio.
pub const ROOM_TEMPERATURE_K: f64 = 300.0;
/// The series must reach at least this temperature for a resistance ratio.
pub const RRR_MIN_TEMPERATURE_K: f64 = 295.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcResult {
    /// Temperature where R first reaches 50% of the plateau.
    pub tc_k: f64,
    /// Normal-state plateau, Ω/□.
    pub r_sq_tc_ohm: f64,
    /// `R(300 K) / R(plateau)`; `None` when the sweep stops short of room temperature.
    pub rrr: Option<f64>,
    pub t10_k: f64,
    pub t90_k: f64,
    pub transition_width_k: f64,
}

/// First upward crossing of `level`, linearly interpolated.
fn crossing(series: &[(f64, f64)], level: f64) -> Option<f64> {
    if series.first()?.1 >= level {
        return Some(series[0].0);
    }
    series.windows(2).find(|w| w[0].1 < level && w[1].1 >= level).map(|w| {
        let (t0, r0) = w[0];
        let (t1, r1) = w[1];
        t0 + (level - r0) * (t1 - t0) / (r1 - r0)
    })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn interpolate(series: &[(f64, f64)], t: f64) -> Option<f64> {
    let w = series.windows(2).find(|w| w[0].0 <= t && t <= w[1].0)?;
    let (t0, r0) = w[0];
    let (t1, r1) = w[1];
    Some(if t1 == t0 { r0 } else { r0 + (t - t0) * (r1 - r0) / (t1 - t0) })
}

/// `series` must be sorted by temperature (as returned by `ingest_rt`).
pub fn extract_tc_rrr(series: &[(f64, f64)]) -> Result<DcResult> {
    if series.len() < 3 {
        return Err(PipelineError::Input(format!("R(T) series needs at least 3 points, got {}", series.len())));
    }
    if series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(PipelineError::Input("R(T) series must be strictly ascending in temperature".into()));
    }
    // Coarse pass: the largest resistance below 100 K stands in for the plateau.
    let coarse = series.iter().filter(|p| p.0 < 100.0).map(|p| p.1).fold(0.0, f64::max);
    if !(coarse > 0.0) {
        return Err(PipelineError::Input("no normal-state resistance below 100 K".into()));
    }
    let mut plateau = coarse;
    let mut tc = crossing(series, 0.5 * plateau).ok_or_else(|| PipelineError::Input("no transition found".into()))?;
    for _ in 0..3 {
        let window: Vec<f64> =
            series.iter().filter(|p| p.0 >= tc + PLATEAU_WINDOW_K.0 && p.0 <= tc + PLATEAU_WINDOW_K.1).map(|p| p.1).collect();
        plateau =
            median(window).ok_or_else(|| PipelineError::Input(format!("no points in the normal-state window above Tc ≈ {tc:.2} K")))?;
        tc = crossing(series, 0.5 * plateau).ok_or_else(|| PipelineError::Input("no transition found".into()))?;
    }
    let r_min = series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if r_min > 0.1 * plateau {
        return Err(PipelineError::Input(format!("no transition found: resistance never drops below 10% of the {plateau:.3} Ω plateau")));
    }
    let t10 = crossing(series, 0.1 * plateau).unwrap_or(tc);
    let t90 = crossing(series, 0.9 * plateau).unwrap_or(tc);
    let t_last = series[series.len() - 1].0;
    let rrr = if t_last >= ROOM_TEMPERATURE_K {
        interpolate(series, ROOM_TEMPERATURE_K).map(|r| r / plateau)
    } else if t_last >= RRR_MIN_TEMPERATURE_K {
        Some(series[series.len() - 1].1 / plateau)
    } else {
        log::warn!("R(T) stops at {t_last} K; resistance ratio unavailable");
        None
    };
    Ok(DcResult { tc_k: tc, r_sq_tc_ohm: plateau, rrr, t10_k: t10, t90_k: t90, transition_width_k: t90 - t10 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(tc: f64, plateau: f64, ratio: f64, scale: f64) -> Vec<(f64, f64)> {
        (0..2990)
            .map(|i| {
                let t = 2.0 + 0.1 * i as f64;
                let normal = plateau * (1.0 + (ratio - 1.0) * (t - tc) / (300.0 - tc));
                (t, scale * normal * 0.5 * (1.0 + ((t - tc) / 0.05).tanh()))
            })
            .collect()
    }

    #[test]
    fn ideal_step() {
        let r = extract_tc_rrr(&step(10.7, 159.5, 1.0, 1.0)).unwrap();
        assert!((r.tc_k - 10.7).abs() < 0.01, "{r:?}");
        assert!((r.r_sq_tc_ohm - 159.5).abs() < 1e-9);
        assert!((r.rrr.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.t10_k < r.tc_k && r.tc_k < r.t90_k);
    }

    #[test]
    fn scale_invariance() {
        let a = extract_tc_rrr(&step(10.7, 159.5, 0.98, 1.0)).unwrap();
        let b = extract_tc_rrr(&step(10.7, 159.5, 0.98, 3.7)).unwrap();
        assert!((a.tc_k - b.tc_k).abs() < 1e-9);
        assert!((a.rrr.unwrap() - b.rrr.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn no_transition() {
        let flat: Vec<(f64, f64)> = (0..100).map(|i| (2.0 + i as f64, 100.0)).collect();
        assert!(extract_tc_rrr(&flat).is_err());
        let shallow: Vec<(f64, f64)> = (0..100).map(|i| (2.0 + i as f64, if i < 5 { 50.0 } else { 100.0 })).collect();
        assert!(extract_tc_rrr(&shallow).is_err());
    }

    #[test]
    fn short_sweep_has_no_ratio() {
        let s: Vec<(f64, f64)> = step(10.7, 159.5, 1.0, 1.0).into_iter().filter(|p| p.0 < 100.0).collect();
        assert_eq!(extract_tc_rrr(&s).unwrap().rrr, None);
    }
}
