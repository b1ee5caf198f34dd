use alloc::vec::Vec;

use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Default distance allowed between `t_ref` and the nearest sweep temperature.
pub const DEFAULT_T_REF_TOLERANCE_K: f64 = 0.05;

/// `Δf(T) = fr(T) − fr(t_ref)`, with the reference taken at the temperature
/// nearest `t_ref` (within `tolerance_k`).
pub fn resonance_shift(series: &[(f64, f64)], t_ref: f64, tolerance_k: f64) -> Result<Vec<(f64, f64)>> {
    let (_, fr_ref) = series
        .iter()
        .copied()
        .min_by(|a, b| (a.0 - t_ref).abs().total_cmp(&(b.0 - t_ref).abs()))
        .ok_or_else(|| err!(Domain, "resonance_shift", "empty series"))?;
    let nearest = series.iter().map(|s| (s.0 - t_ref).abs()).fold(f64::INFINITY, f64::min);
    if nearest > tolerance_k {
        return Err(err!(Domain, "resonance_shift", "no temperature within {tolerance_k} K of the reference {t_ref} K"));
    }
    Ok(series.iter().map(|&(t, fr)| (t, fr - fr_ref)).collect())
}
