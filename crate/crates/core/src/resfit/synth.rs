use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{model_s21, NotchParams, S21Trace, TraceMeta};
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// `n` equally spaced points covering `span_linewidths · fr/Ql` around `fr`.
pub fn linewidth_grid(p: &NotchParams, span_linewidths: f64, n: usize) -> Vec<f64> {
    let span = span_linewidths * p.linewidth_hz();
    let start = p.fr_hz - 0.5 * span;
    let step = span / (n.max(2) - 1) as f64;
    (0..n).map(|i| start + step * i as f64).collect()
}

/// Model values on `grid` plus independent Gaussian noise of standard
/// deviation `noise_sigma` on each quadrature. Deterministic in `seed`.
pub fn synth_trace(p: &NotchParams, grid: &[f64], noise_sigma: f64, seed: u64, meta: TraceMeta) -> Result<S21Trace> {
    p.validate()?;
    if !(noise_sigma >= 0.0) {
        return Err(err!(Domain, "synth_trace", "noise sigma must be non-negative, got {noise_sigma}"));
    }
    let mut s21: Vec<Complex64> = grid.iter().map(|&f| model_s21(p, f)).collect();
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| err!(Domain, "synth_trace", "{e}"))?;
        for z in &mut s21 {
            *z += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    S21Trace::new(grid.to_vec(), s21, meta)
}
