use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Algebraic circle fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
    /// RMS of the radial residual `|z − c| − r`.
    pub rms_residual: f64,
}

/// Taubin's algebraic least-squares circle, solved by Newton iteration on the
/// characteristic polynomial (Chernov's formulation).
pub fn circle_fit(points: &[Complex64]) -> Result<Circle> {
    let n = points.len();
    if n < 3 {
        return Err(err!(Fit, "circle_fit", "need at least 3 points, got {n}"));
    }
    let nf = n as f64;
    let mean = points.iter().sum::<Complex64>() / nf;
    let scale = points.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(err!(Fit, "circle_fit", "points are coincident"));
    }
    let centred: Vec<Complex64> = points.iter().map(|z| (z - mean) / scale).collect();

    let (mut mxx, mut myy, mut mxy, mut mxz, mut myz, mut mzz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for z in &centred {
        let (x, y) = (z.re, z.im);
        let zz = x * x + y * y;
        mxx += x * x;
        myy += y * y;
        mxy += x * y;
        mxz += x * zz;
        myz += y * zz;
        mzz += zz * zz;
    }
    mxx /= nf;
    myy /= nf;
    mxy /= nf;
    mxz /= nf;
    myz /= nf;
    mzz /= nf;

    let mz = mxx + myy;
    let cov_xy = mxx * myy - mxy * mxy;
    let var_z = mzz - mz * mz;
    let a3 = 4.0 * mz;
    let a2 = -3.0 * mz * mz - mzz;
    let a1 = var_z * mz + 4.0 * cov_xy * mz - mxz * mxz - myz * myz;
    let a0 = mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;
    let a22 = a2 + a2;
    let a33 = a3 + a3 + a3;

    let mut x = 0.0;
    let mut y = a0;
    for _ in 0..100 {
        let dy = a1 + x * (a22 + a33 * x);
        let xnew = x - y / dy;
        if xnew == x || !xnew.is_finite() {
            break;
        }
        let ynew = a0 + xnew * (a1 + xnew * (a2 + xnew * a3));
        if ynew.abs() >= y.abs() {
            break;
        }
        x = xnew;
        y = ynew;
    }

    let det = x * x - x * mz + cov_xy;
    if !(det.abs() > 1e-14) {
        return Err(err!(Fit, "circle_fit", "points are collinear or degenerate (det = {det:e})"));
    }
    let cx = (mxz * (myy - x) - myz * mxy) / det / 2.0;
    let cy = (myz * (mxx - x) - mxz * mxy) / det / 2.0;
    let radius = (cx * cx + cy * cy + mz).sqrt();
    if !radius.is_finite() || radius > 1e6 {
        return Err(err!(Fit, "circle_fit", "points are collinear or degenerate"));
    }
    let c = Complex64::new(cx, cy);
    let rms = (centred.iter().map(|z| ((z - c).norm() - radius).powi(2)).sum::<f64>() / nf).sqrt();
    Ok(Circle { center: c * scale + mean, radius: radius * scale, rms_residual: rms * scale })
}
