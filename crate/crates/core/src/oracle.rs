//! Full Mattis-Bardeen conductivity integrals in thermal equilibrium.
//!
//! These are the reference against which the low-temperature closed forms in
//! [`crate::mbcore`] are checked. The gap is held at the supplied `delta0`.
//!
//! ```text
//! s1 = (2/hw) ∫_Δ^∞ [f(E) - f(E+hw)] g(E) dE
//!      g(E) = (E² + Δ² + hw E) / (sqrt(E² - Δ²) sqrt((E+hw)² - Δ²))
//! s2 = (1/hw) ∫_{max(Δ-hw, -Δ)}^{Δ} [1 - 2 f(E+hw)] h(E) dE
//!      h(E) = (E² + Δ² + hw E) / (sqrt(Δ² - E²) sqrt((E+hw)² - Δ²))
//! ```
//!
//! Square-root endpoint singularities are removed by substitution:
//! `E = Δ cosh u` for `s1`, and a cosine map onto `[0, π]` for `s2`.

use core::f64::consts::PI;

use crate::consts::{HBAR_EVS, KB_EV};
use crate::error::err;
use crate::quad::integrate;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance of the oracle integrals.
pub const ORACLE_REL_TOL: f64 = 1e-8;
const MAX_INTERVALS: usize = 4000;

fn fermi(e: f64, kt: f64) -> f64 {
    let x = e / kt;
    if x > 700.0 {
        (-x).exp()
    } else {
        1.0 / (x.exp() + 1.0)
    }
}

/// Returns `(s1/sN, s2/sN)` from the full integrals.
pub fn mb_full_oracle(t: f64, omega: f64, delta0: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(err!(Domain, "mb_full_oracle", "temperature must be positive, got {t}"));
    }
    if !(delta0 > 0.0) || !(omega > 0.0) {
        return Err(err!(Domain, "mb_full_oracle", "gap and frequency must be positive"));
    }
    let hw = HBAR_EVS * omega;
    if hw >= 2.0 * delta0 {
        return Err(err!(Domain, "mb_full_oracle", "photon energy {hw:e} eV exceeds 2Δ0"));
    }
    let kt = KB_EV * t;
    let d = delta0;

    // s1: E = Δ cosh u, dE / sqrt(E² - Δ²) = du.
    let e_max = d + hw + 80.0 * kt;
    let u_max = (e_max / d).acosh();
    let s1_int = integrate(
        |u| {
            let e = d * u.cosh();
            let occ = fermi(e, kt) - fermi(e + hw, kt);
            occ * (e * e + d * d + hw * e) / ((e + hw) * (e + hw) - d * d).sqrt()
        },
        0.0,
        u_max,
        ORACLE_REL_TOL,
        0.0,
        MAX_INTERVALS,
    )
    .map_err(|e| err!(Numerical, "mb_full_oracle", "sigma1 integral: {e}"))?;
    let s1 = 2.0 / hw * s1_int.value;

    // s2 on [lo, Δ] with E = lo + (Δ - lo)(1 - cos θ)/2.
    let lo = (d - hw).max(-d);
    let half = 0.5 * (d - lo);
    let s2_int = integrate(
        |th| {
            let e = lo + half * (1.0 - th.cos());
            let de = half * th.sin();
            let a = d * d - e * e;
            let b = (e + hw) * (e + hw) - d * d;
            if a <= 0.0 || b <= 0.0 {
                return 0.0;
            }
            (1.0 - 2.0 * fermi(e + hw, kt)) * (e * e + d * d + hw * e) / (a.sqrt() * b.sqrt()) * de
        },
        0.0,
        PI,
        ORACLE_REL_TOL,
        0.0,
        MAX_INTERVALS,
    )
    .map_err(|e| err!(Numerical, "mb_full_oracle", "sigma2 integral: {e}"))?;
    let s2 = s2_int.value / hw;
    Ok((s1, s2))
}
