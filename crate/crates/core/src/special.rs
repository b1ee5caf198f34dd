//! Modified Bessel functions of integer order 0 and 1, and the complete
//! elliptic integral of the first kind.
//!
//! `I0`/`I1` use the ascending power series, which has only positive terms and
//! stays accurate to a few ulp for every argument that does not overflow.
//! `K0`/`K1` use the ascending series for `x <= 2` and Steed's continued
//! fraction (Temme's form) above, both good to ~1e-15 relative.

use core::f64::consts::PI;

use crate::consts::EULER_GAMMA;
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Largest argument accepted by the `I` functions before `e^x` overflows.
pub const I_MAX_ARG: f64 = 700.0;

const K_SERIES_MAX: f64 = 2.0;
const MAX_TERMS: usize = 2000;

/// `I0(x)` and `I1(x)` by their ascending series.
fn i_series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    // I0: sum q^k / (k!)^2 ; I1: (x/2) sum q^k / (k! (k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut s0 = 1.0;
    let mut s1 = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0 <= s0 * f64::EPSILON * 0.5 && t1 <= s1 * f64::EPSILON * 0.5 {
            break;
        }
    }
    (s0, 0.5 * x * s1)
}

/// Small-argument series for `K0` and `K1`, valid for `0 < x <= 2`.
fn k_series(x: f64) -> (f64, f64) {
    let (i0, i1) = i_series(x);
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    // K0 = -(ln(x/2) + gamma) I0 + sum_{k>=1} q^k/(k!)^2 H_k
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut s0 = 0.0;
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_{k>=0} q^k/(k!(k+1)!) (psi(k+1) + psi(k+2))
    let mut psi_k1 = -EULER_GAMMA;
    let mut psi_k2 = 1.0 - EULER_GAMMA;
    let mut term1 = 1.0;
    let mut s1 = psi_k1 + psi_k2;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        s0 += term * harmonic;

        term1 *= q / (kf * (kf + 1.0));
        psi_k1 = psi_k2;
        psi_k2 += 1.0 / (kf + 1.0);
        let add = term1 * (psi_k1 + psi_k2);
        s1 += add;
        if term * harmonic <= s0.abs() * f64::EPSILON * 0.25 && add.abs() <= s1.abs() * f64::EPSILON * 0.25 {
            break;
        }
    }
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction for `K0`, `K1` at order zero, `x >= 2`.
fn k_continued_fraction(x: f64) -> Result<(f64, f64)> {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(err!(Numerical, "bessel_k", "continued fraction did not converge at x = {x}"));
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    Ok((k0, k1))
}

/// `K0(x)` and `K1(x)` for `x > 0`.
pub fn bessel_k01(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(err!(Domain, "bessel_k", "argument must be positive and finite, got {x}"));
    }
    if x <= K_SERIES_MAX {
        Ok(k_series(x))
    } else {
        k_continued_fraction(x)
    }
}

/// `I0(x)` and `I1(x)` for `0 <= x <= 700`.
pub fn bessel_i01(x: f64) -> Result<(f64, f64)> {
    if !(x >= 0.0) {
        return Err(err!(Domain, "bessel_i", "argument must be non-negative, got {x}"));
    }
    if x > I_MAX_ARG {
        return Err(err!(Range, "bessel_i", "argument {x} overflows (limit {I_MAX_ARG})"));
    }
    Ok(i_series(x))
}

/// `K0(x)`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    bessel_k01(x).map(|(k0, _)| k0)
}

/// `I0(x)`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    bessel_i01(x).map(|(i0, _)| i0)
}

/// Both zeroth-order functions at once, `(K0(x), I0(x))`.
pub fn modified_bessel(x: f64) -> Result<(f64, f64)> {
    Ok((bessel_k0(x)?, bessel_i0(x)?))
}

/// Complete elliptic integral of the first kind `K(k)` for modulus `0 <= k < 1`,
/// by the arithmetic-geometric mean.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(err!(Domain, "elliptic_k", "modulus must satisfy 0 <= k < 1, got {k}"));
    }
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(PI / (2.0 * a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values_at_one() {
        let (k0, i0) = modified_bessel(1.0).unwrap();
        assert!(rel(k0, 0.421_024_438_240_708_34) < 1e-14);
        assert!(rel(i0, 1.266_065_877_752_008_4) < 1e-14);
    }

    #[test]
    fn i0_at_zero_is_one() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_i01(0.0).unwrap().1, 0.0);
    }

    #[test]
    fn k0_small_argument_asymptote() {
        for &x in &[1e-4_f64, 1e-6, 1e-9] {
            let lead = -(0.5 * x).ln() - EULER_GAMMA;
            assert!((bessel_k0(x).unwrap() - lead).abs() < 10.0 * x * x * lead);
        }
    }

    #[test]
    fn series_and_continued_fraction_agree_at_crossover() {
        for &x in &[1.8, 2.0, 2.2] {
            let s = k_series(x);
            let c = k_continued_fraction(x).unwrap();
            assert!(rel(s.0, c.0) < 1e-13, "K0 at {x}");
            assert!(rel(s.1, c.1) < 1e-13, "K1 at {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_k0(0.0), Err(crate::Error::Domain { .. })));
        assert!(matches!(bessel_k0(-1.0), Err(crate::Error::Domain { .. })));
        assert!(matches!(bessel_i0(-1.0), Err(crate::Error::Domain { .. })));
        assert!(matches!(bessel_i0(701.0), Err(crate::Error::Range { .. })));
        assert!(bessel_i0(700.0).unwrap().is_finite());
        assert!(matches!(elliptic_k(1.0), Err(crate::Error::Domain { .. })));
        assert!(matches!(elliptic_k(-0.1), Err(crate::Error::Domain { .. })));
    }

    #[test]
    fn elliptic_reference_points() {
        assert_eq!(elliptic_k(0.0).unwrap(), PI / 2.0);
        let k = core::f64::consts::FRAC_1_SQRT_2;
        assert!((elliptic_k(k).unwrap() - 1.854_074_677_301_371_9).abs() < 1e-12);
    }

    #[test]
    fn elliptic_log_divergence_near_one() {
        for &kp in &[1e-3_f64, 1e-4, 1e-5] {
            // k' = sqrt(1-k^2)
            let k = (1.0 - kp * kp).sqrt();
            let exact = elliptic_k(k).unwrap();
            let asym = (4.0 / kp).ln();
            assert!((exact / asym - 1.0).abs() < 1e-5, "kp={kp}");
        }
    }
}
