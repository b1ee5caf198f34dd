//! BCS gap and the low-temperature Mattis-Bardeen complex conductivity
//! `σ = σ1 − jσ2` of a superconducting film.

use core::f64::consts::PI;

use crate::consts::{HBAR_EVS, KB_EV};
use crate::error::err;
use crate::special::{bessel_i0, bessel_k0};
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// Ratio `Δ0 / (kB Tc)` of weak-coupling BCS theory.
pub const BCS_GAP_RATIO: f64 = 1.76;

/// A dirty-limit length is "much shorter" when below this fraction.
pub const DIRTY_LIMIT_FRACTION: f64 = 1.0 / 3.0;

/// Superconducting film constants.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MaterialParams {
    pub tc_kelvin: f64,
    /// Zero-temperature gap in eV.
    pub delta0_ev: f64,
    /// Normal-state sheet resistance just above `Tc`, Ω/□.
    pub sheet_resistance_ohm: f64,
    pub thickness_m: f64,
    /// Single-spin density of states at the Fermi level, states/(m³·eV).
    pub n0_states: f64,
    /// Kinetic-inductance fraction.
    pub alpha: f64,
    pub mean_free_path_m: Option<f64>,
    pub coherence_length_m: Option<f64>,
    pub penetration_depth_m: Option<f64>,
}

impl MaterialParams {
    /// Builds a validated parameter set. `delta0_ev = None` takes the BCS value
    /// `1.76 kB Tc`.
    pub fn new(
        tc_kelvin: f64,
        delta0_ev: Option<f64>,
        sheet_resistance_ohm: f64,
        thickness_m: f64,
        n0_states: f64,
        alpha: f64,
    ) -> Result<Self> {
        let delta0_ev = match delta0_ev {
            Some(d) => d,
            None => gap_at_zero(tc_kelvin)?,
        };
        let p = Self {
            tc_kelvin,
            delta0_ev,
            sheet_resistance_ohm,
            thickness_m,
            n0_states,
            alpha,
            mean_free_path_m: None,
            coherence_length_m: None,
            penetration_depth_m: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_lengths(mut self, mean_free_path_m: f64, coherence_length_m: f64, penetration_depth_m: f64) -> Result<Self> {
        self.mean_free_path_m = Some(mean_free_path_m);
        self.coherence_length_m = Some(coherence_length_m);
        self.penetration_depth_m = Some(penetration_depth_m);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tc_kelvin) {
            return Err(err!(Domain, "MaterialParams", "tc_kelvin must be positive, got {}", self.tc_kelvin));
        }
        if !positive(self.thickness_m) {
            return Err(err!(Domain, "MaterialParams", "thickness_m must be positive, got {}", self.thickness_m));
        }
        if !positive(self.sheet_resistance_ohm) {
            return Err(err!(Domain, "MaterialParams", "sheet_resistance_ohm must be positive, got {}", self.sheet_resistance_ohm));
        }
        if !positive(self.delta0_ev) {
            return Err(err!(Domain, "MaterialParams", "delta0_ev must be positive, got {}", self.delta0_ev));
        }
        if !positive(self.n0_states) {
            return Err(err!(Domain, "MaterialParams", "n0_states must be positive, got {}", self.n0_states));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(err!(Domain, "MaterialParams", "alpha must lie in (0, 1], got {}", self.alpha));
        }
        for (name, v) in [
            ("mean_free_path_m", self.mean_free_path_m),
            ("coherence_length_m", self.coherence_length_m),
            ("penetration_depth_m", self.penetration_depth_m),
        ] {
            if let Some(v) = v {
                if !positive(v) {
                    return Err(err!(Domain, "MaterialParams", "{name} must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }

    /// Normal-state conductivity `σN = 1 / (R□ d)` in S/m.
    pub fn sigma_n(&self) -> f64 {
        1.0 / (self.sheet_resistance_ohm * self.thickness_m)
    }

    /// `Some(l < ξ/3 && l < λ/3)` when all three lengths are known.
    pub fn dirty_limit(&self) -> Option<bool> {
        let l = self.mean_free_path_m?;
        let xi = self.coherence_length_m?;
        let lambda = self.penetration_depth_m?;
        Some(l < DIRTY_LIMIT_FRACTION * xi && l < DIRTY_LIMIT_FRACTION * lambda)
    }

    /// Gap at temperature `t` under `model`.
    pub fn gap(&self, t: f64, model: GapModel) -> Result<f64> {
        match model {
            GapModel::Bcs => gap_at_temperature(self.delta0_ev, t, self.tc_kelvin),
            GapModel::Constant => {
                if !(t >= 0.0 && t < self.tc_kelvin) {
                    return Err(err!(Domain, "gap", "temperature {t} K outside [0, Tc = {})", self.tc_kelvin));
                }
                Ok(self.delta0_ev)
            }
        }
    }
}

/// Temperature dependence used for `Δ(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum GapModel {
    /// `Δ0 tanh(1.74 sqrt(Tc/T − 1))`.
    #[default]
    Bcs,
    /// `Δ = Δ0`; fine well below `Tc/3`.
    Constant,
}

/// Leading prefactor of the `σ2` closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Sigma2Mode {
    /// `4Δ0/ħω`, as commonly printed with the σ1 expression.
    #[default]
    Prefactor4,
    /// `πΔ0/ħω`, the zero-temperature limit of the full integral.
    Standard,
}

impl Sigma2Mode {
    fn prefactor(self) -> f64 {
        match self {
            Sigma2Mode::Prefactor4 => 4.0,
            Sigma2Mode::Standard => PI,
        }
    }
}

/// Complex conductivity at one `(T, ω)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexConductivity {
    pub sigma1_norm: f64,
    pub sigma2_norm: f64,
    /// Normal-state conductivity, S/m.
    pub sigma_n: f64,
    pub temperature_k: f64,
    pub omega_rad: f64,
}

impl ComplexConductivity {
    pub fn sigma1(&self) -> f64 {
        self.sigma1_norm * self.sigma_n
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2_norm * self.sigma_n
    }
}

/// `Δ0 = 1.76 kB Tc` in eV.
pub fn gap_at_zero(tc: f64) -> Result<f64> {
    if !(tc >= 0.0) || !tc.is_finite() {
        return Err(err!(Domain, "gap_at_zero", "critical temperature must be non-negative, got {tc}"));
    }
    Ok(BCS_GAP_RATIO * KB_EV * tc)
}

/// Interpolated BCS gap `Δ0 tanh(1.74 sqrt(Tc/T − 1))`, valid on `0 <= T < Tc`.
pub fn gap_at_temperature(delta0: f64, t: f64, tc: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(err!(Domain, "gap_at_temperature", "temperature must be non-negative, got {t}"));
    }
    if !(t < tc) {
        return Err(err!(Domain, "gap_at_temperature", "gap closed: T = {t} K >= Tc = {tc} K"));
    }
    if t == 0.0 {
        return Ok(delta0);
    }
    Ok(delta0 * (1.74 * (tc / t - 1.0).sqrt()).tanh())
}

/// Which low-temperature assumptions an operating point strains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Validity {
    /// `ħω > Δ0/10`.
    pub photon_energy_high: bool,
    /// `kB T > Δ0/3`.
    pub temperature_high: bool,
}

impl Validity {
    pub fn is_ok(&self) -> bool {
        !self.photon_energy_high && !self.temperature_high
    }
}

pub fn validity(t: f64, omega: f64, delta0: f64) -> Validity {
    Validity { photon_energy_high: HBAR_EVS * omega > delta0 / 10.0, temperature_high: KB_EV * t > delta0 / 3.0 }
}

/// Closed-form `(σ1/σN, σ2/σN)` for `ħω ≪ Δ0`, `kB T ≪ Δ0`.
pub fn mb_sigma_norm(t: f64, omega: f64, delta0: f64, mode: Sigma2Mode) -> Result<(f64, f64)> {
    let terms = mb_terms(t, omega, delta0, mode)?;
    Ok((terms.sigma1, terms.sigma2_zero - terms.sigma2_depression))
}

/// Thermal depression `(σ2(0) − σ2(T))/σN` of the closed form.
///
/// Below roughly `Δ0/(35 kB)` this is smaller than one ulp of `σ2` itself, so
/// it is the quantity to compare when resolving the temperature dependence.
pub fn mb_sigma2_depression(t: f64, omega: f64, delta0: f64, mode: Sigma2Mode) -> Result<f64> {
    Ok(mb_terms(t, omega, delta0, mode)?.sigma2_depression)
}

struct MbTerms {
    sigma1: f64,
    sigma2_zero: f64,
    sigma2_depression: f64,
}

fn mb_terms(t: f64, omega: f64, delta0: f64, mode: Sigma2Mode) -> Result<MbTerms> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(err!(Domain, "mb_sigma_norm", "temperature must be positive, got {t}"));
    }
    if !(omega > 0.0) || !(delta0 > 0.0) {
        return Err(err!(Domain, "mb_sigma_norm", "frequency and gap must be positive"));
    }
    let hw = HBAR_EVS * omega;
    if hw >= 2.0 * delta0 {
        return Err(err!(Domain, "mb_sigma_norm", "photon energy {hw:e} eV reaches 2Δ0 = {:e} eV", 2.0 * delta0));
    }
    let v = validity(t, omega, delta0);
    if !v.is_ok() {
        log::warn!(
            "Mattis-Bardeen closed form strained at T = {t} K, ω = {omega:e} rad/s (ħω > Δ0/10: {}, kBT > Δ0/3: {})",
            v.photon_energy_high,
            v.temperature_high
        );
    }
    let kt = KB_EV * t;
    let xi = hw / (2.0 * kt);
    let activation = (-delta0 / kt).exp();
    let k0 = bessel_k0(xi)?;
    let sigma1 = 4.0 * delta0 / hw * activation * xi.sinh() * k0;

    // e^{-xi} I0(xi) is the exponentially scaled I0; evaluate it without
    // overflow for large xi.
    let scaled_i0 = if xi > 600.0 { 1.0 / (2.0 * PI * xi).sqrt() } else { (-xi).exp() * bessel_i0(xi)? };
    let sigma2_zero = mode.prefactor() * delta0 / hw;
    let sigma2_depression = sigma2_zero * activation * ((2.0 * PI * kt / delta0).sqrt() + 2.0 * scaled_i0);
    Ok(MbTerms { sigma1, sigma2_zero, sigma2_depression })
}

/// Absolute and normalised conductivity of the film at `(t, omega)`.
pub fn complex_conductivity(params: &MaterialParams, t: f64, omega: f64, mode: Sigma2Mode) -> Result<ComplexConductivity> {
    params.validate()?;
    let (sigma1_norm, sigma2_norm) = mb_sigma_norm(t, omega, params.delta0_ev, mode)?;
    Ok(ComplexConductivity { sigma1_norm, sigma2_norm, sigma_n: params.sigma_n(), temperature_k: t, omega_rad: omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::angular;

    const DELTA0: f64 = 1.623e-3;

    fn omega() -> f64 {
        angular(5.95e9)
    }

    #[test]
    fn gap_at_zero_examples() {
        assert!((gap_at_zero(10.7).unwrap() - 1.623e-3).abs() < 1e-6);
        assert_eq!(gap_at_zero(0.0).unwrap(), 0.0);
        assert!((gap_at_zero(1.0).unwrap() - 1.5166e-4).abs() < 1e-8);
        assert!(gap_at_zero(-1.0).is_err());
    }

    #[test]
    fn gap_interpolation() {
        let tc = 10.7;
        assert_eq!(gap_at_temperature(DELTA0, 0.0, tc).unwrap(), DELTA0);
        assert!(gap_at_temperature(DELTA0, tc / 3.0, tc).unwrap() >= 0.98 * DELTA0);
        assert!(gap_at_temperature(DELTA0, 0.999 * tc, tc).unwrap() < 0.1 * DELTA0);
        assert!(gap_at_temperature(DELTA0, tc, tc).is_err());
        let mut prev = DELTA0;
        for i in 1..200 {
            let g = gap_at_temperature(DELTA0, tc * i as f64 / 200.0, tc).unwrap();
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn low_temperature_limits() {
        let hw = HBAR_EVS * omega();
        let (s1, s2p) = mb_sigma_norm(0.05, omega(), DELTA0, Sigma2Mode::Prefactor4).unwrap();
        let (_, s2s) = mb_sigma_norm(0.05, omega(), DELTA0, Sigma2Mode::Standard).unwrap();
        assert!(s1 < 1e-100);
        assert!((s2p / (4.0 * DELTA0 / hw) - 1.0).abs() < 1e-12);
        assert!((s2s / (PI * DELTA0 / hw) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma1_at_one_kelvin() {
        let (s1, _) = mb_sigma_norm(1.0, omega(), DELTA0, Sigma2Mode::Prefactor4).unwrap();
        assert!((s1 / 5.1e-7 - 1.0).abs() < 0.03, "{s1}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(mb_sigma_norm(0.0, omega(), DELTA0, Sigma2Mode::Prefactor4).is_err());
        assert!(mb_sigma_norm(-1.0, omega(), DELTA0, Sigma2Mode::Prefactor4).is_err());
        let too_fast = 2.0 * DELTA0 / HBAR_EVS;
        assert!(mb_sigma_norm(1.0, too_fast, DELTA0, Sigma2Mode::Prefactor4).is_err());
    }

    #[test]
    fn normal_conductivity_and_scaling() {
        let p = MaterialParams::new(10.7, None, 159.5, 100e-9, 1.86e28, 0.5).unwrap();
        assert!((p.sigma_n() / 6.27e4 - 1.0).abs() < 1e-3);
        let a = complex_conductivity(&p, 1.5, omega(), Sigma2Mode::Prefactor4).unwrap();
        let q = MaterialParams { sheet_resistance_ohm: 2.0 * 159.5, ..p };
        let b = complex_conductivity(&q, 1.5, omega(), Sigma2Mode::Prefactor4).unwrap();
        assert_eq!(a.sigma1_norm, b.sigma1_norm);
        assert_eq!(a.sigma2_norm, b.sigma2_norm);
        assert!((a.sigma1() / b.sigma1() - 2.0).abs() < 1e-12);
        assert!((a.sigma2() / b.sigma2() - 2.0).abs() < 1e-12);
        let cold = complex_conductivity(&p, 0.1, omega(), Sigma2Mode::Prefactor4).unwrap();
        let warm = complex_conductivity(&p, 3.0, omega(), Sigma2Mode::Prefactor4).unwrap();
        assert!(cold.sigma1_norm < warm.sigma1_norm);
    }

    #[test]
    fn material_validation() {
        assert!(MaterialParams::new(0.0, None, 159.5, 100e-9, 1.86e28, 0.5).is_err());
        assert!(MaterialParams::new(10.7, None, 159.5, 0.0, 1.86e28, 0.5).is_err());
        assert!(MaterialParams::new(10.7, None, -1.0, 100e-9, 1.86e28, 0.5).is_err());
        assert!(MaterialParams::new(10.7, Some(0.0), 159.5, 100e-9, 1.86e28, 0.5).is_err());
        assert!(MaterialParams::new(10.7, None, 159.5, 100e-9, 1.86e28, 0.0).is_err());
        assert!(MaterialParams::new(10.7, None, 159.5, 100e-9, 1.86e28, 1.5).is_err());
        let p = MaterialParams::new(10.7, None, 159.5, 100e-9, 1.86e28, 1.0).unwrap();
        assert!((p.delta0_ev - 1.623e-3).abs() < 1e-6);
        assert_eq!(p.dirty_limit(), None);
        assert_eq!(p.with_lengths(1e-9, 5e-9, 300e-9).unwrap().dirty_limit(), Some(true));
        assert_eq!(p.with_lengths(2e-9, 5e-9, 300e-9).unwrap().dirty_limit(), Some(false));
    }

    #[test]
    fn validity_flags() {
        assert!(validity(0.5, omega(), DELTA0).is_ok());
        assert!(validity(10.0, omega(), DELTA0).temperature_high);
        assert!(validity(0.5, DELTA0 / HBAR_EVS, DELTA0).photon_energy_high);
    }
}
