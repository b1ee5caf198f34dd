//! TLS loss, composition of the internal quality factor and quasiparticle
//! densities inferred from loss tangents.

use core::f64::consts::PI;

use crate::consts::{HBAR_EVS, KB_EV};
use crate::error::err;
use crate::mbcore::{GapModel, MaterialParams};
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

/// m⁻³ per μm⁻³.
pub const PER_UM3: f64 = 1e18;

/// Standard TLS model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TlsParams {
    /// Filling-factor-weighted intrinsic loss tangent `F δ0`.
    pub f_delta0: f64,
    /// Critical photon number.
    pub n_c: f64,
    /// Saturation exponent.
    pub beta_exp: f64,
    pub omega_rad: f64,
}

impl TlsParams {
    pub fn new(f_delta0: f64, n_c: f64, beta_exp: f64, omega_rad: f64) -> Result<Self> {
        let p = Self { f_delta0, n_c, beta_exp, omega_rad };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_delta0 > 0.0) || !(self.n_c > 0.0) || !(self.omega_rad > 0.0) {
            return Err(err!(Domain, "TlsParams", "f_delta0, n_c and omega must be positive"));
        }
        if !(self.beta_exp > 0.0 && self.beta_exp <= 1.0) {
            return Err(err!(Domain, "TlsParams", "beta_exp must lie in (0, 1], got {}", self.beta_exp));
        }
        Ok(())
    }

    /// Chooses `f_delta0` so that `Qi_theory(t) = qi_target` given the
    /// quasiparticle loss `delta_qp` already present at `t`.
    pub fn calibrate(qi_target: f64, t: f64, n_photon: f64, delta_qp: f64, n_c: f64, beta_exp: f64, omega_rad: f64) -> Result<Self> {
        let tls_loss = 1.0 / qi_target - delta_qp;
        if !(tls_loss > 0.0) {
            return Err(err!(
                Consistency,
                "TlsParams::calibrate",
                "quasiparticle loss {delta_qp:e} alone exceeds 1/Qi = {:e}",
                1.0 / qi_target
            ));
        }
        let unit = Self { f_delta0: 1.0, n_c, beta_exp, omega_rad };
        unit.validate()?;
        let shape = 1.0 / q_tls(t, n_photon, &unit)?;
        Self::new(tls_loss / shape, n_c, beta_exp, omega_rad)
    }
}

/// `Q_TLS` from `1/Q = F δ0 tanh(ħω / 2kBT) / (1 + n/nc)^β`. Returns
/// `f64::INFINITY` when the loss underflows.
pub fn q_tls(t: f64, n_photon: f64, p: &TlsParams) -> Result<f64> {
    if !(t > 0.0) {
        return Err(err!(Domain, "q_tls", "temperature must be positive, got {t}"));
    }
    if !(n_photon >= 0.0) {
        return Err(err!(Domain, "q_tls", "photon number must be non-negative, got {n_photon}"));
    }
    let x = HBAR_EVS * p.omega_rad / (2.0 * KB_EV * t);
    let loss = p.f_delta0 * x.tanh() / (1.0 + n_photon / p.n_c).powf(p.beta_exp);
    Ok(1.0 / loss)
}

/// `1 / (1/Q_TLS + δ_qp)`.
pub fn qi_theory(q_tls: f64, delta_qp: f64) -> Result<f64> {
    if !(q_tls > 0.0) || !(delta_qp >= 0.0) {
        return Err(err!(Domain, "qi_theory", "need Q_TLS > 0 and δ_qp >= 0 (got {q_tls}, {delta_qp})"));
    }
    Ok(1.0 / (1.0 / q_tls + delta_qp))
}

/// `1/Qi_measured − 1/Q_TLS`; negative values are returned as is.
pub fn delta_qp_measured(qi_measured: f64, q_tls: f64) -> Result<f64> {
    if !(qi_measured > 0.0) || !(q_tls > 0.0) {
        return Err(err!(Domain, "delta_qp_measured", "quality factors must be positive"));
    }
    Ok(1.0 / qi_measured - 1.0 / q_tls)
}

/// Quasiparticle density (m⁻³) equivalent to the loss tangent `delta_qp`:
/// `δ N0 Δ(T) (π/α) sqrt(ħω / 2Δ(T))`.
pub fn nqp_from_loss(delta_qp: f64, t: f64, params: &MaterialParams, omega: f64, gap_model: GapModel) -> Result<f64> {
    if !(delta_qp >= 0.0) {
        return Err(err!(Domain, "nqp_from_loss", "loss tangent must be non-negative, got {delta_qp}"));
    }
    if !(t > 0.0) {
        return Err(err!(Domain, "nqp_from_loss", "temperature must be positive, got {t}"));
    }
    let gap = params.gap(t, gap_model)?;
    if !(gap > 0.0) {
        return Err(err!(Domain, "nqp_from_loss", "gap vanished at T = {t} K"));
    }
    let hw = HBAR_EVS * omega;
    Ok(delta_qp * params.n0_states * gap * (PI / params.alpha) * (hw / (2.0 * gap)).sqrt())
}

/// Loss decomposition at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossBudget {
    pub temperature_k: f64,
    pub q_tls: f64,
    pub delta_qp_theory: f64,
    pub q_qp_theory: f64,
    pub qi_theory: f64,
    pub qi_measured: f64,
    pub delta_qp_measured: f64,
    /// `None` when the measured loss is negative.
    pub nqp_measured_per_um3: Option<f64>,
    pub nqp_theory_per_um3: f64,
    pub negative_loss: bool,
}

impl LossBudget {
    /// Assembles the record from the TLS channel, the theoretical quasiparticle
    /// loss and a measured `Qi`.
    pub fn assemble(
        temperature_k: f64,
        q_tls: f64,
        delta_qp_theory: f64,
        qi_measured: f64,
        params: &MaterialParams,
        omega: f64,
        gap_model: GapModel,
    ) -> Result<Self> {
        let qi_th = qi_theory(q_tls, delta_qp_theory)?;
        let delta_meas = delta_qp_measured(qi_measured, q_tls)?;
        let negative_loss = delta_meas < 0.0;
        let nqp_measured_per_um3 =
            if negative_loss { None } else { Some(nqp_from_loss(delta_meas, temperature_k, params, omega, gap_model)? / PER_UM3) };
        let nqp_theory_per_um3 = nqp_from_loss(delta_qp_theory, temperature_k, params, omega, gap_model)? / PER_UM3;
        Ok(Self {
            temperature_k,
            q_tls,
            delta_qp_theory,
            q_qp_theory: 1.0 / delta_qp_theory,
            qi_theory: qi_th,
            qi_measured,
            delta_qp_measured: delta_meas,
            nqp_measured_per_um3,
            nqp_theory_per_um3,
            negative_loss,
        })
    }

    /// Recomputes `qi_theory` from the stored channels.
    pub fn recomputed_qi_theory(&self) -> Result<f64> {
        qi_theory(self.q_tls, self.delta_qp_theory)
    }
}

/// Loss seen in the measurement beyond the TLS + thermal model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExcessLoss {
    /// `max(0, 1/Qi_measured − 1/Qi_theory)`.
    pub value: f64,
    /// The raw difference was negative (measurement better than model).
    pub negative: bool,
    /// Positive excess below `Tc/10`, read as a non-equilibrium channel.
    pub non_equilibrium: bool,
}

pub fn excess_qp_loss(budget: &LossBudget, tc_kelvin: f64) -> ExcessLoss {
    let raw = 1.0 / budget.qi_measured - 1.0 / budget.qi_theory;
    let value = raw.max(0.0);
    ExcessLoss { value, negative: raw < 0.0, non_equilibrium: value > 0.0 && budget.temperature_k < tc_kelvin / 10.0 }
}
