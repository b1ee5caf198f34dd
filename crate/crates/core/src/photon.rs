//! Drive-power budget and average intra-resonator photon number.
//!
//! ```text
//! P_in   = P_VNA + P_att                      (dBm + dB)
//! P_loss = P_in (1 − |S21|² − |S11|²)
//! |S21|  = (|Qc| − Ql)² / |Qc|²,   |S11| = Ql² / |Qc|²
//! <n>    = Qi P_loss / (ħ ω²)
//! ```
//!
//! Powers are carried in watts internally.

use crate::consts::{angular, HBAR_JS};
use crate::error::err;
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Power at the feedline, dBm.
pub fn input_power_dbm(p_vna_dbm: f64, p_att_db: f64) -> f64 {
    p_vna_dbm + p_att_db
}

/// `(|S21|, |S11|)` of a notch resonator on resonance.
pub fn scattering_mags(ql: f64, qc_mag: f64) -> Result<(f64, f64)> {
    if !(ql > 0.0) || !(qc_mag > 0.0) {
        return Err(err!(Domain, "scattering_mags", "Ql and |Qc| must be positive (got {ql}, {qc_mag})"));
    }
    let r = ql / qc_mag;
    Ok(((1.0 - r) * (1.0 - r), r * r))
}

/// Whether `|S21|² + |S11|² <= 1`.
pub fn energy_conserving(s21_mag: f64, s11_mag: f64) -> bool {
    s21_mag * s21_mag + s11_mag * s11_mag <= 1.0
}

/// Dissipated power `P_in (1 − |S21|² − |S11|²)` in W.
pub fn power_loss(p_in_w: f64, s21_mag: f64, s11_mag: f64) -> Result<f64> {
    if !(p_in_w >= 0.0) {
        return Err(err!(Domain, "power_loss", "input power must be non-negative, got {p_in_w}"));
    }
    let reflected_and_transmitted = s21_mag * s21_mag + s11_mag * s11_mag;
    if reflected_and_transmitted > 1.0 {
        return Err(err!(
            Consistency,
            "power_loss",
            "|S21|² + |S11|² = {reflected_and_transmitted} exceeds 1; scattering inputs outside their validity range"
        ));
    }
    Ok(p_in_w * (1.0 - reflected_and_transmitted))
}

/// `<n> = Qi P_loss / (ħ ω²)`.
pub fn photon_number(qi: f64, p_loss_w: f64, f_hz: f64) -> Result<f64> {
    if !(qi > 0.0) || !(f_hz > 0.0) {
        return Err(err!(Domain, "photon_number", "Qi and frequency must be positive"));
    }
    let w = angular(f_hz);
    Ok(qi * p_loss_w / (HBAR_JS * w * w))
}

/// Feedline power (dBm) that gives `n_target` photons on average.
pub fn power_for_photons(n_target: f64, qi: f64, ql: f64, qc_mag: f64, f_hz: f64) -> Result<f64> {
    if !(n_target > 0.0) || !(qi > 0.0) || !(f_hz > 0.0) {
        return Err(err!(Domain, "power_for_photons", "inputs must be positive"));
    }
    let (s21, s11) = scattering_mags(ql, qc_mag)?;
    let fraction = 1.0 - s21 * s21 - s11 * s11;
    if !(fraction > 0.0) {
        return Err(err!(
            Consistency,
            "power_for_photons",
            "no power is dissipated (loss fraction {fraction}); photon number cannot be set"
        ));
    }
    let w = angular(f_hz);
    let p_in = n_target * HBAR_JS * w * w / (qi * fraction);
    Ok(watts_to_dbm(p_in))
}

/// Full budget for one drive setting.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerBudget {
    pub p_vna_dbm: f64,
    pub p_att_db: f64,
    pub p_in_dbm: f64,
    pub p_loss_w: f64,
    pub s21_mag: f64,
    pub s11_mag: f64,
    pub n_ph: f64,
}

pub fn power_budget(p_vna_dbm: f64, p_att_db: f64, qi: f64, ql: f64, qc_mag: f64, f_hz: f64) -> Result<PowerBudget> {
    let p_in_dbm = input_power_dbm(p_vna_dbm, p_att_db);
    let (s21_mag, s11_mag) = scattering_mags(ql, qc_mag)?;
    let p_loss_w = power_loss(dbm_to_watts(p_in_dbm), s21_mag, s11_mag)?;
    let n_ph = photon_number(qi, p_loss_w, f_hz)?;
    Ok(PowerBudget { p_vna_dbm, p_att_db, p_in_dbm, p_loss_w, s21_mag, s11_mag, n_ph })
}
