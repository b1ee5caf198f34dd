//! Temperature-sweep analysis: per-trace fits, loss budget, frequency shift,
//! red-shift onset and the low-temperature quasiparticle plateau.

use rayon::prelude::*;
use resoloss_core::consts::angular;
use resoloss_core::impedance::{geometric_inductance, kinetic_fraction, qp_loss_theory, surface_impedance};
use resoloss_core::lossmodel::{excess_qp_loss, q_tls, ExcessLoss, LossBudget};
use resoloss_core::mbcore::complex_conductivity;
use resoloss_core::photon::power_budget;
use resoloss_core::resfit::{fit_notch_with, resonance_shift, NotchFitResult, S21Trace};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{PipelineError, Result};
use crate::report::{AnalysisReport, Provenance, REPORT_SCHEMA_VERSION};

/// Traces in one sweep may differ in drive power by at most this much.
pub const POWER_TOLERANCE_DB: f64 = 0.5;

/// One input trace with its provenance.
#[derive(Debug, Clone)]
pub struct SweepInput {
    /// Stable identifier, typically the file name.
    pub name: String,
    /// SHA-256 of the source bytes.
    pub sha256: String,
    pub trace: S21Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub fr_hz: f64,
    pub fr_stderr_hz: f64,
    pub ql: f64,
    pub ql_stderr: f64,
    pub qc_mag: f64,
    pub qc_mag_stderr: f64,
    pub phi_rad: f64,
    pub phi_stderr_rad: f64,
    pub amp: f64,
    pub phase0_rad: f64,
    pub tau_s: f64,
    pub tau_stderr_s: f64,
    pub qi: f64,
    pub qi_stderr: f64,
    pub rms_residual: f64,
    pub n_points: usize,
    pub iterations: usize,
    pub nonphysical: bool,
}

impl From<&NotchFitResult> for FitRecord {
    fn from(r: &NotchFitResult) -> Self {
        Self {
            fr_hz: r.params.fr_hz,
            fr_stderr_hz: r.stderr.fr_hz,
            ql: r.params.ql,
            ql_stderr: r.stderr.ql,
            qc_mag: r.params.qc_mag,
            qc_mag_stderr: r.stderr.qc_mag,
            phi_rad: r.params.phi_rad,
            phi_stderr_rad: r.stderr.phi_rad,
            amp: r.params.amp,
            phase0_rad: r.params.phase0_rad,
            tau_s: r.params.tau_s,
            tau_stderr_s: r.stderr.tau_s,
            qi: r.qi,
            qi_stderr: r.stderr.qi,
            rms_residual: r.rms_residual,
            n_points: r.n_points,
            iterations: r.iterations,
            nonphysical: r.nonphysical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductivityRecord {
    pub sigma1_norm: f64,
    pub sigma2_norm: f64,
    pub sigma1_s_per_m: f64,
    pub sigma2_s_per_m: f64,
    pub rs_ohm: f64,
    pub ls_henry: f64,
    pub kinetic_fraction: f64,
}

/// Photon number at the trace's drive power. The uncertainty is the fit
/// standard errors of Qi, Ql and |Qc| propagated linearly, treated as uncorrelated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonRecord {
    pub p_in_dbm: f64,
    pub n_ph: f64,
    pub n_ph_stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureEntry {
    pub source: String,
    pub temperature_k: f64,
    pub power_dbm: Option<f64>,
    pub status: EntryStatus,
    pub error: Option<String>,
    pub fit: Option<FitRecord>,
    pub delta_f_hz: Option<f64>,
    pub delta_f_stderr_hz: Option<f64>,
    pub conductivity: Option<ConductivityRecord>,
    pub budget: Option<LossBudget>,
    pub excess: Option<ExcessLoss>,
    pub photon: Option<PhotonRecord>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivedSummary {
    pub n_entries: usize,
    pub n_failed: usize,
    /// Coldest successfully fitted temperature; Δf is measured from here.
    pub t_ref_k: Option<f64>,
    pub onset_rule: String,
    pub redshift_onset_k: Option<f64>,
    /// Median of the measured density over T < Tc/10, μm⁻³.
    pub nqp_plateau_per_um3: Option<f64>,
    pub nqp_plateau_points: usize,
    pub qi_max_temperature_k: Option<f64>,
    pub qi_interior_maximum: bool,
    pub n_non_equilibrium: usize,
    pub n_negative_loss: usize,
}

struct Analysed {
    fit: NotchFitResult,
    conductivity: ConductivityRecord,
    budget: LossBudget,
    excess: ExcessLoss,
    photon: Option<PhotonRecord>,
}

fn analyse_one(cfg: &Config, trace: &S21Trace, t: f64) -> Result<Analysed> {
    let fit = fit_notch_with(trace, &cfg.fit_options())?;
    if fit.nonphysical {
        return Err(PipelineError::Core(resoloss_core::Error::Fit {
            what: "fit_notch",
            detail: format!("nonphysical result: Qi = {:e}, φ = {}", fit.qi, fit.params.phi_rad),
        }));
    }
    let material = cfg.material_params()?;
    let omega = angular(fit.params.fr_hz);
    let sigma = complex_conductivity(&material, t, omega, cfg.run.sigma2_mode)?;
    let zs = surface_impedance(&sigma)?;
    let lg = geometric_inductance(&cfg.geometry()?)?;
    let g = cfg.geometry_factor()?;
    let delta_qp = qp_loss_theory(&zs, lg, g)?;
    let qt = q_tls(t, cfg.run.photon_number, &cfg.tls_params(omega)?)?;
    let budget = LossBudget::assemble(t, qt, delta_qp, fit.qi, &material, omega, cfg.run.gap_model)?;
    let excess = excess_qp_loss(&budget, material.tc_kelvin);
    let conductivity = ConductivityRecord {
        sigma1_norm: sigma.sigma1_norm,
        sigma2_norm: sigma.sigma2_norm,
        sigma1_s_per_m: sigma.sigma1(),
        sigma2_s_per_m: sigma.sigma2(),
        rs_ohm: zs.rs_ohm,
        ls_henry: zs.ls_henry,
        kinetic_fraction: kinetic_fraction(&zs, lg, g),
    };
    let photon = trace.meta.power_dbm.and_then(|p| photon_record(p, &fit));
    Ok(Analysed { fit, conductivity, budget, excess, photon })
}

fn photon_record(p_in_dbm: f64, fit: &NotchFitResult) -> Option<PhotonRecord> {
    let f = fit.params.fr_hz;
    let n = |qi: f64, ql: f64, qc: f64| power_budget(p_in_dbm, 0.0, qi, ql, qc, f).map(|b| b.n_ph);
    let (qi, ql, qc) = (fit.qi, fit.params.ql, fit.params.qc_mag);
    let base = match n(qi, ql, qc) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("photon number unavailable at fr = {f} Hz: {e}");
            return None;
        }
    };
    let partial = |dq: f64, which: usize| -> f64 {
        let h = 1e-6 * [qi, ql, qc][which];
        let v = match which {
            0 => n(qi + h, ql, qc),
            1 => n(qi, ql + h, qc),
            _ => n(qi, ql, qc + h),
        };
        v.map(|v| (v - base) / h * dq).unwrap_or(0.0)
    };
    let var = partial(fit.stderr.qi, 0).powi(2) + partial(fit.stderr.ql, 1).powi(2) + partial(fit.stderr.qc_mag, 2).powi(2);
    Some(PhotonRecord { p_in_dbm, n_ph: base, n_ph_stderr: var.sqrt() })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Analyses a sweep. Per-trace failures become failed entries; the call only
/// errors when the sweep is malformed or no trace can be analysed.
pub fn sweep_analyze(cfg: &Config, inputs: Vec<SweepInput>) -> Result<AnalysisReport> {
    if inputs.len() < 2 {
        return Err(PipelineError::Input(format!("a sweep needs at least 2 traces, got {}", inputs.len())));
    }
    let mut inputs = inputs;
    for inp in &inputs {
        if inp.trace.meta.temperature_k.is_none() {
            return Err(PipelineError::Input(format!("{}: trace has no temperature", inp.name)));
        }
    }
    inputs.sort_by(|a, b| {
        let ta = a.trace.meta.temperature_k.unwrap_or(f64::NAN);
        let tb = b.trace.meta.temperature_k.unwrap_or(f64::NAN);
        ta.total_cmp(&tb).then_with(|| a.name.cmp(&b.name))
    });
    if let Some(w) = inputs.windows(2).find(|w| w[0].trace.meta.temperature_k == w[1].trace.meta.temperature_k) {
        return Err(PipelineError::Input(format!(
            "{} and {} share temperature {} K",
            w[0].name,
            w[1].name,
            w[0].trace.meta.temperature_k.unwrap_or(f64::NAN)
        )));
    }
    let powers: Vec<f64> = inputs.iter().filter_map(|i| i.trace.meta.power_dbm).collect();
    if let (Some(lo), Some(hi)) = (powers.iter().copied().reduce(f64::min), powers.iter().copied().reduce(f64::max)) {
        if hi - lo > POWER_TOLERANCE_DB {
            return Err(PipelineError::Input(format!("drive power varies by {:.2} dB across the sweep", hi - lo)));
        }
    }

    let results: Vec<Result<Analysed>> =
        inputs.par_iter().map(|inp| analyse_one(cfg, &inp.trace, inp.trace.meta.temperature_k.unwrap_or(f64::NAN))).collect();

    let mut entries: Vec<TemperatureEntry> = inputs
        .iter()
        .zip(&results)
        .map(|(inp, res)| {
            let mut e = TemperatureEntry {
                source: inp.name.clone(),
                temperature_k: inp.trace.meta.temperature_k.unwrap_or(f64::NAN),
                power_dbm: inp.trace.meta.power_dbm,
                status: EntryStatus::Failed,
                error: None,
                fit: None,
                delta_f_hz: None,
                delta_f_stderr_hz: None,
                conductivity: None,
                budget: None,
                excess: None,
                photon: None,
            };
            match res {
                Ok(a) => {
                    e.status = EntryStatus::Ok;
                    e.fit = Some(FitRecord::from(&a.fit));
                    e.conductivity = Some(a.conductivity);
                    e.budget = Some(a.budget);
                    e.excess = Some(a.excess);
                    e.photon = a.photon;
                }
                Err(err) => {
                    log::warn!("{}: {err}", inp.name);
                    e.error = Some(err.to_string());
                }
            }
            e
        })
        .collect();

    let ok: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].status == EntryStatus::Ok).collect();
    if ok.is_empty() {
        return Err(PipelineError::Core(resoloss_core::Error::Fit {
            what: "sweep_analyze",
            detail: format!("all {} traces failed", entries.len()),
        }));
    }

    // Frequency shift from the coldest good point.
    let series: Vec<(f64, f64)> = ok.iter().map(|&i| (entries[i].temperature_k, entries[i].fit.map_or(f64::NAN, |f| f.fr_hz))).collect();
    let t_ref = series[0].0;
    let ref_se = entries[ok[0]].fit.map_or(0.0, |f| f.fr_stderr_hz);
    let shifts = resonance_shift(&series, t_ref, cfg.run.t_ref_tolerance_k)?;
    for (&i, &(_, df)) in ok.iter().zip(&shifts) {
        let se = entries[i].fit.map_or(0.0, |f| f.fr_stderr_hz);
        entries[i].delta_f_hz = Some(df);
        entries[i].delta_f_stderr_hz = Some(if i == ok[0] { 0.0 } else { se.hypot(ref_se) });
    }

    let max_shift = shifts.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let onset = ok.iter().skip(1).map(|&i| &entries[i]).find_map(|e| {
        let df = e.delta_f_hz?;
        let thr = (cfg.run.onset_sigma * e.delta_f_stderr_hz?).max(cfg.run.onset_fraction * max_shift);
        (df < -thr).then_some(e.temperature_k)
    });

    let tc = cfg.material.tc_kelvin;
    let plateau_values: Vec<f64> = ok
        .iter()
        .map(|&i| &entries[i])
        .filter(|e| e.temperature_k < tc / 10.0)
        .filter_map(|e| e.budget.and_then(|b| b.nqp_measured_per_um3))
        .collect();
    let plateau_points = plateau_values.len();

    let qi_max = ok.iter().copied().max_by(|&a, &b| {
        let qa = entries[a].fit.map_or(f64::NEG_INFINITY, |f| f.qi);
        let qb = entries[b].fit.map_or(f64::NEG_INFINITY, |f| f.qi);
        qa.total_cmp(&qb)
    });
    let interior = qi_max.is_some_and(|m| m != ok[0] && m != ok[ok.len() - 1]);

    let derived = DerivedSummary {
        n_entries: entries.len(),
        n_failed: entries.len() - ok.len(),
        t_ref_k: Some(t_ref),
        onset_rule: format!(
            "first T with delta_f < -max({} * stderr(delta_f), {} * max|delta_f|)",
            cfg.run.onset_sigma, cfg.run.onset_fraction
        ),
        redshift_onset_k: onset,
        nqp_plateau_per_um3: median(plateau_values),
        nqp_plateau_points: plateau_points,
        qi_max_temperature_k: qi_max.map(|i| entries[i].temperature_k),
        qi_interior_maximum: interior,
        n_non_equilibrium: entries.iter().filter(|e| e.excess.is_some_and(|x| x.non_equilibrium)).count(),
        n_negative_loss: entries.iter().filter(|e| e.budget.is_some_and(|b| b.negative_loss)).count(),
    };

    let mut digests: Vec<(String, String)> = inputs.iter().map(|i| (i.name.clone(), i.sha256.clone())).collect();
    digests.sort();
    Ok(AnalysisReport {
        schema_version: REPORT_SCHEMA_VERSION,
        provenance: Provenance::new(cfg, digests),
        settings: cfg.clone(),
        per_temperature: entries,
        derived,
    })
}
