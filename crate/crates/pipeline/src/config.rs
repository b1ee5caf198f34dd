//! Analysis configuration: one JSON document with sections
//! `material`, `geometry`, `tls`, `fit` and `run`. Unknown keys are rejected.

use std::path::Path;

use resoloss_core::impedance::CpwGeometry;
use resoloss_core::lossmodel::TlsParams;
use resoloss_core::mbcore::{GapModel, MaterialParams, Sigma2Mode};
use resoloss_core::resfit::NotchFitOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    pub tls: TlsConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub tc_kelvin: f64,
    /// Defaults to the BCS value `1.76 kB Tc`.
    #[serde(default)]
    pub delta0_ev: Option<f64>,
    pub sheet_resistance_ohm: f64,
    pub thickness_m: f64,
    /// states/(m³·eV)
    pub n0_states: f64,
    /// Kinetic-inductance fraction. Required: there is no safe default.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub center_width_m: f64,
    pub gap_m: f64,
    pub thickness_m: f64,
    pub substrate_eps_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TlsConfig {
    pub f_delta0: f64,
    pub n_c: f64,
    pub beta_exp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub max_iterations: usize,
    pub cost_tolerance: f64,
    pub min_dip_snr: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        let o = NotchFitOptions::default();
        Self { max_iterations: o.max_iterations, cost_tolerance: o.cost_tolerance, min_dip_snr: o.min_dip_snr }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub sigma2_mode: Sigma2Mode,
    pub gap_model: GapModel,
    /// Conductor geometry factor `g` (1/m). `None` uses `1/w`.
    pub geometry_factor: Option<f64>,
    pub photon_number: f64,
    /// Red-shift onset: first `T` where `Δf < −max(onset_sigma·σ_Δf, onset_fraction·max|Δf|)`.
    pub onset_sigma: f64,
    pub onset_fraction: f64,
    pub t_ref_tolerance_k: f64,
    pub xrd_wavelength_angstrom: f64,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma2_mode: Sigma2Mode::default(),
            gap_model: GapModel::default(),
            geometry_factor: None,
            photon_number: 1.0,
            onset_sigma: 3.0,
            onset_fraction: 0.01,
            t_ref_tolerance_k: resoloss_core::resfit::DEFAULT_T_REF_TOLERANCE_K,
            xrd_wavelength_angstrom: crate::xrd::CU_K_ALPHA1_ANGSTROM,
            synth: SynthConfig::default(),
        }
    }
}

/// Synthetic sweep generated by the forward model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub t_min_k: f64,
    pub t_max_k: f64,
    pub n_temperatures: usize,
    /// Resonance frequency at `t_min_k`.
    pub fr_hz: f64,
    pub qc_mag: f64,
    pub phi_rad: f64,
    pub amp: f64,
    pub phase0_rad: f64,
    pub tau_s: f64,
    pub noise_sigma: f64,
    pub points: usize,
    pub span_linewidths: f64,
    pub power_dbm: f64,
    /// Temperature-independent extra loss tangent added to every point.
    pub excess_loss: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            t_min_k: 0.12,
            t_max_k: 2.9,
            n_temperatures: 30,
            fr_hz: 5.95e9,
            qc_mag: 5e4,
            phi_rad: 0.05,
            amp: 1.0,
            phase0_rad: 0.3,
            tau_s: 40e-9,
            noise_sigma: 1e-3,
            points: 2001,
            span_linewidths: 10.0,
            power_dbm: -135.0,
            excess_loss: 0.0,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            PipelineError::Config(m) => PipelineError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |e: resoloss_core::Error| PipelineError::Config(e.to_string());
        self.material_params().map_err(bad)?;
        self.geometry().map_err(bad)?;
        TlsParams::new(self.tls.f_delta0, self.tls.n_c, self.tls.beta_exp, 1.0).map_err(bad)?;
        if let Some(g) = self.run.geometry_factor {
            if !(g > 0.0) {
                return Err(PipelineError::Config(format!("geometry_factor must be positive, got {g}")));
            }
        }
        if !(self.run.onset_sigma >= 0.0) || !(0.0..1.0).contains(&self.run.onset_fraction) {
            return Err(PipelineError::Config("onset_sigma must be ≥ 0 and onset_fraction in [0, 1)".into()));
        }
        if !(self.run.photon_number >= 0.0) || !(self.run.xrd_wavelength_angstrom > 0.0) {
            return Err(PipelineError::Config("photon_number and xrd_wavelength_angstrom must be non-negative".into()));
        }
        Ok(())
    }

    pub fn material_params(&self) -> resoloss_core::Result<MaterialParams> {
        let m = &self.material;
        MaterialParams::new(m.tc_kelvin, m.delta0_ev, m.sheet_resistance_ohm, m.thickness_m, m.n0_states, m.alpha)
    }

    pub fn geometry(&self) -> resoloss_core::Result<CpwGeometry> {
        let g = &self.geometry;
        CpwGeometry::new(g.center_width_m, g.gap_m, g.thickness_m, g.substrate_eps_r)
    }

    pub fn geometry_factor(&self) -> resoloss_core::Result<f64> {
        Ok(match self.run.geometry_factor {
            Some(g) => g,
            None => self.geometry()?.default_geometry_factor(),
        })
    }

    pub fn tls_params(&self, omega: f64) -> resoloss_core::Result<TlsParams> {
        TlsParams::new(self.tls.f_delta0, self.tls.n_c, self.tls.beta_exp, omega)
    }

    pub fn fit_options(&self) -> NotchFitOptions {
        NotchFitOptions {
            max_iterations: self.fit.max_iterations,
            cost_tolerance: self.fit.cost_tolerance,
            min_dip_snr: self.fit.min_dip_snr,
        }
    }

    /// SHA-256 of the canonical (re-serialised) configuration.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        hex_digest(&bytes)
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
