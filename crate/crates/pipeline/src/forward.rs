//! Forward chain from material and geometry to synthetic S21 sweeps:
//! conductivity → surface impedance → (fr(T), δ_qp) → TLS → Qi → trace.

use resoloss_core::consts::angular;
use resoloss_core::impedance::{geometric_inductance, kinetic_fraction, line_inductance, qp_loss_theory, surface_impedance};
use resoloss_core::lossmodel::{q_tls, qi_theory, TlsParams};
use resoloss_core::mbcore::complex_conductivity;
use resoloss_core::resfit::{linewidth_grid, synth_trace, NotchParams, S21Trace, TraceMeta};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{PipelineError, Result};

/// Ground truth at one temperature of a synthetic sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectedPoint {
    pub temperature_k: f64,
    pub fr_hz: f64,
    pub qi: f64,
    pub q_tls: f64,
    pub delta_qp: f64,
    pub excess_loss: f64,
    pub params: NotchParams,
}

/// Temperatures of the configured synthetic sweep, evenly spaced.
pub fn sweep_temperatures(cfg: &Config) -> Vec<f64> {
    let s = &cfg.run.synth;
    let n = s.n_temperatures.max(1);
    if n == 1 {
        return vec![s.t_min_k];
    }
    (0..n).map(|i| s.t_min_k + (s.t_max_k - s.t_min_k) * i as f64 / (n - 1) as f64).collect()
}

struct Chain {
    lg: f64,
    g: f64,
    omega_ref: f64,
    l_ref: f64,
}

impl Chain {
    fn new(cfg: &Config) -> Result<Self> {
        let s = &cfg.run.synth;
        let lg = geometric_inductance(&cfg.geometry()?)?;
        let g = cfg.geometry_factor()?;
        let omega_ref = angular(s.fr_hz);
        let mut c = Self { lg, g, omega_ref, l_ref: 0.0 };
        c.l_ref = c.line_inductance(cfg, s.t_min_k)?;
        Ok(c)
    }

    fn line_inductance(&self, cfg: &Config, t: f64) -> Result<f64> {
        let sigma = complex_conductivity(&cfg.material_params()?, t, self.omega_ref, cfg.run.sigma2_mode)?;
        Ok(line_inductance(&surface_impedance(&sigma)?, self.lg, self.g))
    }

    /// `(fr(T), δ_qp(T))`, with `fr` pinned to the configured value at `t_min_k`.
    fn point(&self, cfg: &Config, t: f64) -> Result<(f64, f64)> {
        let fr = cfg.run.synth.fr_hz * (self.l_ref / self.line_inductance(cfg, t)?).sqrt();
        let omega = angular(fr);
        let sigma = complex_conductivity(&cfg.material_params()?, t, omega, cfg.run.sigma2_mode)?;
        let delta = qp_loss_theory(&surface_impedance(&sigma)?, self.lg, self.g)?;
        Ok((fr, delta))
    }
}

/// Ground truth for every temperature of the configured sweep.
pub fn forward_sweep(cfg: &Config) -> Result<Vec<InjectedPoint>> {
    let s = &cfg.run.synth;
    let chain = Chain::new(cfg)?;
    sweep_temperatures(cfg)
        .into_iter()
        .map(|t| {
            let (fr, delta_qp) = chain.point(cfg, t)?;
            let tls = cfg.tls_params(angular(fr))?;
            let qt = q_tls(t, cfg.run.photon_number, &tls)?;
            let qi = qi_theory(qt, delta_qp + s.excess_loss)?;
            let params = NotchParams::from_qi(fr, qi, s.qc_mag, s.phi_rad, s.amp, s.phase0_rad, s.tau_s);
            params.validate()?;
            Ok(InjectedPoint { temperature_k: t, fr_hz: fr, qi, q_tls: qt, delta_qp, excess_loss: s.excess_loss, params })
        })
        .collect()
}

/// Per-temperature seed derived from the run seed.
pub fn trace_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

/// Noisy traces for the configured sweep, deterministic in `seed`.
pub fn synth_sweep(cfg: &Config, seed: u64) -> Result<Vec<(InjectedPoint, S21Trace)>> {
    let s = &cfg.run.synth;
    forward_sweep(cfg)?
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let grid = linewidth_grid(&p.params, s.span_linewidths, s.points);
            let meta = TraceMeta { temperature_k: Some(p.temperature_k), power_dbm: Some(s.power_dbm) };
            let trace = synth_trace(&p.params, &grid, s.noise_sigma, trace_seed(seed, i), meta)?;
            Ok((p, trace))
        })
        .collect()
}

/// Result of [`calibrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub f_delta0: f64,
    pub geometry_factor: f64,
    /// Kinetic-inductance fraction at the low anchor temperature.
    pub alpha: f64,
}

/// Chooses the TLS strength and the geometry factor so the forward chain
/// passes through `Qi(low.0) = low.1` and `Qi(high.0) = high.1`.
///
/// A larger `g` raises the kinetic fraction and hence the quasiparticle loss,
/// so the high anchor is bracketed by bisection in `ln g`. Returns an error if
/// no `g` reaches it, which happens when the conductivity model caps the loss
/// below what the anchor requires.
pub fn calibrate(cfg: &Config, low: (f64, f64), high: (f64, f64)) -> Result<Calibration> {
    let s = &cfg.run.synth;
    let eval = |g: f64| -> Result<(f64, f64, f64)> {
        let mut c = cfg.clone();
        c.run.geometry_factor = Some(g);
        let chain = Chain::new(&c)?;
        let (fr_lo, d_lo) = chain.point(&c, low.0)?;
        let tls = TlsParams::calibrate(low.1, low.0, c.run.photon_number, d_lo + s.excess_loss, c.tls.n_c, c.tls.beta_exp, angular(fr_lo))?;
        let (fr_hi, d_hi) = chain.point(&c, high.0)?;
        let tls_hi = TlsParams { omega_rad: angular(fr_hi), ..tls };
        let qi_hi = qi_theory(q_tls(high.0, c.run.photon_number, &tls_hi)?, d_hi + s.excess_loss)?;
        Ok((qi_hi, tls.f_delta0, fr_lo))
    };
    let (mut lo, mut hi) = (1e3f64.ln(), 1e10f64.ln());
    let q_lo = eval(lo.exp())?.0;
    let q_hi = eval(hi.exp())?.0;
    if !(q_lo > high.1 && q_hi < high.1) {
        return Err(PipelineError::Input(format!(
            "cannot reach Qi = {} at {} K: geometry factors in [1e3, 1e10] /m give Qi in [{q_hi:.4e}, {q_lo:.4e}]",
            high.1, high.0
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid.exp())?.0 > high.1 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let g = (0.5 * (lo + hi)).exp();
    let (_, f_delta0, _) = eval(g)?;
    let mut c = cfg.clone();
    c.run.geometry_factor = Some(g);
    let sigma = complex_conductivity(&c.material_params()?, low.0, angular(s.fr_hz), c.run.sigma2_mode)?;
    let alpha = kinetic_fraction(&surface_impedance(&sigma)?, geometric_inductance(&c.geometry()?)?, g);
    Ok(Calibration { f_delta0, geometry_factor: g, alpha })
}

impl Calibration {
    /// Writes the calibrated values into `cfg`.
    pub fn apply(&self, cfg: &mut Config) {
        cfg.tls.f_delta0 = self.f_delta0;
        cfg.run.geometry_factor = Some(self.geometry_factor);
        cfg.material.alpha = self.alpha;
    }
}
