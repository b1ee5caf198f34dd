//! `report.json` and the plot-ready CSV tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{PipelineError, Result};
use crate::sweep::{DerivedSummary, EntryStatus, TemperatureEntry};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const QI_HEADER: &str = "temperature_K,qi_measured,qi_stderr,qi_theory,q_tls,q_qp_theory";
pub const DF_HEADER: &str = "temperature_K,fr_hz,fr_stderr_hz,delta_f_hz,delta_f_stderr_hz";
pub const SIGMA_HEADER: &str = "temperature_K,sigma1_norm,sigma2_norm,sigma1_s_per_m,sigma2_s_per_m,rs_ohm,ls_henry";
pub const NQP_HEADER: &str =
    "temperature_K,delta_qp_measured,delta_qp_theory,nqp_measured_per_um3,nqp_theory_per_um3,excess_loss,non_equilibrium";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub file: String,
    pub header: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub inputs: Vec<InputDigest>,
    pub csv_schema_version: u32,
    pub csv_schemas: Vec<CsvSchema>,
    pub photon_uncertainty: String,
}

impl Provenance {
    pub fn new(cfg: &Config, digests: Vec<(String, String)>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: cfg.sha256(),
            inputs: digests.into_iter().map(|(name, sha256)| InputDigest { name, sha256 }).collect(),
            csv_schema_version: CSV_SCHEMA_VERSION,
            csv_schemas: [
                ("qi_vs_T.csv", QI_HEADER),
                ("df_vs_T.csv", DF_HEADER),
                ("sigma_vs_T.csv", SIGMA_HEADER),
                ("nqp_vs_T.csv", NQP_HEADER),
            ]
            .into_iter()
            .map(|(f, h)| CsvSchema { file: f.to_string(), header: h.to_string() })
            .collect(),
            photon_uncertainty: "linear propagation of fit standard errors (Qi, Ql, |Qc|), uncorrelated".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub settings: Config,
    pub per_temperature: Vec<TemperatureEntry>,
    pub derived: DerivedSummary,
}

impl AnalysisReport {
    /// Pretty JSON with a trailing newline. Field order follows the struct
    /// definitions and floats use the shortest round-trip representation, so
    /// identical reports serialise to identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| PipelineError::Input(format!("report serialisation: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PipelineError::Input(format!("report parse: {e}")))
    }
}

/// Shortest round-trip representation; scientific outside `[1e-3, 1e7)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-3..1e7).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

/// The four CSV tables as `(file name, contents)`; empty when no entry succeeded.
pub fn csv_tables(report: &AnalysisReport) -> Vec<(&'static str, String)> {
    let ok: Vec<&TemperatureEntry> = report.per_temperature.iter().filter(|e| e.status == EntryStatus::Ok).collect();
    if ok.is_empty() {
        return Vec::new();
    }
    let mut qi = format!("{QI_HEADER}\n");
    let mut df = format!("{DF_HEADER}\n");
    let mut sigma = format!("{SIGMA_HEADER}\n");
    let mut nqp = format!("{NQP_HEADER}\n");
    for e in ok {
        let t = num(e.temperature_k);
        if let (Some(f), Some(b)) = (e.fit, e.budget) {
            let _ = writeln!(qi, "{t},{},{},{},{},{}", num(f.qi), num(f.qi_stderr), num(b.qi_theory), num(b.q_tls), num(b.q_qp_theory));
        }
        if let Some(f) = e.fit {
            let _ = writeln!(df, "{t},{},{},{},{}", num(f.fr_hz), num(f.fr_stderr_hz), opt(e.delta_f_hz), opt(e.delta_f_stderr_hz));
        }
        if let Some(c) = e.conductivity {
            let _ = writeln!(
                sigma,
                "{t},{},{},{},{},{},{}",
                num(c.sigma1_norm),
                num(c.sigma2_norm),
                num(c.sigma1_s_per_m),
                num(c.sigma2_s_per_m),
                num(c.rs_ohm),
                num(c.ls_henry)
            );
        }
        if let (Some(b), Some(x)) = (e.budget, e.excess) {
            let _ = writeln!(
                nqp,
                "{t},{},{},{},{},{},{}",
                num(b.delta_qp_measured),
                num(b.delta_qp_theory),
                opt(b.nqp_measured_per_um3),
                num(b.nqp_theory_per_um3),
                num(x.value),
                x.non_equilibrium
            );
        }
    }
    vec![("qi_vs_T.csv", qi), ("df_vs_T.csv", df), ("sigma_vs_T.csv", sigma), ("nqp_vs_T.csv", nqp)]
}

/// Writes `report.json` and the CSV tables into `out_dir`, creating it if needed.
/// Returns the paths written.
pub fn emit_report(report: &AnalysisReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;
    let mut written = Vec::new();
    let path = out_dir.join("report.json");
    std::fs::write(&path, report.to_json()?).map_err(|e| PipelineError::io(&path, e))?;
    written.push(path);
    for (name, body) in csv_tables(report) {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(|e| PipelineError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
