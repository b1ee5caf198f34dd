//! File formats, temperature-sweep orchestration and reporting on top of
//! [`resoloss_core`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dc;
pub mod error;
pub mod forward;
pub mod ingest;
pub mod report;
pub mod sweep;
pub mod xrd;

pub use config::Config;
pub use error::{PipelineError, Result};
pub use report::{emit_report, AnalysisReport};
pub use sweep::{sweep_analyze, SweepInput};

use std::path::Path;

/// Reads S21 files into sweep inputs, named by file name and digested.
pub fn load_sweep_inputs(paths: &[&Path]) -> Result<Vec<SweepInput>> {
    let mut out = Vec::new();
    for path in paths {
        let bytes = std::fs::read(path).map_err(|e| PipelineError::io(*path, e))?;
        let digest = config::hex_digest(&bytes);
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        for trace in ingest::ingest_s21(path, ingest::S21Format::from_path(path))? {
            out.push(SweepInput { name: name.clone(), sha256: digest.clone(), trace });
        }
    }
    Ok(out)
}
