//! Readers for S21 traces (CSV, Touchstone v1 `.s2p`) and R(T) series.

use std::path::Path;

use resoloss_core::resfit::{S21Trace, TraceMeta};
use resoloss_core::Complex64;

use crate::error::{PipelineError, Result};
use crate::report::num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S21Format {
    Csv,
    Touchstone,
}

impl S21Format {
    /// `.s2p` is Touchstone, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("s2p") => Self::Touchstone,
            _ => Self::Csv,
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))
}

/// Reads one file. Both supported formats carry a single trace, but the list
/// return keeps the interface open for multi-trace containers.
pub fn ingest_s21(path: &Path, format: S21Format) -> Result<Vec<S21Trace>> {
    let text = read_text(path)?;
    let name = path.display().to_string();
    let trace = match format {
        S21Format::Csv => parse_s21_csv(&text, &name)?,
        S21Format::Touchstone => parse_touchstone(&text, &name)?,
    };
    Ok(vec![trace])
}

/// `# key=value` header comments.
fn comment_meta(text: &str, marker: char, origin: &str) -> Result<TraceMeta> {
    let mut meta = TraceMeta::default();
    for (i, line) in text.lines().enumerate() {
        let Some(rest) = line.trim_start().strip_prefix(marker) else { continue };
        let Some((key, value)) = rest.split_once('=') else { continue };
        let slot = match key.trim() {
            "temperature_K" => &mut meta.temperature_k,
            "power_dbm" => &mut meta.power_dbm,
            _ => continue,
        };
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| PipelineError::parse(origin, i as u64 + 1, format!("bad value for {}: {value:?}", key.trim())))?;
        *slot = Some(v);
    }
    Ok(meta)
}

#[derive(Clone, Copy)]
enum CsvKind {
    ReIm,
    DbDeg,
}

pub fn parse_s21_csv(text: &str, origin: &str) -> Result<S21Trace> {
    let meta = comment_meta(text, '#', origin)?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let kind = match cols.as_slice() {
        ["freq_hz", "s21_re", "s21_im"] => CsvKind::ReIm,
        ["freq_hz", "s21_db", "s21_deg"] => CsvKind::DbDeg,
        [] | [""] => return Err(PipelineError::Input(format!("{origin}: empty file"))),
        _ => {
            return Err(PipelineError::parse(
                origin,
                header.position().map_or(1, |p| p.line()),
                format!("unrecognised header {cols:?}; expected freq_hz,s21_re,s21_im or freq_hz,s21_db,s21_deg"),
            ))
        }
    };
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut vals = [0.0f64; 3];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = rec.get(k).ok_or_else(|| PipelineError::parse(origin, line, "missing column"))?;
            *v = field.parse().map_err(|_| PipelineError::parse(origin, line, format!("not a number: {field:?}")))?;
            if !v.is_finite() {
                return Err(PipelineError::parse(origin, line, "non-finite value"));
            }
        }
        let z = match kind {
            CsvKind::ReIm => Complex64::new(vals[1], vals[2]),
            CsvKind::DbDeg => Complex64::from_polar(10f64.powf(vals[1] / 20.0), vals[2].to_radians()),
        };
        points.push((vals[0], z, line));
    }
    build_trace(points, meta, origin)
}

fn csv_error(origin: &str, e: csv::Error) -> PipelineError {
    let line = e.position().map_or(0, |p| p.line());
    PipelineError::parse(origin, line, e.to_string())
}

/// Sorts by frequency (with a warning when needed) and rejects duplicates.
fn build_trace(mut points: Vec<(f64, Complex64, u64)>, meta: TraceMeta, origin: &str) -> Result<S21Trace> {
    if points.is_empty() {
        return Err(PipelineError::Input(format!("{origin}: no data rows")));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        log::warn!("{origin}: frequency column not ascending; sorted");
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[1].0 == w[0].0) {
            return Err(PipelineError::parse(origin, w[1].2, format!("duplicate frequency {} Hz", w[1].0)));
        }
    }
    let (freq, s21): (Vec<f64>, Vec<Complex64>) = points.into_iter().map(|(f, z, _)| (f, z)).unzip();
    S21Trace::new(freq, s21, meta).map_err(|e| PipelineError::Input(format!("{origin}: {e}")))
}

/// Touchstone v1 two-port file; returns the S21 column. RI, DB and MA data
/// formats and HZ/KHZ/MHZ/GHZ units are accepted. Metadata may be given as
/// `! temperature_K=...` / `! power_dbm=...` comments.
pub fn parse_touchstone(text: &str, origin: &str) -> Result<S21Trace> {
    let meta = comment_meta(text, '!', origin)?;
    let mut unit = 1e9;
    let mut fmt = "MA".to_string();
    let mut seen_option = false;
    let mut pending: Vec<f64> = Vec::new();
    let mut pending_line = 0;
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_option {
                continue;
            }
            seen_option = true;
            for tok in opts.split_whitespace().map(str::to_ascii_uppercase) {
                match tok.as_str() {
                    "HZ" => unit = 1.0,
                    "KHZ" => unit = 1e3,
                    "MHZ" => unit = 1e6,
                    "GHZ" => unit = 1e9,
                    "RI" | "DB" | "MA" => fmt = tok,
                    "S" | "R" => {}
                    "Y" | "Z" | "H" | "G" => {
                        return Err(PipelineError::parse(origin, line_no, format!("only S-parameter files are supported, got {tok}")))
                    }
                    _ => {}
                }
            }
            continue;
        }
        if pending.is_empty() {
            pending_line = line_no;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| PipelineError::parse(origin, line_no, format!("not a number: {tok:?}")))?;
            pending.push(v);
        }
        if pending.len() >= 9 {
            if pending.len() > 9 {
                return Err(PipelineError::parse(
                    origin,
                    pending_line,
                    format!("expected 9 values per two-port row, got {}", pending.len()),
                ));
            }
            let (a, b) = (pending[3], pending[4]);
            let z = match fmt.as_str() {
                "RI" => Complex64::new(a, b),
                "DB" => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
                _ => Complex64::from_polar(a, b.to_radians()),
            };
            if !z.is_finite() || !pending[0].is_finite() {
                return Err(PipelineError::parse(origin, pending_line, "non-finite value"));
            }
            points.push((pending[0] * unit, z, pending_line));
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(PipelineError::parse(origin, pending_line, "truncated data row"));
    }
    if points.is_empty() {
        return Err(PipelineError::Input(format!("{origin}: empty file")));
    }
    build_trace(points, meta, origin)
}

/// Writes a trace as `freq_hz,s21_re,s21_im` CSV with metadata comments.
pub fn write_s21_csv(path: &Path, trace: &S21Trace) -> Result<()> {
    std::fs::write(path, s21_csv_string(trace)).map_err(|e| PipelineError::io(path, e))
}

pub fn s21_csv_string(trace: &S21Trace) -> String {
    let mut out = String::new();
    if let Some(t) = trace.meta.temperature_k {
        out.push_str(&format!("# temperature_K={t}\n"));
    }
    if let Some(p) = trace.meta.power_dbm {
        out.push_str(&format!("# power_dbm={p}\n"));
    }
    out.push_str("freq_hz,s21_re,s21_im\n");
    for (f, z) in trace.freq_hz.iter().zip(&trace.s21) {
        out.push_str(&format!("{},{},{}\n", num(*f), num(z.re), num(z.im)));
    }
    out
}

/// Reads a `temperature_K,resistance_ohm` CSV. Duplicate temperatures are
/// averaged, negative resistances rejected, output sorted by temperature.
pub fn ingest_rt(path: &Path) -> Result<Vec<(f64, f64)>> {
    parse_rt_csv(&read_text(path)?, &path.display().to_string())
}

pub fn parse_rt_csv(text: &str, origin: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    match cols.as_slice() {
        ["temperature_K", "resistance_ohm"] => {}
        [] | [""] => return Err(PipelineError::Input(format!("{origin}: empty file"))),
        _ => {
            return Err(PipelineError::parse(
                origin,
                header.position().map_or(1, |p| p.line()),
                format!("unrecognised header {cols:?}; expected temperature_K,resistance_ohm"),
            ))
        }
    }
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |k: usize| -> Result<f64> {
            let field = rec.get(k).ok_or_else(|| PipelineError::parse(origin, line, "missing column"))?;
            let v: f64 = field.parse().map_err(|_| PipelineError::parse(origin, line, format!("not a number: {field:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(PipelineError::parse(origin, line, "non-finite value"))
            }
        };
        let (t, r) = (num(0)?, num(1)?);
        if t < 0.0 {
            return Err(PipelineError::parse(origin, line, format!("negative temperature {t}")));
        }
        if r < 0.0 {
            return Err(PipelineError::parse(origin, line, format!("negative resistance {r}")));
        }
        rows.push((t, r));
    }
    if rows.is_empty() {
        return Err(PipelineError::Input(format!("{origin}: no data rows")));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    let mut i = 0;
    while i < rows.len() {
        let mut j = i + 1;
        while j < rows.len() && rows[j].0 == rows[i].0 {
            j += 1;
        }
        if j - i > 1 {
            log::warn!("{origin}: {} readings at T = {} K averaged", j - i, rows[i].0);
        }
        let mean = rows[i..j].iter().map(|r| r.1).sum::<f64>() / (j - i) as f64;
        out.push((rows[i].0, mean));
        i = j;
    }
    Ok(out)
}
