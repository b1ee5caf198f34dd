use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use resoloss::config::Config;
use resoloss::error::{PipelineError, Result};
use resoloss::report::{num, opt};
use resoloss::{dc, emit_report, forward, ingest, load_sweep_inputs, sweep_analyze, xrd};
use resoloss_core::consts::angular;
use resoloss_core::impedance::{geometric_inductance, kinetic_fraction, qp_loss_theory, surface_impedance};
use resoloss_core::mbcore::complex_conductivity;
use resoloss_core::oracle::mb_full_oracle;
use resoloss_core::photon::{power_budget, power_for_photons};
use resoloss_core::resfit::fit_notch_with;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "resoloss", version, about = "Quasiparticle and TLS loss analysis for superconducting CPW resonators")]
struct Cli {
    /// Analysis configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for commands that write files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for synthetic data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Conductivity, surface impedance and quasiparticle loss versus temperature.
    Mb {
        #[arg(long, default_value_t = 0.1)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = 5.95e9)]
        freq_hz: f64,
        /// Also evaluate the full Mattis-Bardeen integrals.
        #[arg(long)]
        oracle: bool,
    },
    /// Fit one S21 trace (CSV or .s2p).
    Fit { input: PathBuf },
    /// Analyse a temperature sweep; inputs are files or directories.
    Sweep {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Power budget and photon number, or the power for a target photon number.
    Photon {
        #[arg(long, allow_hyphen_values = true, default_value_t = -25.0)]
        p_vna: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -110.0)]
        p_att: f64,
        #[arg(long)]
        qi: f64,
        #[arg(long)]
        qc: f64,
        /// Defaults to `1/(1/Qi + 1/|Qc|)`.
        #[arg(long)]
        ql: Option<f64>,
        #[arg(long, default_value_t = 5.95e9)]
        freq_hz: f64,
        /// Report the input power giving this photon number instead.
        #[arg(long)]
        target_photons: Option<f64>,
    },
    /// Generate a synthetic temperature sweep from the forward model.
    Synth {
        /// Calibrate TLS strength and geometry factor to two anchors, `T_low:Qi_low,T_high:Qi_high`.
        #[arg(long)]
        calibrate: Option<String>,
    },
    /// Tc, normal-state sheet resistance and RRR from an R(T) CSV.
    Dc { input: PathBuf },
    /// Cubic lattice constant from a Bragg peak.
    Xrd {
        #[arg(long)]
        two_theta: f64,
        /// Miller indices, e.g. `1,1,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        hkl: Vec<i32>,
        /// Defaults to the configured wavelength, else Cu Kα1.
        #[arg(long)]
        wavelength: Option<f64>,
    },
}

fn require_config(cli: &Cli) -> Result<Config> {
    match &cli.config {
        Some(p) => Config::load(p),
        None => Err(PipelineError::Config("this command needs --config".into())),
    }
}

fn emit<T: Serialize>(format: Format, value: &T, csv_header: &str, csv_rows: &[String]) -> Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(value).map_err(|e| PipelineError::Input(e.to_string()))? + "\n",
        Format::Csv => {
            let mut s = format!("{csv_header}\n");
            for r in csv_rows {
                s.push_str(r);
                s.push('\n');
            }
            s
        }
    };
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(PipelineError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct MbRow {
    temperature_k: f64,
    sigma1_norm: f64,
    sigma2_norm: f64,
    sigma1_oracle: Option<f64>,
    sigma2_oracle: Option<f64>,
    rs_ohm: f64,
    ls_henry: f64,
    kinetic_fraction: f64,
    delta_qp: f64,
}

fn cmd_mb(cli: &Cli, t_min: f64, t_max: f64, points: usize, freq_hz: f64, oracle: bool) -> Result<()> {
    let cfg = require_config(cli)?;
    let material = cfg.material_params()?;
    let lg = geometric_inductance(&cfg.geometry()?)?;
    let g = cfg.geometry_factor()?;
    let w = angular(freq_hz);
    let n = points.max(1);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { t_min } else { t_min + (t_max - t_min) * i as f64 / (n - 1) as f64 };
        let sigma = complex_conductivity(&material, t, w, cfg.run.sigma2_mode)?;
        let zs = surface_impedance(&sigma)?;
        let (o1, o2) = if oracle {
            let (a, b) = mb_full_oracle(t, w, material.delta0_ev)?;
            (Some(a), Some(b))
        } else {
            (None, None)
        };
        rows.push(MbRow {
            temperature_k: t,
            sigma1_norm: sigma.sigma1_norm,
            sigma2_norm: sigma.sigma2_norm,
            sigma1_oracle: o1,
            sigma2_oracle: o2,
            rs_ohm: zs.rs_ohm,
            ls_henry: zs.ls_henry,
            kinetic_fraction: kinetic_fraction(&zs, lg, g),
            delta_qp: qp_loss_theory(&zs, lg, g)?,
        });
    }
    let csv: Vec<String> = rows
        .iter()
        .map(|r| {
            [
                num(r.temperature_k),
                num(r.sigma1_norm),
                num(r.sigma2_norm),
                opt(r.sigma1_oracle),
                opt(r.sigma2_oracle),
                num(r.rs_ohm),
                num(r.ls_henry),
                num(r.kinetic_fraction),
                num(r.delta_qp),
            ]
            .join(",")
        })
        .collect();
    emit(
        cli.format,
        &rows,
        "temperature_K,sigma1_norm,sigma2_norm,sigma1_oracle,sigma2_oracle,rs_ohm,ls_henry,kinetic_fraction,delta_qp",
        &csv,
    )
}

fn cmd_fit(cli: &Cli, input: &Path) -> Result<()> {
    let opts = match &cli.config {
        Some(p) => Config::load(p)?.fit_options(),
        None => Default::default(),
    };
    let traces = ingest::ingest_s21(input, ingest::S21Format::from_path(input))?;
    let mut results = Vec::new();
    let mut csv = Vec::new();
    for t in &traces {
        let r = fit_notch_with(t, &opts)?;
        let rec = resoloss::sweep::FitRecord::from(&r);
        csv.push(format!(
            "{},{}",
            row(&[rec.fr_hz, rec.fr_stderr_hz, rec.ql, rec.qc_mag, rec.phi_rad, rec.tau_s, rec.qi, rec.qi_stderr, rec.rms_residual]),
            rec.nonphysical
        ));
        results.push(rec);
    }
    let value = if results.len() == 1 { serde_json::to_value(results[0]) } else { serde_json::to_value(results) }
        .map_err(|e| PipelineError::Input(e.to_string()))?;
    emit(cli.format, &value, "fr_hz,fr_stderr_hz,ql,qc_mag,phi_rad,tau_s,qi,qi_stderr,rms_residual,nonphysical", &csv)
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| PipelineError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.extension().and_then(|x| x.to_str()).is_some_and(|x| x.eq_ignore_ascii_case("csv") || x.eq_ignore_ascii_case("s2p"))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_sweep(cli: &Cli, inputs: &[PathBuf]) -> Result<()> {
    let cfg = require_config(cli)?;
    let files = collect_inputs(inputs)?;
    let refs: Vec<&Path> = files.iter().map(PathBuf::as_path).collect();
    let report = sweep_analyze(&cfg, load_sweep_inputs(&refs)?)?;
    let written = emit_report(&report, &cli.out)?;
    for p in &written {
        log::info!("wrote {}", p.display());
    }
    let d = &report.derived;
    let o = opt;
    emit(
        cli.format,
        d,
        "n_entries,n_failed,t_ref_k,redshift_onset_k,nqp_plateau_per_um3,qi_max_temperature_k",
        &[format!(
            "{},{},{},{},{},{}",
            d.n_entries,
            d.n_failed,
            o(d.t_ref_k),
            o(d.redshift_onset_k),
            o(d.nqp_plateau_per_um3),
            o(d.qi_max_temperature_k)
        )],
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_photon(cli: &Cli, p_vna: f64, p_att: f64, qi: f64, qc: f64, ql: Option<f64>, f: f64, target: Option<f64>) -> Result<()> {
    let ql = ql.unwrap_or(1.0 / (1.0 / qi + 1.0 / qc));
    if let Some(n) = target {
        let p_in = power_for_photons(n, qi, ql, qc, f)?;
        #[derive(Serialize)]
        struct Out {
            n_target: f64,
            p_in_dbm: f64,
            p_vna_dbm: f64,
        }
        let out = Out { n_target: n, p_in_dbm: p_in, p_vna_dbm: p_in - p_att };
        return emit(cli.format, &out, "n_target,p_in_dbm,p_vna_dbm", &[row(&[n, p_in, p_in - p_att])]);
    }
    let b = power_budget(p_vna, p_att, qi, ql, qc, f)?;
    emit(
        cli.format,
        &b,
        "p_vna_dbm,p_att_db,p_in_dbm,p_loss_w,s21_mag,s11_mag,n_ph",
        &[row(&[b.p_vna_dbm, b.p_att_db, b.p_in_dbm, b.p_loss_w, b.s21_mag, b.s11_mag, b.n_ph])],
    )
}

fn row(vals: &[f64]) -> String {
    vals.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",")
}

fn parse_anchor(s: &str) -> Result<(f64, f64)> {
    let (t, q) = s.split_once(':').ok_or_else(|| PipelineError::Input(format!("anchor {s:?} is not T:Qi")))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| PipelineError::Input(format!("anchor {s:?} is not T:Qi")));
    Ok((parse(t)?, parse(q)?))
}

fn cmd_synth(cli: &Cli, calibrate: Option<&str>) -> Result<()> {
    let mut cfg = require_config(cli)?;
    if let Some(anchors) = calibrate {
        let (lo, hi) =
            anchors.split_once(',').ok_or_else(|| PipelineError::Input("--calibrate expects T_low:Qi_low,T_high:Qi_high".into()))?;
        let cal = forward::calibrate(&cfg, parse_anchor(lo)?, parse_anchor(hi)?)?;
        cal.apply(&mut cfg);
    }
    let out = &cli.out;
    std::fs::create_dir_all(out).map_err(|e| PipelineError::io(out, e))?;
    let sweep = forward::synth_sweep(&cfg, cli.seed)?;
    let mut truth = Vec::new();
    for (i, (p, trace)) in sweep.iter().enumerate() {
        ingest::write_s21_csv(&out.join(format!("s21_{i:03}.csv")), trace)?;
        truth.push(*p);
    }
    let cfg_path = out.join("config.json");
    let text = serde_json::to_string_pretty(&cfg).map_err(|e| PipelineError::Input(e.to_string()))? + "\n";
    std::fs::write(&cfg_path, text).map_err(|e| PipelineError::io(&cfg_path, e))?;
    let o = |p: &forward::InjectedPoint| row(&[p.temperature_k, p.fr_hz, p.qi, p.q_tls, p.delta_qp]);
    let csv: Vec<String> = truth.iter().map(o).collect();
    let truth_path = out.join("injected.json");
    let text = serde_json::to_string_pretty(&truth).map_err(|e| PipelineError::Input(e.to_string()))? + "\n";
    std::fs::write(&truth_path, text).map_err(|e| PipelineError::io(&truth_path, e))?;
    emit(cli.format, &truth, "temperature_K,fr_hz,qi,q_tls,delta_qp", &csv)
}

fn cmd_dc(cli: &Cli, input: &Path) -> Result<()> {
    let r = dc::extract_tc_rrr(&ingest::ingest_rt(input)?)?;
    emit(
        cli.format,
        &r,
        "tc_k,r_sq_tc_ohm,rrr,t10_k,t90_k,transition_width_k",
        &[format!("{},{},{}", row(&[r.tc_k, r.r_sq_tc_ohm]), opt(r.rrr), row(&[r.t10_k, r.t90_k, r.transition_width_k]))],
    )
}

fn cmd_xrd(cli: &Cli, two_theta: f64, hkl: &[i32], wavelength: Option<f64>) -> Result<()> {
    let lambda = match (wavelength, &cli.config) {
        (Some(w), _) => w,
        (None, Some(p)) => Config::load(p)?.run.xrd_wavelength_angstrom,
        (None, None) => xrd::CU_K_ALPHA1_ANGSTROM,
    };
    let hkl: [i32; 3] = hkl.try_into().map_err(|_| PipelineError::Input("--hkl needs three integers".into()))?;
    let a = xrd::lattice_constant(two_theta, hkl, lambda)?;
    #[derive(Serialize)]
    struct Out {
        two_theta_deg: f64,
        hkl: [i32; 3],
        wavelength_angstrom: f64,
        lattice_constant_angstrom: f64,
    }
    emit(
        cli.format,
        &Out { two_theta_deg: two_theta, hkl, wavelength_angstrom: lambda, lattice_constant_angstrom: a },
        "two_theta_deg,h,k,l,wavelength_angstrom,lattice_constant_angstrom",
        &[format!("{},{},{},{},{}", num(two_theta), hkl[0], hkl[1], hkl[2], row(&[lambda, a]))],
    )
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Mb { t_min, t_max, points, freq_hz, oracle } => cmd_mb(cli, *t_min, *t_max, *points, *freq_hz, *oracle),
        Command::Fit { input } => cmd_fit(cli, input),
        Command::Sweep { inputs } => cmd_sweep(cli, inputs),
        Command::Photon { p_vna, p_att, qi, qc, ql, freq_hz, target_photons } => {
            cmd_photon(cli, *p_vna, *p_att, *qi, *qc, *ql, *freq_hz, *target_photons)
        }
        Command::Synth { calibrate } => cmd_synth(cli, calibrate.as_deref()),
        Command::Dc { input } => cmd_dc(cli, input),
        Command::Xrd { two_theta, hkl, wavelength } => cmd_xrd(cli, *two_theta, hkl, *wavelength),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
