use resoloss::forward::{self, InjectedPoint};
use resoloss::report::csv_tables;
use resoloss::sweep::{DerivedSummary, EntryStatus};
use resoloss::{emit_report, sweep_analyze, AnalysisReport, Config, PipelineError, SweepInput};

fn config(n_temperatures: usize) -> Config {
    let text = format!(
        r#"{{
  "material": {{ "tc_kelvin": 10.7, "sheet_resistance_ohm": 159.5, "thickness_m": 1e-7, "n0_states": 1.86e28, "alpha": 0.9 }},
  "geometry": {{ "center_width_m": 4e-6, "gap_m": 2e-6, "thickness_m": 1e-7, "substrate_eps_r": 11.7 }},
  "tls": {{ "f_delta0": 1e-5, "n_c": 20.0, "beta_exp": 0.5 }},
  "run": {{ "sigma2_mode": "standard", "synth": {{ "n_temperatures": {n_temperatures} }} }}
}}"#
    );
    let mut cfg = Config::from_json(&text).unwrap();
    forward::calibrate(&cfg, (0.12, 1e5), (2.9, 7421.0)).unwrap().apply(&mut cfg);
    cfg
}

fn inputs(cfg: &Config, seed: u64) -> (Vec<InjectedPoint>, Vec<SweepInput>) {
    let sweep = forward::synth_sweep(cfg, seed).unwrap();
    let truth = sweep.iter().map(|(p, _)| *p).collect();
    let inputs = sweep
        .into_iter()
        .enumerate()
        .map(|(i, (_, trace))| SweepInput { name: format!("s21_{i:03}.csv"), sha256: format!("{i:064x}"), trace })
        .collect();
    (truth, inputs)
}

#[test]
fn recovers_injected_qi() {
    let cfg = config(10);
    let (truth, inp) = inputs(&cfg, 11);
    let report = sweep_analyze(&cfg, inp).unwrap();
    assert_eq!(report.derived.n_failed, 0);
    for (e, t) in report.per_temperature.iter().zip(&truth) {
        assert_eq!(e.temperature_k, t.temperature_k);
        let f = e.fit.unwrap();
        let dev = (f.qi - t.qi).abs();
        assert!(dev <= 4.0 * f.qi_stderr && dev / t.qi < 0.05, "T = {}: {} vs {}", t.temperature_k, f.qi, t.qi);
        // Stored theory matches the injected chain.
        assert!((e.budget.unwrap().qi_theory / t.qi - 1.0).abs() < 1e-6);
    }
    assert!(report.derived.qi_interior_maximum);
    let onset = report.derived.redshift_onset_k.unwrap();
    assert!((1.5..=2.0).contains(&onset), "onset {onset}");
}

#[test]
fn corrupt_trace_is_recorded_and_skipped() {
    let cfg = config(6);
    let (_, mut inp) = inputs(&cfg, 2);
    let flat = inp[3].trace.s21[0];
    inp[3].trace.s21.iter_mut().for_each(|z| *z = flat);
    let report = sweep_analyze(&cfg, inp).unwrap();
    assert_eq!(report.derived.n_failed, 1);
    let bad = &report.per_temperature[3];
    assert_eq!(bad.status, EntryStatus::Failed);
    assert!(bad.error.is_some() && bad.fit.is_none());
    assert_eq!(report.per_temperature.iter().filter(|e| e.status == EntryStatus::Ok).count(), 5);
    assert_eq!(csv_tables(&report)[0].1.lines().count(), 6);
}

#[test]
fn all_failed_is_an_error() {
    let cfg = config(3);
    let (_, mut inp) = inputs(&cfg, 2);
    for i in &mut inp {
        let flat = i.trace.s21[0];
        i.trace.s21.iter_mut().for_each(|z| *z = flat);
    }
    let err = sweep_analyze(&cfg, inp).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn malformed_sweeps_are_rejected() {
    let cfg = config(3);
    let (_, inp) = inputs(&cfg, 2);
    assert!(matches!(sweep_analyze(&cfg, inp[..1].to_vec()), Err(PipelineError::Input(_))));

    let mut dup = inp.clone();
    dup[1].trace.meta.temperature_k = dup[0].trace.meta.temperature_k;
    assert!(matches!(sweep_analyze(&cfg, dup), Err(PipelineError::Input(_))));

    let mut power = inp.clone();
    power[2].trace.meta.power_dbm = Some(-130.0);
    assert!(matches!(sweep_analyze(&cfg, power), Err(PipelineError::Input(_))));

    let mut no_t = inp;
    no_t[0].trace.meta.temperature_k = None;
    assert!(matches!(sweep_analyze(&cfg, no_t), Err(PipelineError::Input(_))));
}

#[test]
fn input_order_does_not_matter() {
    let cfg = config(6);
    let (_, inp) = inputs(&cfg, 5);
    let a = sweep_analyze(&cfg, inp.clone()).unwrap();
    let mut shuffled = inp;
    shuffled.reverse();
    shuffled.swap(0, 3);
    let b = sweep_analyze(&cfg, shuffled).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn report_round_trips_and_is_written() {
    let cfg = config(4);
    let (_, inp) = inputs(&cfg, 9);
    let report = sweep_analyze(&cfg, inp).unwrap();
    let text = report.to_json().unwrap();
    assert_eq!(AnalysisReport::from_json(&text).unwrap(), report);
    assert!(report.provenance.inputs.iter().all(|d| !d.sha256.is_empty()));
    assert_eq!(report.provenance.config_sha256, cfg.sha256());

    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&report, dir.path()).unwrap();
    assert_eq!(written.len(), 5);
    assert_eq!(std::fs::read_to_string(dir.path().join("report.json")).unwrap(), text);
    let qi = std::fs::read_to_string(dir.path().join("qi_vs_T.csv")).unwrap();
    assert!(qi.starts_with("temperature_K,qi_measured,"));
    assert_eq!(qi.lines().count(), 5);
}

#[test]
fn empty_report_writes_json_only() {
    let cfg = config(3);
    let (_, inp) = inputs(&cfg, 1);
    let mut report = sweep_analyze(&cfg, inp).unwrap();
    report.per_temperature.clear();
    report.derived = DerivedSummary::default();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&report, dir.path()).unwrap();
    assert_eq!(written, vec![dir.path().join("report.json")]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&written[0]).unwrap()).unwrap();
    assert_eq!(v["per_temperature"], serde_json::json!([]));
}
