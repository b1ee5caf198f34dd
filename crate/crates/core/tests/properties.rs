use proptest::prelude::*;
use resoloss_core::consts::angular;
use resoloss_core::lossmodel::{q_tls, qi_theory, TlsParams};
use resoloss_core::photon::{dbm_to_watts, photon_number, power_budget, power_for_photons, scattering_mags, watts_to_dbm};
use resoloss_core::resfit::{model_s21, NotchParams};

proptest! {
    #[test]
    fn dbm_round_trip(dbm in -200.0f64..50.0) {
        prop_assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
    }

    #[test]
    fn scattering_energy_bound(qc in 1e2f64..1e7, frac in 1e-6f64..0.5) {
        let (s21, s11) = scattering_mags(frac * qc, qc).unwrap();
        prop_assert!(s21 * s21 + s11 * s11 <= 1.0);
    }

    #[test]
    fn photon_inverse(n in 1e-2f64..1e4, qi in 1e3f64..1e7, qc in 1e3f64..1e7, f in 1e9f64..1e10) {
        let ql = 1.0 / (1.0 / qi + 1.0 / qc);
        let p = power_for_photons(n, qi, ql, qc, f).unwrap();
        let b = power_budget(p, 0.0, qi, ql, qc, f).unwrap();
        prop_assert!((b.n_ph / n - 1.0).abs() < 1e-12);
        prop_assert!((photon_number(2.0 * qi, b.p_loss_w, f).unwrap() / b.n_ph - 2.0).abs() < 1e-12);
    }

    #[test]
    fn qi_theory_bounded(qt in 1e2f64..1e9, d in 1e-9f64..1e-2) {
        let qi = qi_theory(qt, d).unwrap();
        prop_assert!(qi <= qt && qi <= 1.0 / d);
    }

    #[test]
    fn tls_limits(t in 0.01f64..5.0, n in 0.0f64..1e4) {
        let p = TlsParams::new(1e-5, 20.0, 0.5, angular(5.95e9)).unwrap();
        let q = q_tls(t, n, &p).unwrap();
        prop_assert!(q >= 1e5 * (1.0 - 1e-12));
        prop_assert!(q_tls(t, n + 1.0, &p).unwrap() >= q);
    }

    #[test]
    fn model_on_resonance(ql in 1e3f64..1e6, qc in 1e3f64..1e6, phi in -1.0f64..1.0) {
        let p = NotchParams { fr_hz: 6e9, ql, qc_mag: qc, phi_rad: phi, amp: 1.0, phase0_rad: 0.0, tau_s: 0.0 };
        let z = model_s21(&p, 6e9);
        let expect = num_complex::Complex64::new(1.0, 0.0) - num_complex::Complex64::from_polar(ql / qc, phi);
        prop_assert!((z - expect).norm() < 1e-12);
    }
}
