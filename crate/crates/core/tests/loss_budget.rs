use resoloss_core::consts::angular;
use resoloss_core::impedance::{geometric_inductance, qp_loss_theory, surface_impedance, CpwGeometry};
use resoloss_core::lossmodel::{excess_qp_loss, nqp_from_loss, q_tls, qi_theory, LossBudget, TlsParams, PER_UM3};
use resoloss_core::mbcore::{complex_conductivity, GapModel, MaterialParams, Sigma2Mode};
use resoloss_core::photon::{dbm_to_watts, input_power_dbm, photon_number, power_budget, power_for_photons, scattering_mags, watts_to_dbm};

const FR: f64 = 5.95e9;

fn film() -> MaterialParams {
    MaterialParams::new(10.7, Some(1.623e-3), 159.5, 100e-9, 1.86e28, 0.9).unwrap()
}

fn delta_qp(t: f64) -> f64 {
    let w = angular(FR);
    let geom = CpwGeometry::new(4e-6, 2e-6, 100e-9, 11.7).unwrap();
    let c = complex_conductivity(&film(), t, w, Sigma2Mode::Prefactor4).unwrap();
    qp_loss_theory(&surface_impedance(&c).unwrap(), geometric_inductance(&geom).unwrap(), geom.default_geometry_factor()).unwrap()
}

#[test]
fn budget_chain_is_self_consistent() {
    let w = angular(FR);
    let tls = TlsParams::new(8e-6, 20.0, 0.5, w).unwrap();
    let mut prev_n = 0.0;
    for i in 0..26 {
        let t = 0.5 + 0.1 * i as f64;
        let d = delta_qp(t);
        let qt = q_tls(t, 1.0, &tls).unwrap();
        let qi = qi_theory(qt, d).unwrap();
        let b = LossBudget::assemble(t, qt, d, 0.9 * qi, &film(), w, GapModel::Bcs).unwrap();
        assert_eq!(b.recomputed_qi_theory().unwrap(), b.qi_theory);
        // Reciprocal of a reciprocal: equal to within rounding of the inversion.
        assert!(((1.0 / b.qi_theory) / (1.0 / b.q_tls + b.delta_qp_theory) - 1.0).abs() <= 2.0 * f64::EPSILON);
        assert!(b.qi_theory <= b.q_tls.min(b.q_qp_theory));
        // Two paths to the theoretical density agree bit-for-bit.
        let direct = nqp_from_loss(d, t, &film(), w, GapModel::Bcs).unwrap() / PER_UM3;
        assert_eq!(direct, b.nqp_theory_per_um3);
        assert!(b.nqp_theory_per_um3 > prev_n);
        prev_n = b.nqp_theory_per_um3;
        let ex = excess_qp_loss(&b, film().tc_kelvin);
        assert!(ex.value > 0.0 && !ex.negative);
    }
}

#[test]
fn qi_theory_has_interior_maximum() {
    let w = angular(FR);
    let tls = TlsParams::new(1e-5, 20.0, 0.5, w).unwrap();
    let qi: Vec<f64> = (0..30)
        .map(|i| {
            let t = 0.12 + (2.9 - 0.12) * i as f64 / 29.0;
            qi_theory(q_tls(t, 1.0, &tls).unwrap(), delta_qp(t)).unwrap()
        })
        .collect();
    let imax = (0..qi.len()).max_by(|&a, &b| qi[a].total_cmp(&qi[b])).unwrap();
    assert!(imax > 0 && imax < qi.len() - 1);
}

#[test]
fn measured_loss_from_low_qi() {
    let w = angular(FR);
    let d = resoloss_core::lossmodel::delta_qp_measured(7.421e3, 1e12).unwrap();
    assert!((d - 1.3475e-4).abs() < 1e-8);
    let b = LossBudget::assemble(0.5, 1e5, 1e-7, 2e5, &film(), w, GapModel::Bcs).unwrap();
    assert!(b.negative_loss && b.nqp_measured_per_um3.is_none());
}

#[test]
fn drive_power_through_attenuation() {
    assert_eq!(input_power_dbm(-25.0, -110.0), -135.0);
    for dbm in [-150.0, -135.0, -20.0, 0.0, 13.0] {
        assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-12 * dbm.abs().max(1.0));
    }
}

#[test]
fn photon_inverse_and_linearity() {
    let (qi, qc) = (1e5, 5e6);
    let ql = 1.0 / (1.0 / qi + 1.0 / qc);
    let p1 = power_for_photons(1.0, qi, ql, qc, FR).unwrap();
    let b = power_budget(p1, 0.0, qi, ql, qc, FR).unwrap();
    assert!((b.n_ph - 1.0).abs() < 1e-12);
    let b10 = power_budget(p1 + 10.0, 0.0, qi, ql, qc, FR).unwrap();
    assert!((b10.n_ph / 10.0 - 1.0).abs() < 1e-12);
    let (s21, s11) = scattering_mags(ql, qc).unwrap();
    assert!(s21 * s21 + s11 * s11 <= 1.0);
    assert_eq!(photon_number(qi, 0.0, FR).unwrap(), 0.0);
}
