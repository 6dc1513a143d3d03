use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::models::{InitialSpec, ModelKind, SimConfig};
use crate::spectral::{Cutoff, Lattice};

fn inputs(nu: f64, alpha: f64, u0: f64, f2: f64) -> BoundInputs {
    BoundInputs {
        nu,
        alpha,
        box_length: TAU,
        horizon: 1.0,
        u0_l2: u0,
        u0_h1: 2.0 * u0,
        u0_h2: 4.0 * u0,
        forcing_l2t_sq: f2,
        forcing_linf_sq: f2,
        galerkin: None,
    }
}

#[test]
fn homogeneous_data_gives_zero_constants() {
    let c = compute_constants(&inputs(0.1, 0.2, 0.0, 0.0), &Calibration::default(), None).unwrap();
    assert_eq!(c.k0_sq, 0.0);
    assert_eq!(c.kt0_sq, 0.0);
    assert_eq!(c.eps_sq, 0.0);
    assert_eq!(c.eps_tilde_sq, 0.0);
}

#[test]
fn k0_hand_value() {
    // nu = 1, lambda_1 = 1 on L = 2 pi: K0^2 = 1 + 2 / 1.
    let c = compute_constants(&inputs(1.0, 0.0, 1.0, 2.0), &Calibration::default(), None).unwrap();
    assert!((c.k0_sq - 3.0).abs() < 1e-15);
    assert_eq!(c.eps_sq, 0.0);
}

#[test]
fn chain_by_hand() {
    let inp = inputs(0.5, 0.25, 1.0, 0.5);
    let cal = Calibration {
        apriori: 0.3,
        ..Default::default()
    };
    let c = compute_constants(&inp, &cal, None).unwrap();
    let h1 = 4.0 + 0.0625 * 16.0;
    let kt01 = 1.0 + 0.0625 * 4.0 + 0.5 / 0.5;
    let g = (0.3 * kt01 / 0.25f64).exp();
    let kt00 = g * h1 + g * 0.5 / 0.5;
    assert!((c.kt0_sq - (h1 + 1.0)).abs() < 1e-14);
    assert!((c.kt01_sq - kt01).abs() < 1e-14);
    assert!((c.kt00_sq / kt00 - 1.0).abs() < 1e-14);
    let kt02 = h1 + 1.0 + 0.3 / 0.25 * kt00 * kt01;
    assert!((c.kt02_sq / kt02 - 1.0).abs() < 1e-14);
    let la = 1.0 + (1.0f64 / 0.25).ln();
    let eps = 0.0625 / 0.5 * (c.k0_sq / 0.25).exp() * ((h1 + 1.0).powi(2) * la + 0.5);
    assert!((c.eps_sq / eps - 1.0).abs() < 1e-13);
}

#[test]
fn galerkin_constants_by_hand() {
    let lat = Lattice::new(TAU, 16).unwrap();
    let cut = Cutoff::Shell(4);
    let mut inp = inputs(0.5, 0.2, 1.0, 0.0).with_cutoff(&lat, &cut);
    inp.forcing_linf_sq = 0.0;
    let c = compute_constants(&inp, &Calibration::default(), None).unwrap();
    let g = c.galerkin.unwrap();
    assert_eq!((g.lambda_m, g.lambda_m1), (4.0, 5.0));
    let k2 = c.kt0_sq;
    let la = 1.0 + (1.0f64 / 0.2).ln();
    let q = 16.0 + 4.0 * k2 * k2 * la;
    let r = 4.0 * k2 * k2 * la;
    let ut = 2.0 * (k2 + k2 / 2.5 + 4.0 * k2 * k2);
    let vt = 2.0 * k2 * (q + r) + 4.0 * k2 * (q + r) / 5.0 + 4.0 * k2 * k2;
    let e = (q + r + (1.0 + 4f64.ln()) * ut * vt) / 25.0;
    assert!((g.q / q - 1.0).abs() < 1e-14);
    assert!((g.u_tilde / ut - 1.0).abs() < 1e-14);
    assert!((g.v_tilde / vt - 1.0).abs() < 1e-14);
    assert!((g.e_sq / e - 1.0).abs() < 1e-14);
    assert!(g.e_sq_gronwall >= g.e_sq);
}

#[test]
fn hypothesis_gates() {
    let big = inputs(0.1, 1.5, 1.0, 0.0);
    assert!(matches!(
        compute_constants(&big, &Calibration::default(), None),
        Err(Error::Hypothesis(_))
    ));
    let lat = Lattice::new(TAU, 16).unwrap();
    let g = inputs(0.1, 0.5, 1.0, 0.0).with_cutoff(&lat, &Cutoff::Shell(4));
    let h = hypotheses(&g);
    assert!(h.iter().any(|h| h.name == "alpha_below_cutoff" && !h.holds));
    assert!(compute_constants(&g, &Calibration::default(), None).is_err());
    assert!(combined_hypothesis(2.0 * PI / (5.0 * TAU), 5.0, TAU).holds);
    assert!(!combined_hypothesis(0.3, 5.0, TAU).holds);
}

#[test]
fn e_sq_decreases_with_cutoff() {
    let lat = Lattice::new(TAU, 64).unwrap();
    let mut prev = f64::INFINITY;
    for k2 in [4u32, 8, 16, 32, 64] {
        let inp = inputs(0.1, 0.1, 0.5, 0.1).with_cutoff(&lat, &Cutoff::Shell(k2));
        let e = compute_constants(&inp, &Calibration::default(), None)
            .unwrap()
            .galerkin
            .unwrap()
            .e_sq;
        assert!(e < prev, "{k2}: {e} !< {prev}");
        prev = e;
    }
}

#[test]
fn constants_bit_identical_on_recompute() {
    let inp = inputs(0.3, 0.1, 0.7, 0.2);
    let a = compute_constants(&inp, &Calibration::default(), Some(4.0)).unwrap();
    let b = compute_constants(&inp, &Calibration::default(), Some(4.0)).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

proptest! {
    #[test]
    fn k0_monotone(u in 0.0f64..3.0, du in 0.0f64..1.0, f in 0.0f64..3.0, df in 0.0f64..1.0) {
        let cal = Calibration::default();
        let a = compute_constants(&inputs(0.2, 0.0, u, f), &cal, None).unwrap().k0_sq;
        let b = compute_constants(&inputs(0.2, 0.0, u + du, f), &cal, None).unwrap().k0_sq;
        let c = compute_constants(&inputs(0.2, 0.0, u, f + df), &cal, None).unwrap().k0_sq;
        prop_assert!(a >= 0.0 && b >= a && c >= a);
    }

    #[test]
    fn eps_shrinks_with_alpha(alpha in 0.001f64..1.0, u in 0.01f64..1.0) {
        let cal = Calibration::default();
        let a = compute_constants(&inputs(1.0, alpha, u, 0.0), &cal, None).unwrap();
        let b = compute_constants(&inputs(1.0, alpha / 2.0, u, 0.0), &cal, None).unwrap();
        prop_assert!(b.eps_sq < a.eps_sq);
        prop_assert!(a.eps_tilde_sq >= a.eps_sq);
    }
}

#[test]
fn nse_shear_monitor_matches_closed_form() {
    let mut cfg = SimConfig::default_physics(ModelKind::Nse, 0.0);
    cfg.nu_viscosity = 1.0;
    cfg.resolution = 16;
    cfg.initial = InitialSpec::Shear { amplitude: 1.0 };
    cfg.samples = 4;
    let (u, _, rep) = monitored_run(&cfg, &Calibration::default(), |_, _| Ok(())).unwrap();
    assert!(rep.pass);
    let chk = &rep.monitor.checks[0];
    assert_eq!(chk.name, "energy_l2");
    assert!((chk.max_ratio - 1.0).abs() < 1e-12);
    assert_eq!(chk.time_of_max, 0.0);
    // |u(T)|^2 + int |u|^2 e^{-2t} = |u0|^2 (1 + e^{-2}) / 2.
    let u0 = rep.constants.k0_sq;
    let want = 0.5 * u0 * (1.0 + (-2.0f64).exp());
    let got = u.l2_norm().powi(2) + (u0 - u.l2_norm().powi(2)) / 2.0;
    assert!((got / want - 1.0).abs() < 1e-8);
    assert!(rep.linfty.is_none());
}

#[test]
fn alpha_model_monitors_pass() {
    for kind in ModelKind::ALPHA_MODELS {
        let mut cfg = SimConfig::default_physics(kind, 0.1);
        cfg.resolution = 16;
        cfg.dt_time = 5e-3;
        cfg.samples = 8;
        let mut seen = 0;
        let (_, _, rep) = monitored_run(&cfg, &Calibration::default(), |_, _| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 9);
        assert!(rep.monitor.pass(), "{kind}: {:?}", rep.monitor);
        let want = if kind.energy_form() == crate::models::EnergyForm::L2 {
            3
        } else {
            1
        };
        assert_eq!(rep.monitor.checks.len(), want);
        assert!(rep.linfty.is_some());
    }
}

#[test]
fn monitor_rejects_sparse_samples() {
    let cfg = SimConfig::default_physics(ModelKind::LerayAlpha, 0.1);
    let c = compute_constants(&inputs_for(&cfg).unwrap(), &Calibration::default(), None).unwrap();
    let u = cfg.initial_state(cfg.lattice().unwrap());
    let traj = vec![(0.0, u.clone()), (0.5, u)];
    assert!(monitor_apriori(&traj, cfg.model, &c, 1e-3).is_err());
}

#[test]
fn monitor_grid_keeps_samples_exact() {
    let g = monitor_grid(1.0, 0.3, &[0.5, 1.0]);
    let t: Vec<f64> = g.iter().map(|x| x.0).collect();
    assert_eq!(t.len(), 5);
    assert!((t[0] - 0.3).abs() < 1e-15);
    assert_eq!(t[1], 0.5);
    assert!((t[2] - 0.6).abs() < 1e-15);
    assert_eq!(g.last().copied(), Some((1.0, true)));
    assert_eq!(g.iter().filter(|x| x.1).count(), 2);
}

#[test]
fn brezis_gallouet_lowest_mode() {
    let lat = Arc::new(Lattice::new(TAU, 16).unwrap());
    let u = crate::spectral::random::shear(lat, 1.0);
    let bg = brezis_gallouet(&u).unwrap();
    // |Au| / ||u|| = sqrt(lambda_1): log term vanishes, M = 1.
    assert!((bg.rhs_shape - u.h1_norm()).abs() < 1e-12);
    assert!((bg.m_used - 1.0).abs() < 1e-6);
    // sin y has unit sup norm and ||u|| = 2 pi / sqrt 2.
    assert!((bg.ratio - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-12);
    let z = crate::spectral::SpectralVelocity::zeros(Arc::new(Lattice::new(TAU, 8).unwrap()));
    assert!(brezis_gallouet(&z).is_err());
}

#[test]
fn aligned_fields_probe_the_worst_case() {
    use crate::spectral::random::{aligned_field, Envelope};
    let lat = Arc::new(Lattice::new(TAU, 32).unwrap());
    let battery = bg_battery(lat.clone(), 20, 3, Envelope::Power(4.0)).unwrap();
    let smooth = brezis_gallouet(&aligned_field(lat.clone(), Envelope::Power(4.0))).unwrap();
    let flat = brezis_gallouet(&aligned_field(lat, Envelope::Flat)).unwrap();
    assert!(smooth.ratio > battery.max_ratio);
    // A flat spectrum grows the logarithm faster than the coherent peak.
    assert!(flat.ratio.is_finite() && flat.ratio < smooth.ratio);
}

#[test]
fn filter_defect_operator_norm() {
    let lat = Arc::new(Lattice::new(TAU, 16).unwrap());
    // alpha^2 lambda = 1 at |k|^2 = 4.
    let r = filter_defect_check(lat.clone(), 0.5, 20, 9).unwrap();
    assert!((r.operator_norm - 0.5).abs() < 1e-12);
    assert_eq!(r.argmax_k2, 4);
    assert!(r.bound_holds);
    assert!(r.pair_max_ratio < 1.0);
    // For tiny alpha the maximum sits on the outermost shell.
    let small = filter_defect_check(lat.clone(), 1e-6, 0, 9).unwrap();
    assert!((small.operator_norm / (1e-6 * lat.max_eigenvalue().sqrt()) - 1.0).abs() < 1e-9);
    assert!(filter_defect_check(lat, 0.0, 1, 1).is_err());
}

#[test]
fn linfty_at_hypothesis_boundary() {
    let inp = inputs(1.0, 1.0, 1.0, 0.0);
    let c = compute_constants(&inp, &Calibration::default(), None).unwrap();
    let r = linfty_model_bound(0.5, ModelKind::LerayAlpha, &c).unwrap();
    assert!((r.shape - c.kt0_sq).abs() < 1e-15);
    assert!(r.pass);
    assert!(linfty_model_bound(0.5, ModelKind::Nse, &c).is_err());
    let mut bad = c;
    bad.inputs.alpha = 2.0;
    assert!(matches!(
        linfty_model_bound(0.5, ModelKind::LerayAlpha, &bad),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn calibration_is_finite_and_deterministic() {
    let lat = Arc::new(Lattice::new(TAU, 16).unwrap());
    let a = calibrate(lat.clone(), 5, 11).unwrap();
    let b = calibrate(lat.clone(), 5, 11).unwrap();
    assert_eq!(a.calibration, b.calibration);
    let c = a.calibration;
    for v in [c.apriori, c.linfty, c.alpha_rate, c.galerkin] {
        assert!(v.is_finite() && v > 0.0);
    }
    assert!(c.alpha_rate >= c.apriori);
    assert!(calibrate(lat, 0, 1).is_err());
}
