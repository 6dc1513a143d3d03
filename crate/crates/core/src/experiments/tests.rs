use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bounds::Calibration;
use crate::error::Error;
use crate::models::{InitialSpec, ModelKind};

#[test]
fn exact_square_law() {
    let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, (i * i) as f64)).collect();
    let f = fit_rate(&pts, RateForm::Alpha).unwrap();
    assert!((f.order - 2.0).abs() < 1e-12);
    assert!((f.prefactor - 1.0).abs() < 1e-12);
    assert!(f.residual < 1e-12);
}

#[test]
fn linear_law_with_prefactor() {
    let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.4, 0.8].iter().map(|&x| (x, 3.0 * x)).collect();
    let f = fit_rate(&pts, RateForm::Alpha).unwrap();
    assert!((f.order - 1.0).abs() < 1e-12);
    assert!((f.prefactor - 3.0).abs() < 1e-12);
}

#[test]
fn noisy_square_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<(f64, f64)> = (0..8)
        .map(|j| {
            let x = 0.5f64.powi(j);
            (x, x * x * (1.0 + 0.01 * (2.0 * rng.gen::<f64>() - 1.0)))
        })
        .collect();
    let f = fit_rate(&pts, RateForm::Alpha).unwrap();
    assert!((1.9..=2.1).contains(&f.order), "{}", f.order);
}

#[test]
fn fit_rejects_bad_input() {
    let three = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)];
    assert!(matches!(
        fit_rate(&three, RateForm::Alpha),
        Err(Error::InsufficientData(_))
    ));
    let zeros = [(1.0, 1.0), (2.0, 0.0), (3.0, 3.0), (4.0, 4.0), (5.0, 5.0)];
    let f = fit_rate(&zeros, RateForm::Alpha).unwrap();
    assert_eq!(f.zeros_excluded, 1);
    let neg = [(1.0, 1.0), (-2.0, 2.0), (3.0, 3.0), (4.0, 4.0)];
    assert!(fit_rate(&neg, RateForm::Alpha).is_err());
}

#[test]
fn rate_forms() {
    assert!((RateForm::AlphaLog.of_alpha(1.0, TAU) - 1.0).abs() < 1e-15);
    assert!((RateForm::Combined.of_eigenvalue(4.0, 1.0) - 4f64.ln() / 16.0).abs() < 1e-15);
    assert!((RateForm::InverseEigenvalueLog.of_eigenvalue(1.0, 1.0) - 1.0).abs() < 1e-15);
    assert!((RateForm::of_mode_count(1) - 2f64.ln() / 4.0).abs() < 1e-15);
}

fn small(kind: SweepKind) -> SweepSpec {
    let mut s = SweepSpec::default_for(kind);
    s.base.resolution = 16;
    s.base.dt_time = 0.01;
    s.base.samples = 8;
    s.calibration = Some(Calibration::default());
    s
}

#[test]
fn spec_validation() {
    let mut s = small(SweepKind::Alpha);
    s.values = Some(vec![]);
    assert!(s.validate().is_err());
    s.values = Some(vec![0.1, -0.1]);
    assert!(s.validate().is_err());
    let mut g = small(SweepKind::Galerkin);
    g.values = Some(vec![3.0]);
    assert!(g.validate().is_err());
    // 4 * 32 = 128 and its proxy 256 need |k_i| >= 16.
    assert!(g.validate().is_err());
    g.values = Some(vec![1.0, 2.0, 4.0, 5.0]);
    g.proxy_check = false;
    g.validate().unwrap();
    assert_eq!(g.reference_shell(), 20);
    let mut m = small(SweepKind::Alpha);
    m.models = Some(vec![ModelKind::Nse]);
    assert!(m.validate().is_err());
}

#[test]
fn spec_json_round_trip() {
    let s = SweepSpec::default_for(SweepKind::Galerkin);
    let t = serde_json::to_string(&s).unwrap();
    let back: SweepSpec = serde_json::from_str(&t).unwrap();
    assert_eq!(s, back);
}

#[test]
fn alpha_gate_is_a_hypothesis_failure() {
    let mut s = small(SweepKind::Alpha);
    s.values = Some(vec![2.0, 1.0, 0.5, 0.25]);
    assert!(matches!(run_sweep(&s), Err(Error::Hypothesis(_))));
}

#[test]
fn galerkin_gate_is_a_hypothesis_failure() {
    let mut s = small(SweepKind::Galerkin);
    s.values = Some(vec![1.0, 2.0, 4.0, 5.0]);
    s.proxy_check = false;
    s.base.alpha_length = 0.9;
    assert!(matches!(run_sweep(&s), Err(Error::Hypothesis(_))));
}

#[test]
fn shear_data_gives_zero_alpha_error() {
    let mut s = small(SweepKind::Alpha);
    s.base.initial = InitialSpec::Shear { amplitude: 1.0 };
    s.reference_factor = 2;
    let out = run_sweep(&s).unwrap();
    assert_eq!(out.curves.len(), 4);
    for c in &out.curves {
        assert!(
            c.points.iter().all(|p| p.error < 1e-13),
            "{:?}",
            c.points.iter().map(|p| p.error).collect::<Vec<_>>()
        );
        assert!(c.fit.is_none());
        assert!(c.pass, "{c:?}");
    }
    assert!(out.pass);
}

#[test]
fn galerkin_sweep_small() {
    let mut s = small(SweepKind::Galerkin);
    s.base.resolution = 32;
    s.values = Some(vec![2.0, 4.0, 8.0, 16.0]);
    s.reference_factor = 4;
    s.base.alpha_length = 0.2;
    let out = run_sweep(&s).unwrap();
    let c = &out.curves[0];
    assert!(
        c.monotone,
        "{:?}",
        c.points.iter().map(|p| p.error).collect::<Vec<_>>()
    );
    assert!(c.bound_pass);
    assert!(c.fit.as_ref().unwrap().order > 1.0);
    let proxy = out.reference.proxy.as_ref().unwrap();
    assert_eq!(proxy.cutoff_k2, 128);
    assert!(proxy.pass, "{proxy:?}");
    // Same reference as swept cutoff gives no error.
    let mut same = s.clone();
    same.values = Some(vec![1.0, 2.0, 4.0, 5.0]);
    same.reference_factor = 1;
    same.proxy_check = false;
    let o = run_sweep(&same).unwrap();
    let last = o.curves[0].points.last().unwrap();
    assert_eq!(last.error, 0.0);
}

#[test]
fn sweeps_are_deterministic_and_degree_independent() {
    let mut s = small(SweepKind::Combined);
    s.base.resolution = 32;
    s.values = Some(vec![2.0, 4.0, 8.0, 16.0]);
    s.proxy_check = false;
    s.temporal_gate = false;
    let a = sweep_csv(&run_sweep(&s).unwrap());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let b = sweep_csv(&pool.install(|| run_sweep(&s)).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(SWEEP_CSV_VERSION));
    assert_eq!(a.lines().count(), 2 + 4);
}

#[test]
fn svg_renders() {
    let mut s = small(SweepKind::Galerkin);
    s.base.resolution = 32;
    s.values = Some(vec![2.0, 4.0, 8.0, 16.0]);
    s.proxy_check = false;
    s.temporal_gate = false;
    s.base.alpha_length = 0.2;
    let svg = sweep_svg(&run_sweep(&s).unwrap()).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<circle") && svg.contains("<polyline"));
}
