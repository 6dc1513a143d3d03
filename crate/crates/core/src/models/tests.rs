use std::f64::consts::PI;

use super::*;
use crate::spectral::SpectralVelocity;

fn shear_cfg(model: ModelKind) -> SimConfig {
    SimConfig {
        model,
        nu_viscosity: 1.0,
        alpha_length: 0.1,
        box_length: 2.0 * PI,
        resolution: 16,
        galerkin_cutoff_k2: None,
        horizon_time: 1.0,
        dt_time: 1e-3,
        forcing: ForcingSpec::Zero,
        initial: InitialSpec::Shear { amplitude: 1.0 },
        seed: 1,
        samples: 8,
    }
}

fn random_cfg(model: ModelKind, alpha: f64) -> SimConfig {
    let mut c = SimConfig::default_physics(model, alpha);
    c.resolution = 16;
    c
}

#[test]
fn shear_rhs_is_pure_decay_for_every_model() {
    for kind in ModelKind::ALL {
        let cfg = shear_cfg(kind);
        let mut sys = ModelSystem::new(&cfg).unwrap();
        let u = cfg.initial_state(cfg.lattice().unwrap());
        let r = sys.rhs(&u, 0.0).unwrap();
        let want = u.scale(-1.0);
        assert!(r.sub(&want).unwrap().max_amplitude() < 1e-15, "{kind}");
    }
}

#[test]
fn zero_state_zero_rhs() {
    for kind in ModelKind::ALL {
        let cfg = random_cfg(kind, 0.1);
        let mut sys = ModelSystem::new(&cfg).unwrap();
        let z = SpectralVelocity::zeros(cfg.lattice().unwrap());
        assert_eq!(sys.rhs(&z, 0.0).unwrap().max_amplitude(), 0.0);
    }
}

#[test]
fn alpha_zero_reduces_to_nse() {
    let base = random_cfg(ModelKind::Nse, 0.0);
    let lat = base.lattice().unwrap();
    let u = base.initial_state(lat);
    let mut nse = ModelSystem::new(&base).unwrap();
    let r0 = nse.rhs(&u, 0.0).unwrap();
    for kind in ModelKind::ALPHA_MODELS {
        let mut sys = ModelSystem::new(&random_cfg(kind, 0.0)).unwrap();
        let r = sys.rhs(&u, 0.0).unwrap();
        let d = r.sub(&r0).unwrap().l2_norm() / r0.l2_norm();
        assert!(d < 1e-13, "{kind}: {d}");
    }
}

#[test]
fn energy_transfer_vanishes() {
    for kind in ModelKind::ALL {
        let cfg = random_cfg(kind, 0.2);
        let mut sys = ModelSystem::new(&cfg).unwrap();
        let u = cfg.initial_state(cfg.lattice().unwrap());
        let e = sys.energy_terms(&u, 0.0).unwrap();
        assert_eq!(e.production, 0.0);
        assert!(e.dissipation > 0.0);
        assert!(e.balance_residual < 1e-12, "{kind}: {e:?}");
        let direct = model_energy(kind.energy_form(), sys.alpha(), &u);
        assert!((e.model_energy - direct).abs() < 1e-12 * direct);
    }
}

#[test]
fn rhs_stays_in_cutoff_space() {
    for kind in ModelKind::ALL {
        let mut cfg = random_cfg(kind, 0.1);
        cfg.galerkin_cutoff_k2 = Some(10);
        cfg.forcing = ForcingSpec::Random {
            exponent: 2.0,
            amplitude: 0.1,
        };
        let mut sys = ModelSystem::new(&cfg).unwrap();
        let u = cfg.initial_state(cfg.lattice().unwrap());
        let r = sys.rhs(&u, 0.0).unwrap();
        assert!(r.is_within(&cfg.cutoff()), "{kind}");
        assert!(r.is_valid_velocity(1e-12));
    }
}

#[test]
fn config_validation_names_fields() {
    let mut c = random_cfg(ModelKind::LerayAlpha, 0.1);
    c.nu_viscosity = 0.0;
    let e = c.validate().unwrap_err().to_string();
    assert!(e.contains("nu_viscosity"), "{e}");
    let mut c = random_cfg(ModelKind::LerayAlpha, -1.0);
    assert!(c
        .validate()
        .unwrap_err()
        .to_string()
        .contains("alpha_length"));
    c.alpha_length = 0.1;
    c.galerkin_cutoff_k2 = Some(3);
    assert!(c.validate().is_err());
    c.galerkin_cutoff_k2 = Some(50);
    assert!(c.validate().is_err(), "shell 50 is incomplete at N = 16");
}

#[test]
fn config_round_trips_through_json() {
    let c = random_cfg(ModelKind::NsAlpha, 0.05);
    let s = serde_json::to_string(&c).unwrap();
    assert!(s.contains("nu_viscosity") && s.contains("alpha_length"));
    let back: SimConfig = serde_json::from_str(&s).unwrap();
    assert_eq!(back, c);
}
