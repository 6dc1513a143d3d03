use std::f64::consts::TAU;
use std::sync::Arc;

use proptest::prelude::*;

use alphaflow::bounds::{monitored_run, Calibration};
use alphaflow::experiments::{fit_rate, RateForm};
use alphaflow::integrator::simulate_norms;
use alphaflow::models::{ForcingSpec, InitialSpec, ModelKind, ModelSystem, SimConfig};
use alphaflow::nonlinear::{BilinearWorkspace, BATTERY_ENVELOPE};
use alphaflow::spectral::random::random_field;
use alphaflow::spectral::Lattice;

fn small(model: ModelKind, alpha: f64) -> SimConfig {
    SimConfig {
        model,
        nu_viscosity: 0.05,
        alpha_length: alpha,
        box_length: TAU,
        resolution: 16,
        galerkin_cutoff_k2: None,
        horizon_time: 0.5,
        dt_time: 5e-3,
        forcing: ForcingSpec::Shell {
            k2: 2,
            amplitude: 0.2,
        },
        initial: InitialSpec::Random {
            exponent: 4.0,
            rms_velocity: Some(0.3),
        },
        seed: 9,
        samples: 5,
    }
}

#[test]
fn forced_runs_stay_divergence_free_and_balanced() {
    for model in ModelKind::ALL {
        let cfg = small(model, 0.2);
        let mut diag = ModelSystem::new(&cfg).unwrap();
        let mut worst = 0.0f64;
        monitored_run(&cfg, &Calibration::default(), |t, u| {
            assert!(u.is_valid_velocity(1e-12));
            worst = worst.max(diag.energy_terms(u, t)?.balance_residual);
            Ok(())
        })
        .unwrap();
        assert!(worst < 1e-10, "{model}: balance residual {worst:e}");
    }
}

#[test]
fn vanishing_filter_recovers_the_unfiltered_flow() {
    let nse = simulate_norms(&small(ModelKind::Nse, 0.0)).unwrap();
    for model in ModelKind::ALPHA_MODELS {
        let a = simulate_norms(&small(model, 0.0)).unwrap();
        for (x, y) in a.iter().zip(&nse) {
            assert!((x.l2 - y.l2).abs() <= 1e-13 * y.l2, "{model}");
        }
    }
}

#[test]
fn shrinking_filter_converges_to_nse() {
    let nse = simulate_norms(&small(ModelKind::Nse, 0.0)).unwrap();
    let errs: Vec<(f64, f64)> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&a| {
            let run = simulate_norms(&small(ModelKind::LerayAlpha, a)).unwrap();
            (a, (run.last().unwrap().l2 - nse.last().unwrap().l2).abs())
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1].1 < w[0].1), "{errs:?}");
    let fit = fit_rate(&errs, RateForm::Alpha).unwrap();
    assert!(fit.order > 1.0, "{fit:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn advection_is_energy_neutral(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 12, 16])) {
        let lat = Arc::new(Lattice::new(TAU, n).unwrap());
        let u = random_field(Arc::clone(&lat), seed, BATTERY_ENVELOPE);
        let v = random_field(Arc::clone(&lat), seed ^ 1, BATTERY_ENVELOPE);
        let mut ws = BilinearWorkspace::new(lat);
        let b = ws.advective(&u, &v).unwrap();
        let scale = b.l2_norm() * v.l2_norm();
        prop_assert!(b.inner(&v).unwrap().abs() <= 1e-12 * scale);
        let r = ws.rotational(&u, &v).unwrap();
        prop_assert!(r.inner(&u).unwrap().abs() <= 1e-12 * r.l2_norm() * u.l2_norm());
    }
}
