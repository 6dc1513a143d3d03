//! Explicit constants of the a priori and convergence estimates, and
//! checks of each inequality on fields and trajectories.

mod calibrate;
mod constants;
mod inequalities;
mod monitor;

pub use calibrate::{
    calibrate, default_calibration, CalibrationReport, CALIBRATION_RESOLUTION, CALIBRATION_TRIALS,
};
pub use constants::{
    combined_hypothesis, compute_constants, hypotheses, BoundConstants, BoundInputs, Calibration,
    GalerkinConstants, Hypothesis,
};
pub use inequalities::{
    bg_battery, brezis_gallouet, filter_defect_check, linfty_energy, linfty_model_bound, BgBattery,
    BrezisGallouet, FilterDefectReport, LinftyReport,
};
pub use monitor::{monitor_apriori, AprioriMonitor, BoundCheck, MonitorReport, MONITOR_SLACK};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::{advance, AdvanceStats, StepperConfig};
use crate::models::{ModelKind, ModelSystem, SimConfig};
use crate::spectral::{weyl_constant, SpectralVelocity};

/// Every inequality evaluated on one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: ModelKind,
    pub hypotheses: Vec<Hypothesis>,
    pub constants: BoundConstants,
    pub monitor: MonitorReport,
    pub linfty: Option<LinftyReport>,
    pub pass: bool,
}

/// Inputs of `cfg` as seen by the bounds: the truncated initial state and
/// the projected forcing.
pub fn inputs_for(cfg: &SimConfig) -> Result<BoundInputs> {
    let lat = cfg.lattice()?;
    let u0 = cfg.initial_state(lat.clone());
    let f = cfg.forcing_field(lat);
    let alpha = if cfg.model.filtered() {
        cfg.alpha_length
    } else {
        0.0
    };
    Ok(BoundInputs::from_fields(
        cfg.nu_viscosity,
        alpha,
        cfg.horizon_time,
        &u0,
        &f,
    ))
}

/// Step grid of spacing `dt` merged with `samples`; the flag marks samples.
pub(crate) fn monitor_grid(horizon: f64, dt: f64, samples: &[f64]) -> Vec<(f64, bool)> {
    let n = (horizon / dt - 1e-9).ceil().max(1.0) as usize;
    let mut all: Vec<(f64, bool)> = (1..=n)
        .map(|k| ((k as f64 * dt).min(horizon), false))
        .collect();
    all.extend(samples.iter().map(|&t| (t, true)));
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(all.len());
    for (t, s) in all {
        match out.last_mut() {
            Some(last) if t - last.0 <= 1e-6 * dt => {
                if s && !last.1 {
                    *last = (t, true);
                }
            }
            _ => out.push((t, s)),
        }
    }
    out
}

/// Integrates `cfg`, monitoring every step against the a priori estimates,
/// and calls `observer` at each configured sample time.
pub fn monitored_run(
    cfg: &SimConfig,
    cal: &Calibration,
    observer: impl FnMut(f64, &SpectralVelocity) -> Result<()>,
) -> Result<(SpectralVelocity, AdvanceStats, BoundReport)> {
    cfg.validate()?;
    let inputs = inputs_for(cfg)?;
    let lat = cfg.lattice()?;
    let constants = compute_constants(&inputs, cal, Some(weyl_constant(&lat)))?;
    let mut sys = ModelSystem::new(cfg)?;
    let u0 = cfg.initial_state(lat);
    monitored_advance(
        &mut sys,
        &u0,
        &constants,
        cfg.dt_time,
        &cfg.sample_times(),
        observer,
    )
}

/// Advances `sys` from `u0` at `t = 0` with steps of at most `dt`, feeding
/// every step to the a priori monitor and calling `observer` at `t = 0` and
/// at each time in `samples`.
pub fn monitored_advance(
    sys: &mut ModelSystem,
    u0: &SpectralVelocity,
    constants: &BoundConstants,
    dt: f64,
    samples: &[f64],
    mut observer: impl FnMut(f64, &SpectralVelocity) -> Result<()>,
) -> Result<(SpectralVelocity, AdvanceStats, BoundReport)> {
    let model = sys.kind();
    let horizon = samples.last().copied().unwrap_or(0.0);
    let grid = monitor_grid(horizon, dt, samples);
    let times: Vec<f64> = grid.iter().map(|g| g.0).collect();

    let mut monitor = AprioriMonitor::new(model, constants, dt);
    monitor.push(0.0, u0)?;
    let filtered = model.filtered() && sys.alpha() > 0.0;
    let mut sup_linf_sq = if filtered {
        u0.linf_norm().powi(2)
    } else {
        0.0
    };
    observer(0.0, u0)?;
    let mut idx = 0;
    let (u, stats) = advance(sys, u0, 0.0, &times, &StepperConfig::new(dt)?, |t, u| {
        monitor.push(t, u)?;
        let is_sample = grid[idx].1;
        idx += 1;
        if is_sample {
            if filtered {
                sup_linf_sq = sup_linf_sq.max(u.linf_norm().powi(2));
            }
            observer(t, u)?;
        }
        Ok(())
    })?;
    let mon = monitor.report(model, grid.len() + 1);
    let linfty = if filtered {
        Some(linfty_model_bound(sup_linf_sq, model, constants)?)
    } else {
        None
    };
    let pass = mon.pass() && linfty.is_none_or(|l| l.pass);
    Ok((
        u,
        stats,
        BoundReport {
            model,
            hypotheses: hypotheses(&constants.inputs),
            constants: *constants,
            monitor: mon,
            linfty,
            pass,
        },
    ))
}

#[cfg(test)]
mod tests;
