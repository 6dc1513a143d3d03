use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::constants::Calibration;
use super::inequalities::{bg_battery, BgBattery};
use crate::error::{invalid, Result};
use crate::nonlinear::{identity_suite, EmpiricalConstant, BATTERY_ENVELOPE};
use crate::spectral::Lattice;

/// Battery size and resolution used when nothing else is specified.
pub const CALIBRATION_RESOLUTION: usize = 32;
pub const CALIBRATION_TRIALS: usize = 100;

/// Measured constants behind a [`Calibration`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub resolution: usize,
    pub trials: usize,
    pub seed: u64,
    pub calibration: Calibration,
    /// Largest sup-norm ratio over the battery.
    pub brezis_gallouet: BgBattery,
    pub constants: Vec<EmpiricalConstant>,
}

/// Minimal passing values of each constant family over a seeded battery:
///
/// * `apriori`: square of the `enstrophy_transfer` constant, which enters
///   the higher-order Gronwall step after Young's inequality;
/// * `linfty`: `c_bg^2 (1 + 1/(2e))`, where the extra term absorbs
///   `||u||^2 log(K / ||u||) <= K^2 / (2e)`;
/// * `alpha_rate`, `galerkin`: the largest squared battery constant.
pub fn calibrate(lattice: Arc<Lattice>, trials: usize, seed: u64) -> Result<CalibrationReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let suite = identity_suite(Arc::clone(&lattice), trials, seed)?;
    let bg = bg_battery(Arc::clone(&lattice), trials, seed, BATTERY_ENVELOPE)?;
    let c_transfer = suite
        .constant("enstrophy_transfer")
        .map(|c| c.max_ratio)
        .unwrap_or(f64::NAN);
    let widest = suite
        .constants
        .iter()
        .map(|c| c.max_ratio)
        .chain([bg.max_ratio])
        .fold(0.0f64, f64::max);
    let calibration = Calibration {
        apriori: c_transfer * c_transfer,
        linfty: bg.max_ratio.powi(2) * (1.0 + 0.5 / std::f64::consts::E),
        alpha_rate: widest * widest,
        galerkin: widest * widest,
    };
    Ok(CalibrationReport {
        resolution: lattice.resolution(),
        trials,
        seed,
        calibration,
        brezis_gallouet: bg,
        constants: suite.constants,
    })
}

/// [`calibrate`] on the standard `L = 2 pi`, `N = 32` battery.
pub fn default_calibration(seed: u64) -> Result<CalibrationReport> {
    let lat = Arc::new(Lattice::new(std::f64::consts::TAU, CALIBRATION_RESOLUTION)?);
    calibrate(lat, CALIBRATION_TRIALS, seed)
}
