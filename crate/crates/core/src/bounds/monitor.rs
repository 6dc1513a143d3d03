use serde::{Deserialize, Serialize};

use super::constants::BoundConstants;
use crate::error::{invalid, Result};
use crate::models::{model_dissipation, model_energy, EnergyForm, ModelKind};
use crate::spectral::SpectralVelocity;

/// Relative slack allowed for quadrature and round-off.
pub const MONITOR_SLACK: f64 = 1e-6;

/// One monitored inequality `lhs(t) <= rhs` over a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    /// Largest left side seen.
    pub lhs_max: f64,
    pub rhs: f64,
    /// `lhs / rhs` at its worst.
    pub max_ratio: f64,
    pub time_of_max: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: &str, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs_max: 0.0,
            rhs,
            max_ratio: 0.0,
            time_of_max: 0.0,
            pass: true,
        }
    }

    pub fn observe(&mut self, t: f64, lhs: f64) {
        let ratio = if self.rhs > 0.0 {
            lhs / self.rhs
        } else if lhs <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.lhs_max = self.lhs_max.max(lhs);
        if ratio > self.max_ratio || ratio.is_nan() {
            self.max_ratio = ratio;
            self.time_of_max = t;
        }
        self.pass = self.max_ratio <= 1.0 + MONITOR_SLACK;
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    /// Energy form plus `nu` times the dissipation integral.
    Balance(EnergyForm),
    /// Instantaneous `||u||^2 + alpha^2 |Au|^2`.
    H1Level,
}

/// Streaming a priori monitor; feed it every sample with [`push`](Self::push).
pub struct AprioriMonitor {
    alpha: f64,
    nu: f64,
    max_spacing: f64,
    last: Option<(f64, [f64; 2])>,
    integrals: [f64; 2],
    checks: Vec<(Kind, BoundCheck)>,
}

/// Outcome of monitoring one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub model: ModelKind,
    pub samples: usize,
    pub checks: Vec<BoundCheck>,
}

impl MonitorReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn worst(&self) -> Option<&BoundCheck> {
        self.checks
            .iter()
            .max_by(|a, b| a.max_ratio.total_cmp(&b.max_ratio))
    }
}

impl AprioriMonitor {
    /// Monitor for `model` against `constants`. Consecutive samples may be
    /// at most `10 dt` apart.
    pub fn new(model: ModelKind, constants: &BoundConstants, dt: f64) -> Self {
        let alpha = if model.filtered() {
            constants.inputs.alpha
        } else {
            0.0
        };
        let checks = match model {
            ModelKind::Nse => vec![(
                Kind::Balance(EnergyForm::L2),
                BoundCheck::new("energy_l2", constants.k0_sq),
            )],
            ModelKind::LerayAlpha | ModelKind::SimplifiedBardina => vec![(
                Kind::Balance(EnergyForm::H1),
                BoundCheck::new("energy_h1", constants.kt0_sq),
            )],
            ModelKind::NsAlpha | ModelKind::ModifiedLerayAlpha => vec![
                (
                    Kind::Balance(EnergyForm::L2),
                    BoundCheck::new("energy_l2", constants.kt01_sq),
                ),
                (
                    Kind::H1Level,
                    BoundCheck::new("gronwall_h1", constants.kt00_sq),
                ),
                (
                    Kind::Balance(EnergyForm::H1),
                    BoundCheck::new("energy_h1", constants.kt02_sq),
                ),
            ],
        };
        Self {
            alpha,
            nu: constants.inputs.nu,
            max_spacing: 10.0 * dt * (1.0 + 1e-9),
            last: None,
            integrals: [0.0; 2],
            checks,
        }
    }

    pub fn push(&mut self, t: f64, u: &SpectralVelocity) -> Result<()> {
        let d = [
            model_dissipation(EnergyForm::L2, self.alpha, u),
            model_dissipation(EnergyForm::H1, self.alpha, u),
        ];
        if let Some((t0, d0)) = self.last {
            let h = t - t0;
            if !(h > 0.0) {
                return Err(invalid("samples", format!("time {t} does not follow {t0}")));
            }
            if h > self.max_spacing {
                return Err(invalid(
                    "samples",
                    format!(
                        "spacing {h} exceeds 10 dt = {} for quadrature",
                        self.max_spacing
                    ),
                ));
            }
            for j in 0..2 {
                self.integrals[j] += 0.5 * h * (d0[j] + d[j]);
            }
        }
        self.last = Some((t, d));
        for (kind, check) in &mut self.checks {
            let lhs = match *kind {
                Kind::Balance(form) => {
                    let j = if form == EnergyForm::L2 { 0 } else { 1 };
                    model_energy(form, self.alpha, u) + self.nu * self.integrals[j]
                }
                Kind::H1Level => model_energy(EnergyForm::H1, self.alpha, u),
            };
            check.observe(t, lhs);
        }
        Ok(())
    }

    pub fn samples_seen(&self) -> bool {
        self.last.is_some()
    }

    pub fn report(&self, model: ModelKind, samples: usize) -> MonitorReport {
        MonitorReport {
            model,
            samples,
            checks: self.checks.iter().map(|(_, c)| c.clone()).collect(),
        }
    }
}

/// Monitors a stored trajectory `(t_i, u_i)` starting at `t = 0`.
pub fn monitor_apriori(
    trajectory: &[(f64, SpectralVelocity)],
    model: ModelKind,
    constants: &BoundConstants,
    dt: f64,
) -> Result<MonitorReport> {
    let mut m = AprioriMonitor::new(model, constants, dt);
    for (t, u) in trajectory {
        m.push(*t, u)?;
    }
    Ok(m.report(model, trajectory.len()))
}
