use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_rate, RateFit, RateForm};
use crate::bounds::{
    combined_hypothesis, compute_constants, default_calibration, monitor_grid, monitored_advance,
    BoundConstants, BoundInputs, BoundReport, Calibration,
};
use crate::error::{invalid, Error, Result};
use crate::integrator::{advance, RichardsonReport, StepperConfig, TEMPORAL_TOL};
use crate::models::{ModelKind, ModelSystem, SimConfig};
use crate::nonlinear::Padding;
use crate::spectral::{is_shell, next_shell, weyl_constant, Cutoff, Lattice, SpectralVelocity};

/// Seed of the frozen calibration battery.
pub const CALIBRATION_SEED: u64 = 20_240_601;

/// Errors below this fraction of the solution scale count as exactly zero.
pub const NOISE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Model versus Navier-Stokes as `alpha` shrinks.
    Alpha,
    /// Galerkin truncation versus a high-cutoff Leray-alpha reference.
    Galerkin,
    /// Truncated Leray-alpha with `alpha` tied to the cutoff versus
    /// Navier-Stokes.
    Combined,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Alpha => "alpha",
            SweepKind::Galerkin => "galerkin",
            SweepKind::Combined => "combined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [SweepKind::Alpha, SweepKind::Galerkin, SweepKind::Combined]
            .into_iter()
            .find(|k| k.name() == s)
    }

    /// Abscissa of the convergence fit.
    pub fn form(&self) -> RateForm {
        match self {
            SweepKind::Alpha => RateForm::AlphaLog,
            SweepKind::Galerkin => RateForm::InverseEigenvalueLog,
            SweepKind::Combined => RateForm::Combined,
        }
    }

    /// Smallest accepted fitted order.
    pub fn required_order(&self) -> f64 {
        match self {
            SweepKind::Alpha => 0.9,
            SweepKind::Galerkin | SweepKind::Combined => 1.0,
        }
    }
}

fn default_factor() -> u32 {
    4
}

fn yes() -> bool {
    true
}

/// One convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Shared physics. For alpha sweeps `alpha_length` is ignored; for
    /// Galerkin sweeps it is the fixed filter width.
    pub base: SimConfig,
    /// `alpha` values (alpha sweeps) or cutoff shells `|k|^2`. Absent means
    /// the kind's default list.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    /// Models to sweep; absent means all four alpha-models for alpha sweeps
    /// and Leray-alpha otherwise.
    #[serde(default)]
    pub models: Option<Vec<ModelKind>>,
    /// Reference refinement: lattice multiplier for alpha sweeps, cutoff
    /// multiplier (in `|k|^2`) otherwise.
    #[serde(default = "default_factor")]
    pub reference_factor: u32,
    /// Frozen constants; absent means the standard battery calibration.
    #[serde(default)]
    pub calibration: Option<Calibration>,
    /// Step-halving check on every run.
    #[serde(default = "yes")]
    pub temporal_gate: bool,
    /// Re-run cutoff references at twice the cutoff and require < 1% change.
    #[serde(default = "yes")]
    pub proxy_check: bool,
}

impl SweepSpec {
    pub fn new(kind: SweepKind, base: SimConfig) -> Self {
        Self {
            kind,
            base,
            values: None,
            models: None,
            reference_factor: default_factor(),
            calibration: None,
            temporal_gate: true,
            proxy_check: true,
        }
    }

    /// Default physics with the kind's default values; Galerkin sweeps use
    /// `alpha = 1/8`.
    pub fn default_for(kind: SweepKind) -> Self {
        let alpha = if kind == SweepKind::Galerkin {
            0.125
        } else {
            0.0
        };
        Self::new(
            kind,
            SimConfig::default_physics(ModelKind::LerayAlpha, alpha),
        )
    }

    pub fn models(&self) -> Vec<ModelKind> {
        match &self.models {
            Some(m) => m.clone(),
            None if self.kind == SweepKind::Alpha => ModelKind::ALPHA_MODELS.to_vec(),
            None => vec![ModelKind::LerayAlpha],
        }
    }

    /// Swept values in refinement order (decreasing `alpha`, increasing
    /// cutoff).
    pub fn values(&self) -> Vec<f64> {
        let mut v = match &self.values {
            Some(v) => v.clone(),
            None => match self.kind {
                SweepKind::Alpha => {
                    let l = self.base.box_length;
                    (0..4).map(|j| l / (8.0 * PI) / f64::powi(2.0, j)).collect()
                }
                _ => vec![4.0, 8.0, 16.0, 32.0],
            },
        };
        match self.kind {
            SweepKind::Alpha => v.sort_by(|a, b| b.total_cmp(a)),
            _ => v.sort_by(|a, b| a.total_cmp(b)),
        }
        v
    }

    fn shells(&self) -> Vec<u32> {
        self.values().iter().map(|&v| v as u32).collect()
    }

    /// Smallest shell at or above `reference_factor` times the largest swept
    /// cutoff.
    pub fn reference_shell(&self) -> u32 {
        let top = self.shells().into_iter().max().unwrap_or(1);
        let want = top * self.reference_factor;
        if is_shell(want) {
            want
        } else {
            next_shell(want)
        }
    }

    pub fn proxy_shell(&self) -> u32 {
        let want = 2 * self.reference_shell();
        if is_shell(want) {
            want
        } else {
            next_shell(want)
        }
    }

    /// Configuration errors; hypothesis gates are checked when running.
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if matches!(&self.values, Some(v) if v.is_empty()) {
            return Err(invalid("values", "the value list is empty"));
        }
        if self.reference_factor < 1 {
            return Err(invalid("reference_factor", "must be at least 1"));
        }
        let models = self.models();
        if models.is_empty() {
            return Err(invalid("models", "the model list is empty"));
        }
        if models.contains(&ModelKind::Nse) {
            return Err(invalid(
                "models",
                "the Navier-Stokes system is the reference, not a swept model",
            ));
        }
        match self.kind {
            SweepKind::Alpha => {
                for a in self.values() {
                    if !(a.is_finite() && a > 0.0) {
                        return Err(invalid(
                            "values",
                            format!("alpha must be positive, got {a}"),
                        ));
                    }
                }
            }
            SweepKind::Galerkin | SweepKind::Combined => {
                if self.kind == SweepKind::Combined && models != [ModelKind::LerayAlpha] {
                    return Err(invalid(
                        "models",
                        "the combined estimate is stated for leray_alpha only",
                    ));
                }
                let kmax = (self.base.resolution / 2 - 1) as u32;
                for v in self.values() {
                    if !(v.fract() == 0.0 && v >= 1.0 && is_shell(v as u32)) {
                        return Err(invalid(
                            "values",
                            format!("{v} is not a shell boundary |k|^2"),
                        ));
                    }
                }
                let top = if self.proxy_check {
                    self.proxy_shell()
                } else {
                    self.reference_shell()
                };
                if top > kmax * kmax {
                    return Err(invalid(
                        "base.resolution",
                        format!(
                            "reference shell {top} does not fit a lattice with |k_i| <= {kmax}"
                        ),
                    ));
                }
                if self.base.galerkin_cutoff_k2.is_some() {
                    return Err(invalid(
                        "base.galerkin_cutoff_k2",
                        "cutoffs are set by the sweep",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One swept run compared with its reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub model: ModelKind,
    pub value: f64,
    pub alpha: f64,
    pub cutoff_k2: Option<u32>,
    pub lambda_m1: Option<f64>,
    pub mode_count: Option<usize>,
    /// Grid maximum of `|u_ref(t) - u(t)|`.
    pub error: f64,
    pub error_time: f64,
    /// Theorem bound on `error^2`.
    pub bound_sq: f64,
    /// `error^2 / bound_sq`.
    pub ratio: f64,
    pub fit_x: f64,
    pub temporal: Option<RichardsonReport>,
    pub bounds: BoundReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProxyCheck {
    pub cutoff_k2: u32,
    /// Largest `|E' - E| / E` over the sweep.
    pub max_relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceInfo {
    pub model: ModelKind,
    pub resolution: usize,
    pub cutoff_k2: Option<u32>,
    pub alpha: f64,
    pub temporal: Option<RichardsonReport>,
    pub proxy: Option<ProxyCheck>,
}

/// Results for one model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Curve {
    pub model: ModelKind,
    pub points: Vec<SweepPoint>,
    /// Fit of the error (squared error for combined sweeps).
    pub fit: Option<RateFit>,
    /// Same data against the mode-count variable (combined sweeps).
    pub mode_fit: Option<RateFit>,
    pub fit_note: Option<String>,
    pub monotone: bool,
    pub bound_pass: bool,
    pub order_pass: bool,
    pub monitors_pass: bool,
    pub temporal_pass: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub kind: SweepKind,
    pub spec: SweepSpec,
    pub calibration: Calibration,
    pub form: RateForm,
    pub required_order: f64,
    pub reference: ReferenceInfo,
    pub curves: Vec<Curve>,
    pub pass: bool,
}

/// States at `samples` (not including `t = 0`), stepping on the same grid
/// as a monitored run.
fn plain_trajectory(
    sys: &mut ModelSystem,
    u0: &SpectralVelocity,
    dt: f64,
    samples: &[f64],
) -> Result<Vec<SpectralVelocity>> {
    let grid = monitor_grid(samples.last().copied().unwrap_or(0.0), dt, samples);
    let times: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let mut out = Vec::with_capacity(samples.len());
    let mut idx = 0;
    advance(sys, u0, 0.0, &times, &StepperConfig::new(dt)?, |_, u| {
        if grid[idx].1 {
            out.push(u.clone());
        }
        idx += 1;
        Ok(())
    })?;
    Ok(out)
}

fn compare(
    coarse: &[SpectralVelocity],
    fine: &[SpectralVelocity],
    u0: &SpectralVelocity,
    dt: f64,
) -> Result<RichardsonReport> {
    let mut err = 0.0f64;
    let mut scale = u0.l2_norm();
    for (a, b) in coarse.iter().zip(fine) {
        err = err.max(a.sub(b)?.l2_norm());
        scale = scale.max(b.l2_norm());
    }
    let tolerance = TEMPORAL_TOL * scale;
    Ok(RichardsonReport {
        dt_used: dt,
        error_estimate: err,
        solution_scale: scale,
        tolerance,
        pass: err <= tolerance,
    })
}

/// Smallest lattice of side `l` containing every mode with `|k|^2 <= k2`.
fn lattice_for_shell(l: f64, k2: u32) -> Result<Arc<Lattice>> {
    let kmax = (k2 as f64).sqrt().floor() as usize;
    Ok(Arc::new(Lattice::new(l, 2 * (kmax + 1))?))
}

struct Case {
    kind: ModelKind,
    alpha: f64,
    cutoff: Cutoff,
    lattice: Arc<Lattice>,
}

struct Shared {
    nu: f64,
    dt: f64,
    samples: Vec<f64>,
    u0: SpectralVelocity,
    forcing: SpectralVelocity,
    gate: bool,
}

impl Shared {
    fn system(&self, c: &Case) -> Result<(ModelSystem, SpectralVelocity)> {
        let f = self.forcing.resample(Arc::clone(&c.lattice))?;
        let u0 = self
            .u0
            .resample(Arc::clone(&c.lattice))?
            .galerkin_project(&c.cutoff);
        Ok((
            ModelSystem::from_parts(c.kind, self.nu, c.alpha, c.cutoff, f, Padding::ThreeHalves),
            u0,
        ))
    }

    /// Reference states and their temporal check.
    fn reference(&self, c: &Case) -> Result<(Vec<SpectralVelocity>, Option<RichardsonReport>)> {
        let (run, fine) = rayon::join(
            || -> Result<Vec<SpectralVelocity>> {
                let (mut sys, u0) = self.system(c)?;
                plain_trajectory(&mut sys, &u0, self.dt, &self.samples)
            },
            || -> Result<Option<Vec<SpectralVelocity>>> {
                if !self.gate {
                    return Ok(None);
                }
                let (mut sys, u0) = self.system(c)?;
                plain_trajectory(&mut sys, &u0, 0.5 * self.dt, &self.samples).map(Some)
            },
        );
        let run = run?;
        let temporal = match fine? {
            Some(f) => Some(compare(
                &run,
                &f,
                &self.u0.resample(Arc::clone(&c.lattice))?,
                self.dt,
            )?),
            None => None,
        };
        Ok((run, temporal))
    }

    /// Monitored run of `c`; returns the states and bound report.
    fn monitored(
        &self,
        c: &Case,
        constants: &BoundConstants,
    ) -> Result<(Vec<SpectralVelocity>, BoundReport, Option<RichardsonReport>)> {
        let (mut sys, u0) = self.system(c)?;
        let mut states = Vec::with_capacity(self.samples.len());
        let (_, _, rep) =
            monitored_advance(&mut sys, &u0, constants, self.dt, &self.samples, |t, u| {
                if t > 0.0 {
                    states.push(u.clone());
                }
                Ok(())
            })?;
        let temporal = if self.gate {
            let (mut sys, u0) = self.system(c)?;
            let fine = plain_trajectory(&mut sys, &u0, 0.5 * self.dt, &self.samples)?;
            Some(compare(&states, &fine, &u0, self.dt)?)
        } else {
            None
        };
        Ok((states, rep, temporal))
    }
}

/// Reference states moved to the comparison lattice, with the energy that
/// falls outside it.
struct Reference {
    states: Vec<SpectralVelocity>,
    tails: Vec<f64>,
}

impl Reference {
    fn new(states: &[SpectralVelocity], lattice: &Arc<Lattice>) -> Result<Self> {
        Ok(Self {
            tails: states.iter().map(|s| s.tail_l2_sq(lattice)).collect(),
            states: states
                .iter()
                .map(|s| s.resample(Arc::clone(lattice)))
                .collect::<Result<_>>()?,
        })
    }

    /// `(max_t |ref - u|, argmax index)`.
    fn error(&self, states: &[SpectralVelocity]) -> Result<(f64, usize)> {
        let mut best = (0.0f64, 0usize);
        for (j, (s, r)) in states.iter().zip(&self.states).enumerate() {
            let lat = Arc::clone(r.lattice());
            let d = r.sub(&s.resample(lat)?)?.l2_norm().powi(2) + self.tails[j];
            let e = d.sqrt();
            if e > best.0 {
                best = (e, j);
            }
        }
        Ok(best)
    }
}

fn bound_inputs(shared: &Shared, alpha: f64, horizon: f64) -> BoundInputs {
    BoundInputs::from_fields(shared.nu, alpha, horizon, &shared.u0, &shared.forcing)
}

/// Runs a sweep on the global rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let cal = match spec.calibration {
        Some(c) => c,
        None => default_calibration(CALIBRATION_SEED)?.calibration,
    };
    let base = &spec.base;
    let base_lat = base.lattice()?;
    let shared = Shared {
        nu: base.nu_viscosity,
        dt: base.dt_time,
        samples: base.sample_times(),
        u0: base.initial_state(Arc::clone(&base_lat)),
        forcing: base.forcing_field(Arc::clone(&base_lat)),
        gate: spec.temporal_gate,
    };
    let horizon = base.horizon_time;
    let l = base.box_length;
    let lambda1 = base_lat.lambda1();
    let c0 = Some(weyl_constant(&base_lat));
    let models = spec.models();
    let values = spec.values();

    // Reference and comparison lattice.
    let (ref_case, cmp_lat, ref_cutoff) = match spec.kind {
        SweepKind::Alpha => {
            let lat = Arc::new(Lattice::new(
                l,
                base.resolution * spec.reference_factor as usize,
            )?);
            let case = Case {
                kind: ModelKind::Nse,
                alpha: 0.0,
                cutoff: base.cutoff(),
                lattice: lat,
            };
            (case, Arc::clone(&base_lat), base.galerkin_cutoff_k2)
        }
        SweepKind::Galerkin | SweepKind::Combined => {
            let k2 = spec.reference_shell();
            let lat = lattice_for_shell(l, k2)?;
            let (kind, alpha) = if spec.kind == SweepKind::Galerkin {
                (ModelKind::LerayAlpha, base.alpha_length)
            } else {
                (ModelKind::Nse, 0.0)
            };
            let case = Case {
                kind,
                alpha,
                cutoff: Cutoff::Shell(k2),
                lattice: Arc::clone(&lat),
            };
            (case, lat, Some(k2))
        }
    };

    // Hypothesis gates and constants for every point before any compute.
    struct Job {
        model: ModelKind,
        value: f64,
        case: Case,
        constants: BoundConstants,
        bound_sq: f64,
        fit_x: f64,
        lambda_m1: Option<f64>,
        mode_count: Option<usize>,
    }
    let mut jobs = Vec::new();
    for &model in &models {
        for &v in &values {
            let job = match spec.kind {
                SweepKind::Alpha => {
                    let inputs = bound_inputs(&shared, v, horizon);
                    let constants = compute_constants(&inputs, &cal, c0)?;
                    let bound_sq = match model {
                        ModelKind::NsAlpha | ModelKind::ModifiedLerayAlpha => {
                            constants.eps_tilde_sq
                        }
                        _ => constants.eps_sq,
                    };
                    Job {
                        model,
                        value: v,
                        case: Case {
                            kind: model,
                            alpha: v,
                            cutoff: base.cutoff(),
                            lattice: Arc::clone(&base_lat),
                        },
                        constants,
                        bound_sq,
                        fit_x: spec.kind.form().of_alpha(v, l),
                        lambda_m1: None,
                        mode_count: None,
                    }
                }
                SweepKind::Galerkin | SweepKind::Combined => {
                    let k2 = v as u32;
                    let cutoff = Cutoff::Shell(k2);
                    let lm1 = cutoff.next_eigenvalue(&base_lat);
                    let alpha = if spec.kind == SweepKind::Galerkin {
                        base.alpha_length
                    } else {
                        2.0 * PI / (lm1 * l)
                    };
                    if spec.kind == SweepKind::Combined {
                        let h = combined_hypothesis(alpha, lm1, l);
                        if !h.holds {
                            return Err(Error::Hypothesis(format!("{}: {}", h.name, h.detail)));
                        }
                    }
                    let inputs =
                        bound_inputs(&shared, alpha, horizon).with_cutoff(&base_lat, &cutoff);
                    let constants = compute_constants(&inputs, &cal, c0)?;
                    let e_sq = constants.galerkin.map(|g| g.e_sq).unwrap_or(f64::NAN);
                    let bound_sq = if spec.kind == SweepKind::Galerkin {
                        e_sq
                    } else {
                        2.0 * (constants.eps_sq + e_sq)
                    };
                    Job {
                        model,
                        value: v,
                        case: Case {
                            kind: model,
                            alpha,
                            cutoff,
                            lattice: lattice_for_shell(l, k2)?,
                        },
                        constants,
                        bound_sq,
                        fit_x: spec.kind.form().of_eigenvalue(lm1, lambda1),
                        lambda_m1: Some(lm1),
                        mode_count: Some(cutoff.mode_count(&base_lat)),
                    }
                }
            };
            jobs.push(job);
        }
    }

    let (ref_states, ref_temporal) = shared.reference(&ref_case)?;
    let reference = Reference::new(&ref_states, &cmp_lat)?;

    let runs: Vec<(Vec<SpectralVelocity>, BoundReport, Option<RichardsonReport>)> = jobs
        .par_iter()
        .map(|j| shared.monitored(&j.case, &j.constants))
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(jobs.len());
    for (j, (states, rep, temporal)) in jobs.iter().zip(&runs) {
        let (error, at) = reference.error(states)?;
        points.push(SweepPoint {
            model: j.model,
            value: j.value,
            alpha: j.case.alpha,
            cutoff_k2: match j.case.cutoff {
                Cutoff::Shell(k) => Some(k),
                Cutoff::Full => None,
            },
            lambda_m1: j.lambda_m1,
            mode_count: j.mode_count,
            error,
            error_time: shared.samples.get(at).copied().unwrap_or(0.0),
            bound_sq: j.bound_sq,
            ratio: error * error / j.bound_sq,
            fit_x: j.fit_x,
            temporal: *temporal,
            bounds: rep.clone(),
        });
    }

    // Proxy validity of a cutoff reference.
    let proxy = if spec.proxy_check && spec.kind != SweepKind::Alpha {
        let k2 = spec.proxy_shell();
        let lat = lattice_for_shell(l, k2)?;
        let case = Case {
            kind: ref_case.kind,
            alpha: ref_case.alpha,
            cutoff: Cutoff::Shell(k2),
            lattice: Arc::clone(&lat),
        };
        let (mut sys, u0) = shared.system(&case)?;
        let states = plain_trajectory(&mut sys, &u0, shared.dt, &shared.samples)?;
        let alt = Reference::new(&states, &lat)?;
        let mut worst = 0.0f64;
        for (p, (s, _, _)) in points.iter().zip(&runs) {
            let (e2, _) = alt.error(s)?;
            if p.error > 0.0 {
                worst = worst.max((e2 - p.error).abs() / p.error);
            }
        }
        Some(ProxyCheck {
            cutoff_k2: k2,
            max_relative_change: worst,
            pass: worst < 0.01,
        })
    } else {
        None
    };

    let scale = shared.u0.l2_norm();
    let mut curves = Vec::new();
    for &model in &models {
        let pts: Vec<SweepPoint> = points
            .iter()
            .filter(|p| p.model == model)
            .cloned()
            .collect();
        curves.push(assess(spec.kind, model, pts, scale));
    }
    let pass = curves.iter().all(|c| c.pass)
        && ref_temporal.is_none_or(|r| r.pass)
        && proxy.as_ref().is_none_or(|p| p.pass);
    Ok(SweepOutcome {
        kind: spec.kind,
        spec: spec.clone(),
        calibration: cal,
        form: spec.kind.form(),
        required_order: spec.kind.required_order(),
        reference: ReferenceInfo {
            model: ref_case.kind,
            resolution: ref_case.lattice.resolution(),
            cutoff_k2: ref_cutoff,
            alpha: ref_case.alpha,
            temporal: ref_temporal,
            proxy,
        },
        curves,
        pass,
    })
}

/// Monotonicity, bound, order, monitor and temporal verdicts for one curve.
fn assess(kind: SweepKind, model: ModelKind, points: Vec<SweepPoint>, scale: f64) -> Curve {
    let floor = NOISE_FLOOR * scale;
    let eff: Vec<f64> = points
        .iter()
        .map(|p| if p.error <= floor { 0.0 } else { p.error })
        .collect();
    let monotone = eff.windows(2).all(|w| match kind {
        SweepKind::Galerkin => w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0),
        _ => w[1] <= w[0],
    });
    let bound_pass = points.iter().all(|p| p.error * p.error <= p.bound_sq);
    let squared = kind == SweepKind::Combined;
    let data: Vec<(f64, f64)> = points
        .iter()
        .zip(&eff)
        .map(|(p, &e)| (p.fit_x, if squared { e * e } else { e }))
        .collect();
    let required = kind.required_order();
    let (fit, fit_note) = match fit_rate(&data, kind.form()) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mode_fit = if squared {
        let md: Vec<(f64, f64)> = points
            .iter()
            .zip(&data)
            .map(|(p, d)| (RateForm::of_mode_count(p.mode_count.unwrap_or(0)), d.1))
            .collect();
        fit_rate(&md, RateForm::ModeCount).ok()
    } else {
        None
    };
    let all_zero = eff.iter().all(|&e| e == 0.0);
    let order_pass = match &fit {
        Some(f) => f.order >= required && mode_fit.as_ref().is_none_or(|m| m.order >= required),
        None => all_zero,
    };
    let monitors_pass = points.iter().all(|p| p.bounds.pass);
    let temporal_pass = points.iter().all(|p| p.temporal.is_none_or(|r| r.pass));
    let pass = monotone && bound_pass && order_pass && monitors_pass && temporal_pass;
    Curve {
        model,
        points,
        fit,
        mode_fit,
        fit_note,
        monotone,
        bound_pass,
        order_pass,
        monitors_pass,
        temporal_pass,
        pass,
    }
}
