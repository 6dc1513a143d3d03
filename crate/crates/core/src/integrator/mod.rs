//! Integrating-factor RK4 time stepping with exact-time sampling and a
//! step-halving self-convergence gate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::{ModelSystem, SimConfig};
use crate::spectral::SpectralVelocity;

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub dt: f64,
    pub max_steps: u64,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self {
            dt,
            max_steps: 50_000_000,
        })
    }

    /// `dt nu lambda_max`, the stiffness the integrating factor absorbs.
    pub fn stiffness(&self, sys: &ModelSystem) -> f64 {
        self.dt * sys.nu() * sys.lattice().max_eigenvalue()
    }
}

/// Norms recorded at a sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl NormSample {
    pub fn of(t: f64, u: &SpectralVelocity) -> Self {
        Self {
            t,
            l2: u.l2_norm(),
            h1: u.h1_norm(),
            h2: u.h2_norm(),
            h3: u.h3_norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvanceStats {
    pub steps: u64,
    pub final_time: f64,
}

/// `T k / n`, `k = 1..=n`, offset by `t0`.
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| t0 + (t1 - t0) * k as f64 / n as f64)
        .collect()
}

struct Factors {
    h: f64,
    full: Vec<f64>,
    half: Vec<f64>,
}

impl Factors {
    fn new(rates: &[f64], h: f64) -> Self {
        Self {
            h,
            full: rates.iter().map(|r| (-r * h).exp()).collect(),
            half: rates.iter().map(|r| (-r * 0.5 * h).exp()).collect(),
        }
    }
}

fn scaled(u: &SpectralVelocity, e: &[f64]) -> SpectralVelocity {
    u.map_diagonal(|i| e[i])
}

/// One Lawson RK4 step of length `f.h` from `(u, t)`.
fn step(
    sys: &mut ModelSystem,
    u: &SpectralVelocity,
    t: f64,
    f: &Factors,
) -> Result<SpectralVelocity> {
    let h = f.h;
    let a = sys.explicit_part(u, t)?;
    let mut u1 = u.clone();
    u1.axpy(0.5 * h, &a)?;
    let u1 = scaled(&u1, &f.half);
    let b = sys.explicit_part(&u1, t + 0.5 * h)?;
    let eu_half = scaled(u, &f.half);
    let mut u2 = eu_half.clone();
    u2.axpy(0.5 * h, &b)?;
    let c = sys.explicit_part(&u2, t + 0.5 * h)?;
    let eu = scaled(u, &f.full);
    let mut u3 = eu.clone();
    u3.axpy(h, &scaled(&c, &f.half))?;
    let d = sys.explicit_part(&u3, t + h)?;

    let mut bc = b;
    bc.axpy(1.0, &c)?;
    let mut out = eu;
    out.axpy(h / 6.0, &scaled(&a, &f.full))?;
    out.axpy(h / 3.0, &scaled(&bc, &f.half))?;
    out.axpy(h / 6.0, &d)?;
    Ok(out)
}

/// Integrates from `(u0, t0)` through every time in `samples` (ascending,
/// all `> t0`), calling `observer(t, u)` exactly at each of them.
///
/// Steps have length `dt` except the last one before each sample, which is
/// shortened to land on it. Returns the state at the last sample.
pub fn advance(
    sys: &mut ModelSystem,
    u0: &SpectralVelocity,
    t0: f64,
    samples: &[f64],
    stepper: &StepperConfig,
    mut observer: impl FnMut(f64, &SpectralVelocity) -> Result<()>,
) -> Result<(SpectralVelocity, AdvanceStats)> {
    let dt = stepper.dt;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {dt}")));
    }
    let rates = sys.linear_rates();
    let full = Factors::new(&rates, dt);
    let mut u = u0.clone();
    let mut t = t0;
    let mut steps = 0u64;
    for &ts in samples {
        if !(ts > t) {
            return Err(invalid(
                "samples",
                format!("sample time {ts} is not after {t}"),
            ));
        }
        let start = t;
        let mut j = 0u64;
        loop {
            let next = start + (j + 1) as f64 * dt;
            let last = next >= ts - 1e-9 * dt;
            let target = if last { ts } else { next };
            let h = target - t;
            u = if (h - dt).abs() <= 1e-12 * dt {
                step(sys, &u, t, &full)?
            } else {
                step(sys, &u, t, &Factors::new(&rates, h))?
            };
            steps += 1;
            if steps > stepper.max_steps {
                return Err(Error::StepOverflow(stepper.max_steps));
            }
            t = target;
            if !u.is_finite() {
                return Err(Error::NumericAbort {
                    step: steps,
                    time: t,
                });
            }
            if last {
                break;
            }
            j += 1;
        }
        observer(t, &u)?;
    }
    Ok((
        u,
        AdvanceStats {
            steps,
            final_time: t,
        },
    ))
}

/// Runs `cfg` from its initial condition and returns the norms at each
/// configured sample time (plus `t = 0`).
pub fn simulate_norms(cfg: &SimConfig) -> Result<Vec<NormSample>> {
    let mut sys = ModelSystem::new(cfg)?;
    let u0 = cfg.initial_state(cfg.lattice()?);
    let mut out = vec![NormSample::of(0.0, &u0)];
    advance(
        &mut sys,
        &u0,
        0.0,
        &cfg.sample_times(),
        &StepperConfig::new(cfg.dt_time)?,
        |t, u| {
            out.push(NormSample::of(t, u));
            Ok(())
        },
    )?;
    Ok(out)
}

/// Outcome of a step-halving comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    pub dt_used: f64,
    /// `sup_t |u_dt(t) - u_{dt/2}(t)|` over the sample grid.
    pub error_estimate: f64,
    /// `sup_t |u_{dt/2}(t)|`.
    pub solution_scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Default relative temporal tolerance.
pub const TEMPORAL_TOL: f64 = 1e-9;

/// Sup-in-time L2 difference between runs at `dt` and `dt / 2` of the
/// system produced by `make`.
pub fn richardson_compare(
    mut make: impl FnMut() -> Result<ModelSystem>,
    u0: &SpectralVelocity,
    samples: &[f64],
    dt: f64,
    rel_tol: f64,
) -> Result<RichardsonReport> {
    let run = |sys: &mut ModelSystem, dt: f64| -> Result<Vec<SpectralVelocity>> {
        let mut states = Vec::with_capacity(samples.len());
        advance(sys, u0, 0.0, samples, &StepperConfig::new(dt)?, |_, u| {
            states.push(u.clone());
            Ok(())
        })?;
        Ok(states)
    };
    let coarse = run(&mut make()?, dt)?;
    let fine = run(&mut make()?, 0.5 * dt)?;
    let mut err = 0.0f64;
    let mut scale = u0.l2_norm();
    for (a, b) in coarse.iter().zip(&fine) {
        err = err.max(a.sub(b)?.l2_norm());
        scale = scale.max(b.l2_norm());
    }
    let tolerance = rel_tol * scale;
    Ok(RichardsonReport {
        dt_used: dt,
        error_estimate: err,
        solution_scale: scale,
        tolerance,
        pass: err <= tolerance,
    })
}

/// Step-halving gate for a configuration at its own `dt_time`.
pub fn richardson_check(cfg: &SimConfig) -> Result<RichardsonReport> {
    richardson_check_tol(cfg, TEMPORAL_TOL)
}

pub fn richardson_check_tol(cfg: &SimConfig, rel_tol: f64) -> Result<RichardsonReport> {
    let u0 = cfg.initial_state(cfg.lattice()?);
    richardson_compare(
        || ModelSystem::new(cfg),
        &u0,
        &cfg.sample_times(),
        cfg.dt_time,
        rel_tol,
    )
}
