use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use alphaflow::bounds::{
    bg_battery, default_calibration, filter_defect_check, monitored_run, BgBattery, BoundReport,
    Calibration, FilterDefectReport,
};
use alphaflow::experiments::{
    run_sweep, sweep_csv, sweep_svg, SweepKind, SweepOutcome, SweepSpec, CALIBRATION_SEED,
};
use alphaflow::integrator::{advance, StepperConfig};
use alphaflow::models::{ModelSystem, SimConfig};
use alphaflow::nonlinear::{identity_suite_with, IdentityReport, Padding, BATTERY_ENVELOPE};
use alphaflow::spectral::{Lattice, SpectralVelocity};
use alphaflow::Error;

use crate::manifest::RunManifest;
use crate::Common;

pub const TRAJECTORY_CSV_VERSION: &str = "# alphaflow trajectory csv v1";
pub const TRAJECTORY_CSV_HEADER: &str = "t,l2_norm,h1_norm,h2_norm,model_energy,balance_residual";

/// Largest relative change of an empirical constant between `N` and `2N`.
pub const STABILITY_TOL: f64 = 0.2;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Assertion(String),
    Io(std::io::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::InvalidLattice(_)
                | Error::InvalidParameter { .. }
                | Error::NotAShellBoundary(_)
                | Error::SplitsShell { .. }
                | Error::Json(_)
                | Error::InsufficientData(_)
                | Error::ModeBudgetExceeded { .. } => 2,
                Error::Hypothesis(_) => 3,
                Error::NumericAbort { .. } | Error::StepOverflow(_) => 4,
                Error::BoundViolation { .. } => 5,
                _ => 1,
            },
            Failure::Assertion(_) => 5,
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Assertion(m) => write!(f, "assertion failure: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn read_config<T: DeserializeOwned>(path: &Path) -> CmdResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn pool(n: usize) -> CmdResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Failure::Usage(format!("--parallel: {e}")))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Runs `body` between the two manifest writes, recording its outcome.
fn with_manifest<T>(
    manifest: &mut RunManifest,
    body: impl FnOnce(&mut RunManifest) -> CmdResult<T>,
) -> CmdResult<T> {
    manifest.start()?;
    let out = body(manifest);
    match &out {
        Ok(_) => manifest.finish(0, None)?,
        Err(f) => manifest.finish(f.code() as i32, Some(f.to_string()))?,
    }
    out
}

fn default_true() -> bool {
    true
}

/// Configuration file of `run`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub simulation: SimConfig,
    /// Evaluate the a priori estimates along the trajectory.
    #[serde(default = "default_true")]
    pub check_bounds: bool,
    /// Frozen inequality constants; absent means the seeded default battery.
    #[serde(default)]
    pub calibration: Option<Calibration>,
}

fn calibration_or_default(c: Option<Calibration>) -> CmdResult<Calibration> {
    match c {
        Some(c) => Ok(c),
        None => Ok(default_calibration(CALIBRATION_SEED)?.calibration),
    }
}

pub fn run(common: &Common) -> CmdResult<()> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Failure::Usage("run requires --config".into()))?;
    let mut file: RunFile = read_config(path)?;
    if let Some(s) = common.seed {
        file.simulation.seed = s;
    }
    let cfg = file.simulation.clone();
    cfg.validate()?;
    fs::create_dir_all(&common.out)?;
    let pool = pool(common.parallel)?;
    let mut outputs = vec!["trajectory.csv"];
    if file.check_bounds {
        outputs.push("bounds.json");
    }
    let mut manifest = RunManifest::new(
        "run",
        &common.out,
        serde_json::to_value(&file).expect("serializable"),
        cfg.seed,
        &outputs,
        pool.current_num_threads(),
    );
    with_manifest(&mut manifest, |m| {
        pool.install(|| {
            let mut diag = ModelSystem::new(&cfg)?;
            let mut csv = format!(
                "{TRAJECTORY_CSV_VERSION} model={}\n{TRAJECTORY_CSV_HEADER}\n",
                cfg.model
            );
            let mut record = |t: f64, u: &SpectralVelocity| -> alphaflow::Result<()> {
                let e = diag.energy_terms(u, t)?;
                csv.push_str(&format!(
                    "{t:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    u.l2_norm(),
                    u.h1_norm(),
                    u.h2_norm(),
                    e.model_energy,
                    e.balance_residual
                ));
                Ok(())
            };
            let report: Option<BoundReport>;
            if file.check_bounds {
                let cal = calibration_or_default(file.calibration)?;
                let (_, stats, rep) = monitored_run(&cfg, &cal, &mut record)?;
                m.steps = Some(stats.steps);
                report = Some(rep);
            } else {
                let lat = cfg.lattice()?;
                let u0 = cfg.initial_state(lat);
                let mut sys = ModelSystem::new(&cfg)?;
                record(0.0, &u0)?;
                let (_, stats) = advance(
                    &mut sys,
                    &u0,
                    0.0,
                    &cfg.sample_times(),
                    &StepperConfig::new(cfg.dt_time)?,
                    &mut record,
                )?;
                m.steps = Some(stats.steps);
                report = None;
            }
            fs::write(common.out.join("trajectory.csv"), csv)?;
            if let Some(rep) = report {
                fs::write(common.out.join("bounds.json"), json(&rep))?;
                if !rep.pass {
                    let worst = rep
                        .monitor
                        .worst()
                        .map(|c| format!("{} ratio {:.6e}", c.name, c.max_ratio));
                    return Err(Failure::Assertion(format!(
                        "a priori bound violated ({})",
                        worst.unwrap_or_else(|| "sup-norm bound".into())
                    )));
                }
            }
            Ok(())
        })
    })
}

pub fn sweep(common: &Common, kind: SweepKind, svg: bool) -> CmdResult<()> {
    let mut spec = match &common.config {
        Some(p) => read_config::<SweepSpec>(p)?,
        None => SweepSpec::default_for(kind),
    };
    if spec.kind != kind {
        return Err(Failure::Usage(format!(
            "configuration describes a {} sweep, command asked for {}",
            spec.kind.name(),
            kind.name()
        )));
    }
    if let Some(s) = common.seed {
        spec.base.seed = s;
    }
    spec.validate()?;
    fs::create_dir_all(&common.out)?;
    let pool = pool(common.parallel)?;
    let mut outputs = vec!["sweep.csv", "sweep.json"];
    if svg {
        outputs.push("sweep.svg");
    }
    let mut manifest = RunManifest::new(
        &format!("sweep {}", kind.name()),
        &common.out,
        serde_json::to_value(&spec).expect("serializable"),
        spec.base.seed,
        &outputs,
        pool.current_num_threads(),
    );
    with_manifest(&mut manifest, |_| {
        let out: SweepOutcome = pool.install(|| run_sweep(&spec))?;
        fs::write(common.out.join("sweep.csv"), sweep_csv(&out))?;
        fs::write(common.out.join("sweep.json"), json(&out))?;
        if svg {
            if let Some(s) = sweep_svg(&out) {
                fs::write(common.out.join("sweep.svg"), s)?;
            }
        }
        for c in &out.curves {
            let order = c
                .fit
                .as_ref()
                .map_or("n/a".to_string(), |f| format!("{:.3}", f.order));
            println!(
                "{}: order {order}, bound {}, pass {}",
                c.model, c.bound_pass, c.pass
            );
        }
        if out.pass {
            Ok(())
        } else {
            let failed: Vec<String> = out
                .curves
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.model.to_string())
                .collect();
            Err(Failure::Assertion(format!(
                "sweep gates failed for {}",
                failed.join(", ")
            )))
        }
    })
}

fn default_box() -> f64 {
    TAU
}
fn default_resolution() -> usize {
    32
}
fn default_trials() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}
fn default_fields() -> usize {
    200
}
fn default_pairs() -> usize {
    5
}
fn default_alphas() -> Vec<f64> {
    vec![0.05, 0.125, 0.25, 0.5, 1.0]
}

/// Configuration file of `identities`; every field has a default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_box")]
    pub box_length: f64,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Fields in each logarithmic sup-norm battery.
    #[serde(default = "default_fields")]
    pub bg_fields: usize,
    /// Random pairs per filter-defect check.
    #[serde(default = "default_pairs")]
    pub filter_pairs: usize,
    #[serde(default = "default_alphas")]
    pub filter_alphas: Vec<f64>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stability {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub pass: bool,
}

impl Stability {
    fn new(name: &str, coarse: f64, fine: f64) -> Self {
        let rel = (fine - coarse).abs() / coarse.abs().max(f64::MIN_POSITIVE);
        Stability {
            name: name.into(),
            coarse,
            fine,
            relative_change: rel,
            pass: coarse.is_finite() && fine.is_finite() && rel <= STABILITY_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitiesReport {
    pub config: IdentitiesConfig,
    pub padding: Padding,
    pub suite: IdentityReport,
    pub suite_refined: IdentityReport,
    pub filter_defect: Vec<FilterDefectReport>,
    pub sup_norm: [BgBattery; 2],
    pub stability: Vec<Stability>,
    pub pass: bool,
}

pub fn identities(common: &Common, aliased: bool) -> CmdResult<()> {
    let mut cfg = match &common.config {
        Some(p) => read_config::<IdentitiesConfig>(p)?,
        None => IdentitiesConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    for (name, v) in [
        ("trials", cfg.trials),
        ("bg_fields", cfg.bg_fields),
        ("filter_pairs", cfg.filter_pairs),
    ] {
        if v == 0 {
            return Err(Failure::Usage(format!("{name} must be at least 1")));
        }
    }
    let coarse = Arc::new(Lattice::new(cfg.box_length, cfg.resolution)?);
    let fine = Arc::new(Lattice::new(cfg.box_length, 2 * cfg.resolution)?);
    fs::create_dir_all(&common.out)?;
    let pool = pool(common.parallel)?;
    let mut manifest = RunManifest::new(
        "identities",
        &common.out,
        serde_json::to_value(&cfg).expect("serializable"),
        cfg.seed,
        &["identities.json"],
        pool.current_num_threads(),
    );
    let padding = if aliased {
        Padding::None
    } else {
        Padding::ThreeHalves
    };
    with_manifest(&mut manifest, |_| {
        pool.install(|| {
            let suite = identity_suite_with(Arc::clone(&coarse), cfg.trials, cfg.seed, padding)?;
            let suite_refined =
                identity_suite_with(Arc::clone(&fine), cfg.trials, cfg.seed, padding)?;
            let filter_defect = cfg
                .filter_alphas
                .iter()
                .map(|&a| filter_defect_check(Arc::clone(&coarse), a, cfg.filter_pairs, cfg.seed))
                .collect::<alphaflow::Result<Vec<_>>>()?;
            let sup_norm = [
                bg_battery(
                    Arc::clone(&coarse),
                    cfg.bg_fields,
                    cfg.seed,
                    BATTERY_ENVELOPE,
                )?,
                bg_battery(Arc::clone(&fine), cfg.bg_fields, cfg.seed, BATTERY_ENVELOPE)?,
            ];
            let mut stability: Vec<Stability> = suite
                .constants
                .iter()
                .zip(&suite_refined.constants)
                .map(|(a, b)| Stability::new(&a.name, a.max_ratio, b.max_ratio))
                .collect();
            stability.push(Stability::new(
                "brezis_gallouet",
                sup_norm[0].max_ratio,
                sup_norm[1].max_ratio,
            ));

            let identities_ok = suite.all_pass() && suite_refined.all_pass();
            let filter_ok = filter_defect.iter().all(|r| r.bound_holds);
            let stable = stability.iter().all(|s| s.pass);
            let report = IdentitiesReport {
                config: cfg.clone(),
                padding,
                suite,
                suite_refined,
                filter_defect,
                sup_norm,
                stability,
                pass: identities_ok && filter_ok && stable,
            };
            fs::write(common.out.join("identities.json"), json(&report))?;
            for c in report
                .suite
                .identities
                .iter()
                .chain(&report.suite_refined.identities)
            {
                println!(
                    "{:<26} {:.3e} {}",
                    c.name,
                    c.max_rel_violation,
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
            for s in &report.stability {
                println!(
                    "{:<26} {:.4} -> {:.4} {}",
                    s.name,
                    s.coarse,
                    s.fine,
                    if s.pass { "stable" } else { "UNSTABLE" }
                );
            }
            if report.pass {
                return Ok(());
            }
            let worst = report
                .suite
                .identities
                .iter()
                .chain(&report.suite_refined.identities)
                .filter(|c| !c.pass)
                .max_by(|a, b| a.max_rel_violation.total_cmp(&b.max_rel_violation));
            let msg = match worst {
                Some(c) => format!(
                    "identity `{}` violated by {:.3e} at trial {} (seed {})",
                    c.name, c.max_rel_violation, c.worst_trial, cfg.seed
                ),
                None if !filter_ok => "filter-defect bound violated".into(),
                None => {
                    let bad: Vec<&str> = report
                        .stability
                        .iter()
                        .filter(|s| !s.pass)
                        .map(|s| s.name.as_str())
                        .collect();
                    format!(
                        "empirical constants not resolution-stable: {}",
                        bad.join(", ")
                    )
                }
            };
            Err(Failure::Assertion(msg))
        })
    })
}
