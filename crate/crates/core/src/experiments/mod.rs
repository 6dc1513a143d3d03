//! Convergence studies in `alpha` and in the Galerkin cutoff, with
//! log-log rate fitting and CSV / SVG emission.

mod fit;
mod output;
mod sweep;

pub use fit::{fit_rate, RateFit, RateForm};
pub use output::{sweep_csv, sweep_svg, SWEEP_CSV_HEADER, SWEEP_CSV_VERSION};
pub use sweep::{
    run_sweep, Curve, ProxyCheck, ReferenceInfo, SweepKind, SweepOutcome, SweepPoint, SweepSpec,
    CALIBRATION_SEED, NOISE_FLOOR,
};

#[cfg(test)]
mod tests;
