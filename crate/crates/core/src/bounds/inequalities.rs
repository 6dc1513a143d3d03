use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::constants::BoundConstants;
use crate::error::{invalid, Error, Result};
use crate::models::ModelKind;
use crate::nonlinear::battery_seed;
use crate::spectral::random::{random_field, Envelope};
use crate::spectral::{Lattice, SpectralVelocity};

/// Both sides of the logarithmic sup-norm inequality for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrezisGallouet {
    /// `||u||_Linf`.
    pub lhs: f64,
    /// `||u|| (1 + log(L |Au| / (2 pi ||u||)))^{1/2}`.
    pub rhs_shape: f64,
    pub ratio: f64,
    /// Frequency split `M = sqrt(x^2 - 1) + 1`, `x = L |Au| / (2 pi ||u||)`.
    pub m_used: f64,
}

pub fn brezis_gallouet(u: &SpectralVelocity) -> Result<BrezisGallouet> {
    let h1 = u.h1_norm();
    if h1 == 0.0 {
        return Err(invalid(
            "u",
            "the sup-norm inequality is undefined for the zero field",
        ));
    }
    let x = u.lattice().box_length() * u.h2_norm() / (2.0 * PI * h1);
    let rhs_shape = h1 * (1.0 + x.ln()).sqrt();
    let lhs = u.linf_norm();
    Ok(BrezisGallouet {
        lhs,
        rhs_shape,
        ratio: lhs / rhs_shape,
        m_used: (x * x - 1.0).max(0.0).sqrt() + 1.0,
    })
}

/// Largest ratio of [`brezis_gallouet`] over a seeded battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgBattery {
    pub resolution: usize,
    pub fields: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub worst_seed: u64,
}

pub fn bg_battery(
    lattice: Arc<Lattice>,
    fields: usize,
    seed: u64,
    envelope: Envelope,
) -> Result<BgBattery> {
    if fields == 0 {
        return Err(invalid("fields", "must be at least 1"));
    }
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut worst = 0;
    for i in 0..fields {
        let s = battery_seed(seed, i, 7);
        let r = brezis_gallouet(&random_field(Arc::clone(&lattice), s, envelope))?.ratio;
        sum += r;
        if r > max || r.is_nan() {
            max = r;
            worst = s;
        }
    }
    Ok(BgBattery {
        resolution: lattice.resolution(),
        fields,
        max_ratio: max,
        mean_ratio: sum / fields as f64,
        worst_seed: worst,
    })
}

/// Filter-defect operator bound on one lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDefectReport {
    pub alpha: f64,
    /// `max_k alpha sqrt(lambda_k) / (1 + alpha^2 lambda_k)`.
    pub operator_norm: f64,
    /// Shell where the maximum is attained.
    pub argmax_k2: u32,
    pub pairs: usize,
    /// Largest `|(phi - F phi, delta)| / ((alpha/2) |phi| ||delta||)`.
    pub pair_max_ratio: f64,
    pub bound_holds: bool,
}

/// Operator norm of `alpha A^{1/2} (I + alpha^2 A)^{-1}` on `lattice`, and
/// the inner-product form of the bound on `pairs` seeded random pairs.
pub fn filter_defect_check(
    lattice: Arc<Lattice>,
    alpha: f64,
    pairs: usize,
    seed: u64,
) -> Result<FilterDefectReport> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid("alpha", format!("must be positive, got {alpha}")));
    }
    let mut norm = 0.0f64;
    let mut argmax = 0;
    let l1 = lattice.lambda1();
    for (k2, _) in lattice.shells() {
        let y = alpha * (l1 * k2 as f64).sqrt();
        let v = y / (1.0 + y * y);
        if v > norm {
            norm = v;
            argmax = k2;
        }
    }
    let mut worst = 0.0f64;
    for p in 0..pairs {
        let phi = random_field(
            Arc::clone(&lattice),
            battery_seed(seed, p, 0),
            Envelope::Flat,
        );
        let delta = random_field(
            Arc::clone(&lattice),
            battery_seed(seed, p, 1),
            Envelope::Flat,
        );
        let defect = phi.sub(&phi.helmholtz_filter(alpha)?)?;
        let lhs = defect.inner(&delta)?.abs();
        let rhs = 0.5 * alpha * phi.l2_norm() * delta.h1_norm();
        worst = worst.max(if rhs > 0.0 { lhs / rhs } else { 0.0 });
    }
    Ok(FilterDefectReport {
        alpha,
        operator_norm: norm,
        argmax_k2: argmax,
        pairs,
        pair_max_ratio: worst,
        bound_holds: norm <= 0.5 && worst <= 1.0 + 1e-12,
    })
}

/// Sup-norm bound for the filtered velocity along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinftyReport {
    /// `sup_t ||u(t)||_Linf^2` over the samples.
    pub lhs: f64,
    /// `K~^2 (1 + log(L / (2 pi alpha)))`.
    pub shape: f64,
    pub c_cal: f64,
    pub bound: f64,
    pub ratio: f64,
    /// Smallest `c_cal` for which the bound holds.
    pub min_c_cal: f64,
    pub pass: bool,
}

/// `K~^2` entering the sup-norm bound of `model`.
pub fn linfty_energy(model: ModelKind, constants: &BoundConstants) -> Result<f64> {
    match model {
        ModelKind::LerayAlpha | ModelKind::SimplifiedBardina => Ok(constants.kt0_sq),
        ModelKind::NsAlpha | ModelKind::ModifiedLerayAlpha => Ok(constants.kt02_sq),
        ModelKind::Nse => Err(invalid(
            "model",
            "the sup-norm bound needs a filtered model",
        )),
    }
}

/// Checks `sup_linf_sq <= c_cal K~^2 (1 + log(L/(2 pi alpha)))`.
pub fn linfty_model_bound(
    sup_linf_sq: f64,
    model: ModelKind,
    constants: &BoundConstants,
) -> Result<LinftyReport> {
    let inp = &constants.inputs;
    if !(inp.alpha > 0.0) || inp.box_length / (2.0 * PI * inp.alpha) < 1.0 {
        return Err(Error::Hypothesis(format!(
            "alpha_small: need 0 < alpha <= L/(2 pi), got alpha = {}",
            inp.alpha
        )));
    }
    let shape = linfty_energy(model, constants)? * inp.log_alpha();
    let c = constants.calibration.linfty;
    let bound = c * shape;
    let min_c = if shape > 0.0 {
        sup_linf_sq / shape
    } else if sup_linf_sq == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let ratio = if bound > 0.0 {
        sup_linf_sq / bound
    } else {
        min_c
    };
    Ok(LinftyReport {
        lhs: sup_linf_sq,
        shape,
        c_cal: c,
        bound,
        ratio,
        min_c_cal: min_c,
        pass: sup_linf_sq <= bound * (1.0 + 1e-12),
    })
}
