use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Abscissa used when fitting an error curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateForm {
    /// `alpha`.
    Alpha,
    /// `alpha (1 + log(L / (2 pi alpha)))^{1/2}`.
    AlphaLog,
    /// `1 / lambda_{m+1}`.
    InverseEigenvalue,
    /// `lambda_{m+1}^{-1} (1 + log(lambda_{m+1} / lambda_1))^{1/2}`.
    InverseEigenvalueLog,
    /// `(lambda_1 / lambda_{m+1})^2 log(lambda_{m+1} / lambda_1)`.
    Combined,
    /// `(m + 1)^{-2} log(m + 1)` in the mode count `m`.
    ModeCount,
}

impl RateForm {
    /// `x(alpha)` for a box of side `box_length`.
    pub fn of_alpha(&self, alpha: f64, box_length: f64) -> f64 {
        match self {
            RateForm::AlphaLog => alpha * (1.0 + (box_length / (2.0 * PI * alpha)).ln()).sqrt(),
            _ => alpha,
        }
    }

    /// `x` for the eigenvalue `lambda_{m+1}` relative to `lambda_1`.
    pub fn of_eigenvalue(&self, lambda_m1: f64, lambda1: f64) -> f64 {
        let r = lambda_m1 / lambda1;
        match self {
            RateForm::InverseEigenvalueLog => (1.0 + r.ln()).sqrt() / lambda_m1,
            RateForm::Combined => r.ln() / (r * r),
            _ => 1.0 / lambda_m1,
        }
    }

    pub fn of_mode_count(m: usize) -> f64 {
        let n = (m + 1) as f64;
        n.ln() / (n * n)
    }
}

/// Least-squares power law `E = C x^p` in log-log coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub form: RateForm,
    /// All `(x, E)` pairs as given.
    pub points: Vec<(f64, f64)>,
    /// Number of pairs dropped because `E = 0`.
    pub zeros_excluded: usize,
    pub order: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of `log E`.
    pub residual: f64,
}

/// Fits `log E = log C + p log x`. Pairs with `E = 0` are excluded and
/// counted; at least four must remain.
pub fn fit_rate(pairs: &[(f64, f64)], form: RateForm) -> Result<RateFit> {
    if let Some(&(x, _)) = pairs.iter().find(|(x, _)| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid(
            "x",
            format!("fit abscissae must be positive, got {x}"),
        ));
    }
    if let Some(&(_, e)) = pairs.iter().find(|(_, e)| !(e.is_finite() && *e >= 0.0)) {
        return Err(invalid(
            "error",
            format!("errors must be finite and >= 0, got {e}"),
        ));
    }
    let used: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(x, e)| (x.ln(), e.ln()))
        .collect();
    if used.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} positive points, need at least 4",
            used.len()
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let p = sxy / sxx;
    let b = my - p * mx;
    let ss: f64 = used.iter().map(|q| (q.1 - b - p * q.0).powi(2)).sum();
    Ok(RateFit {
        form,
        points: pairs.to_vec(),
        zeros_excluded: pairs.len() - used.len(),
        order: p,
        prefactor: b.exp(),
        residual: (ss / n).sqrt(),
    })
}
