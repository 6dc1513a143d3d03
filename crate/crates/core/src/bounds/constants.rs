use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Cutoff, Lattice, SpectralVelocity};

/// Stand-ins for the unvalued generic constants `c`, one per inequality
/// family. All default to 1; [`super::calibrate`] reports minimal passing
/// values over a seeded field battery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Gronwall constant in the NS-alpha / ML-alpha higher-order estimate.
    pub apriori: f64,
    /// Constant of the sup-norm bound for the filtered velocity.
    pub linfty: f64,
    /// Constant in the alpha-convergence rates.
    pub alpha_rate: f64,
    /// Constant in the Galerkin error `e^2`.
    pub galerkin: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            apriori: 1.0,
            linfty: 1.0,
            alpha_rate: 1.0,
            galerkin: 1.0,
        }
    }
}

/// Norms of the data entering every constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub nu: f64,
    pub alpha: f64,
    pub box_length: f64,
    pub horizon: f64,
    /// `|u0|`, `||u0||`, `|A u0|`.
    pub u0_l2: f64,
    pub u0_h1: f64,
    pub u0_h2: f64,
    /// `int_0^T |f|^2 dt` (also `||f||^2` in `L^2(0,T;H)`).
    pub forcing_l2t_sq: f64,
    /// `sup_t |f|^2`.
    pub forcing_linf_sq: f64,
    /// `(lambda_m, lambda_{m+1})` when a Galerkin cutoff is in play.
    pub galerkin: Option<(f64, f64)>,
}

impl BoundInputs {
    /// Inputs for a run with steady forcing `f` and initial state `u0`.
    pub fn from_fields(
        nu: f64,
        alpha: f64,
        horizon: f64,
        u0: &SpectralVelocity,
        forcing: &SpectralVelocity,
    ) -> Self {
        let f2 = forcing.l2_norm().powi(2);
        Self {
            nu,
            alpha,
            box_length: u0.lattice().box_length(),
            horizon,
            u0_l2: u0.l2_norm(),
            u0_h1: u0.h1_norm(),
            u0_h2: u0.h2_norm(),
            forcing_l2t_sq: f2 * horizon,
            forcing_linf_sq: f2,
            galerkin: None,
        }
    }

    pub fn with_cutoff(mut self, lat: &Lattice, cutoff: &Cutoff) -> Self {
        self.galerkin = Some((cutoff.eigenvalue(lat), cutoff.next_eigenvalue(lat)));
        self
    }

    pub fn lambda1(&self) -> f64 {
        (2.0 * PI / self.box_length).powi(2)
    }

    /// `1 + log(L / (2 pi alpha))`; infinite at `alpha = 0`.
    pub fn log_alpha(&self) -> f64 {
        1.0 + (self.box_length / (2.0 * PI * self.alpha)).ln()
    }
}

/// Constants of the Galerkin error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalerkinConstants {
    pub lambda_m: f64,
    pub lambda_m1: f64,
    pub q: f64,
    pub r: f64,
    pub l_m: f64,
    pub u_tilde: f64,
    pub v_tilde: f64,
    /// `(Q + R + L_m U~ V~) / lambda_{m+1}^2`, as stated.
    pub e_sq: f64,
    /// The same with the Gronwall factor `exp(U~)` kept on the `L_m` term.
    pub e_sq_gronwall: f64,
}

/// Every explicit constant, evaluated by direct substitution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub inputs: BoundInputs,
    pub calibration: Calibration,
    /// Weyl constant of the lattice, when known.
    pub c0: Option<f64>,
    pub k0_sq: f64,
    pub kt0_sq: f64,
    pub kt01_sq: f64,
    pub kt00_sq: f64,
    pub kt02_sq: f64,
    pub eps_sq: f64,
    pub eps_tilde_sq: f64,
    pub galerkin: Option<GalerkinConstants>,
}

/// Named hypothesis with its status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

/// Smallness conditions on `alpha` relevant to `inputs`.
pub fn hypotheses(inputs: &BoundInputs) -> Vec<Hypothesis> {
    let mut out = Vec::new();
    let l = inputs.box_length;
    let a = inputs.alpha;
    if a > 0.0 {
        let r = l / (2.0 * PI * a);
        out.push(Hypothesis {
            name: "alpha_small".into(),
            holds: r >= 1.0,
            detail: format!("L/(2 pi alpha) = {r:.6} (needs >= 1)"),
        });
    }
    if let Some((_, lm1)) = inputs.galerkin {
        let holds = a > 0.0 && a * a * lm1 <= 1.0 * (1.0 + 1e-12);
        out.push(Hypothesis {
            name: "alpha_below_cutoff".into(),
            holds,
            detail: format!(
                "alpha^2 lambda_(m+1) = {:.6} (needs alpha > 0 and <= 1)",
                a * a * lm1
            ),
        });
    }
    out
}

/// `alpha <= 2 pi / (lambda_{m+1} L)`, the coupling for the combined rate.
pub fn combined_hypothesis(alpha: f64, lambda_m1: f64, box_length: f64) -> Hypothesis {
    let lim = 2.0 * PI / (lambda_m1 * box_length);
    Hypothesis {
        name: "alpha_coupled_to_cutoff".into(),
        holds: alpha > 0.0 && alpha <= lim * (1.0 + 1e-12),
        detail: format!("alpha = {alpha:.6e}, limit 2 pi/(lambda_(m+1) L) = {lim:.6e}"),
    }
}

/// Product in which a zero factor wins over an overflowed one, so that
/// vanishing data give vanishing constants even when an exponential
/// prefactor is infinite.
fn times(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn check(h: &[Hypothesis]) -> Result<()> {
    match h.iter().find(|h| !h.holds) {
        Some(bad) => Err(Error::Hypothesis(format!("{}: {}", bad.name, bad.detail))),
        None => Ok(()),
    }
}

/// Evaluates all constants. Fails with [`Error::Hypothesis`] when a
/// smallness condition on `alpha` is violated.
pub fn compute_constants(
    inputs: &BoundInputs,
    cal: &Calibration,
    c0: Option<f64>,
) -> Result<BoundConstants> {
    check(&hypotheses(inputs))?;
    let BoundInputs {
        nu,
        alpha,
        horizon: t,
        u0_l2,
        u0_h1,
        u0_h2,
        forcing_l2t_sq: f2,
        forcing_linf_sq: finf,
        ..
    } = *inputs;
    let l1 = inputs.lambda1();
    let a2 = alpha * alpha;
    let nu2 = nu * nu;

    let k0_sq = u0_l2.powi(2) + f2 / (nu * l1);
    let h1_form = u0_h1.powi(2) + a2 * u0_h2.powi(2);
    let kt0_sq = h1_form + f2 / nu;
    let kt01_sq = u0_l2.powi(2) + a2 * u0_h1.powi(2) + f2 / (nu * l1);
    let g = (cal.apriori * kt01_sq / nu2).exp();
    let kt00_sq = times(g, h1_form) + times(g, f2 / nu);
    let kt02_sq = h1_form + f2 / nu + times(cal.apriori / nu2, times(kt00_sq, kt01_sq));

    let (eps_sq, eps_tilde_sq) = if alpha == 0.0 {
        (0.0, 0.0)
    } else {
        let c = cal.alpha_rate;
        let pre = c * a2 / nu * (c * k0_sq / nu2).exp();
        let la = inputs.log_alpha();
        (
            times(pre, times(t * la, kt0_sq.powi(2)) + f2),
            times(pre, times(t * la, kt02_sq.powi(2)) + f2),
        )
    };

    let galerkin = inputs.galerkin.map(|(lm, lm1)| {
        let c = cal.galerkin;
        let la = inputs.log_alpha();
        let k2 = kt0_sq;
        let k4 = k2 * k2;
        let q = u0_h2.powi(2) + c / nu2 * (finf + k4 * la);
        let r = c / nu2 * k4 * la;
        let l_m = 1.0 + (lm / l1).ln();
        let u_tilde = c / nu * (k2 * t + k2 / (nu * lm1) + k4 * t / (nu2 * l1));
        let v_tilde = c / nu * k2 * (q + r) * t + c / nu2 * k2 * (q + r) / lm1 + c / nu2 * k4;
        let lm1_sq = lm1 * lm1;
        let lu = times(l_m, u_tilde);
        GalerkinConstants {
            lambda_m: lm,
            lambda_m1: lm1,
            q,
            r,
            l_m,
            u_tilde,
            v_tilde,
            e_sq: (q + r + times(lu, v_tilde)) / lm1_sq,
            e_sq_gronwall: (q + r + times(times(l_m, u_tilde.exp()), v_tilde)) / lm1_sq,
        }
    });

    Ok(BoundConstants {
        inputs: *inputs,
        calibration: *cal,
        c0,
        k0_sq,
        kt0_sq,
        kt01_sq,
        kt00_sq,
        kt02_sq,
        eps_sq,
        eps_tilde_sq,
        galerkin,
    })
}
