use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::{EnergyForm, ModelKind, SimConfig};
use crate::error::Result;
use crate::nonlinear::{BilinearWorkspace, Padding};
use crate::spectral::{Cutoff, Lattice, SpectralVelocity};

/// Galerkin system in the evolved variable `u`:
///
/// `du/dt = -nu A u - F P_m N(u) + F P_m f`, `F = (I + alpha^2 A)^{-1}`,
///
/// with `N(u)` equal to `B(u, v)`, `B~(u, v)`, `B(v, u)` or `B(u, u)` and
/// `v = (I + alpha^2 A) u`. For the Navier-Stokes system `F = I`.
pub struct ModelSystem {
    kind: ModelKind,
    nu: f64,
    alpha: f64,
    lattice: Arc<Lattice>,
    cutoff: Cutoff,
    /// Per-mode `F P_m` multiplier.
    gain: Vec<f64>,
    /// `F P_m f`.
    forcing: SpectralVelocity,
    /// `P_m f`, for energy production.
    forcing_m: SpectralVelocity,
    ws: BilinearWorkspace,
}

/// Instantaneous terms of a model's energy identity
/// `1/2 dE/dt + D = P - X`, where `X` is the nonlinear transfer (zero in
/// exact arithmetic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub form: EnergyForm,
    pub model_energy: f64,
    pub dissipation: f64,
    pub production: f64,
    pub nonlinear_transfer: f64,
    /// `1/2 dE/dt` evaluated from the right-hand side.
    pub half_rate: f64,
    /// `|1/2 dE/dt + D - P|` divided by `D + |P| + |N| |pairing|`.
    pub balance_residual: f64,
}

impl ModelSystem {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        Self::with_padding(cfg, Padding::ThreeHalves)
    }

    pub fn with_padding(cfg: &SimConfig, padding: Padding) -> Result<Self> {
        cfg.validate()?;
        let lattice = cfg.lattice()?;
        let f = cfg.forcing_field(Arc::clone(&lattice));
        Ok(Self::from_parts(
            cfg.model,
            cfg.nu_viscosity,
            cfg.alpha_length,
            cfg.cutoff(),
            f,
            padding,
        ))
    }

    /// Builds a system directly from its ingredients; `forcing` must already
    /// be divergence-free.
    pub fn from_parts(
        kind: ModelKind,
        nu: f64,
        alpha: f64,
        cutoff: Cutoff,
        forcing: SpectralVelocity,
        padding: Padding,
    ) -> Self {
        let lattice = Arc::clone(forcing.lattice());
        let a2 = if kind.filtered() { alpha * alpha } else { 0.0 };
        let gain: Vec<f64> = (0..lattice.len())
            .map(|i| {
                if cutoff.contains(lattice.k2(i)) {
                    1.0 / (1.0 + a2 * lattice.eigenvalue(i))
                } else {
                    0.0
                }
            })
            .collect();
        let forcing_m = forcing.galerkin_project(&cutoff);
        let forcing_f = forcing_m.map_diagonal(|i| gain[i]);
        Self {
            kind,
            nu,
            alpha,
            ws: BilinearWorkspace::with_padding(Arc::clone(&lattice), padding),
            lattice,
            cutoff,
            gain,
            forcing: forcing_f,
            forcing_m,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// The filter width actually used (zero for the Navier-Stokes system).
    pub fn alpha(&self) -> f64 {
        if self.kind.filtered() {
            self.alpha
        } else {
            0.0
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// `P_m f` on the lattice.
    pub fn forcing(&self) -> &SpectralVelocity {
        &self.forcing_m
    }

    /// `v = (I + alpha^2 A) u`.
    pub fn unfiltered(&self, u: &SpectralVelocity) -> SpectralVelocity {
        let a2 = self.alpha().powi(2);
        let lat = Arc::clone(&self.lattice);
        u.map_diagonal(|i| 1.0 + a2 * lat.eigenvalue(i))
    }

    /// The model nonlinearity `N(u)`, Leray-projected and truncated to the
    /// lattice but neither filtered nor Galerkin-projected.
    pub fn nonlinearity(&mut self, u: &SpectralVelocity) -> Result<SpectralVelocity> {
        match self.kind {
            ModelKind::Nse | ModelKind::SimplifiedBardina => self.ws.advective(u, u),
            ModelKind::LerayAlpha => {
                let v = self.unfiltered(u);
                self.ws.advective(u, &v)
            }
            ModelKind::NsAlpha => {
                let v = self.unfiltered(u);
                self.ws.rotational(u, &v)
            }
            ModelKind::ModifiedLerayAlpha => {
                let v = self.unfiltered(u);
                self.ws.advective(&v, u)
            }
        }
    }

    /// `G(u, t) = F P_m (f - N(u))`, the part of the right-hand side not
    /// integrated exactly.
    pub fn explicit_part(&mut self, u: &SpectralVelocity, _t: f64) -> Result<SpectralVelocity> {
        let mut g = self.nonlinearity(u)?;
        for ((m, fm), s) in g
            .coeffs_mut()
            .iter_mut()
            .zip(self.forcing.coeffs())
            .zip(&self.gain)
        {
            m[0] = fm[0] - m[0] * *s;
            m[1] = fm[1] - m[1] * *s;
        }
        Ok(g)
    }

    /// Full right-hand side `-nu A u + G(u, t)`.
    pub fn rhs(&mut self, u: &SpectralVelocity, t: f64) -> Result<SpectralVelocity> {
        let mut g = self.explicit_part(u, t)?;
        g.axpy(-self.nu, &u.apply_stokes())?;
        Ok(g)
    }

    /// Per-mode decay rate `nu lambda(k)` of the linear part.
    pub fn linear_rates(&self) -> Vec<f64> {
        (0..self.lattice.len())
            .map(|i| self.nu * self.lattice.eigenvalue(i))
            .collect()
    }

    fn pairing(&self, u: &SpectralVelocity) -> SpectralVelocity {
        match self.kind.energy_form() {
            EnergyForm::L2 => u.clone(),
            EnergyForm::H1 => u.apply_stokes(),
        }
    }

    /// Terms of the model's natural energy identity at state `u`.
    pub fn energy_terms(&mut self, u: &SpectralVelocity, t: f64) -> Result<EnergyTerms> {
        let w = self.pairing(u);
        let v = self.unfiltered(u);
        let energy = v.inner(&w)?;
        let dissipation = self.nu * v.apply_stokes().inner(&w)?;
        let production = self.forcing_m.inner(&w)?;
        let n = self.nonlinearity(u)?.galerkin_project(&self.cutoff);
        let transfer = n.inner(&w)?;
        let r = self.rhs(u, t)?;
        let dv = self.unfiltered(&r);
        let half_rate = dv.inner(&w)?;
        let scale = dissipation + production.abs() + n.l2_norm() * w.l2_norm();
        let resid = (half_rate + dissipation - production).abs();
        Ok(EnergyTerms {
            form: self.kind.energy_form(),
            model_energy: energy,
            dissipation,
            production,
            nonlinear_transfer: transfer,
            half_rate,
            balance_residual: if scale > 0.0 { resid / scale } else { resid },
        })
    }
}

/// Quadratic energy of `u` in the given form.
pub fn model_energy(form: EnergyForm, alpha: f64, u: &SpectralVelocity) -> f64 {
    let a2 = alpha * alpha;
    match form {
        EnergyForm::L2 => u.l2_norm().powi(2) + a2 * u.h1_norm().powi(2),
        EnergyForm::H1 => u.h1_norm().powi(2) + a2 * u.h2_norm().powi(2),
    }
}

/// Instantaneous dissipation density of the form (without `nu`).
pub fn model_dissipation(form: EnergyForm, alpha: f64, u: &SpectralVelocity) -> f64 {
    let a2 = alpha * alpha;
    match form {
        EnergyForm::L2 => u.h1_norm().powi(2) + a2 * u.h2_norm().powi(2),
        EnergyForm::H1 => u.h2_norm().powi(2) + a2 * u.h3_norm().powi(2),
    }
}
