use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::random::{
    random_field, random_field_rms, shear, shell_field, taylor_green, Envelope,
};
use crate::spectral::{is_shell, Cutoff, Lattice, SpectralVelocity};

/// The five Galerkin systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Nse,
    LerayAlpha,
    NsAlpha,
    ModifiedLerayAlpha,
    SimplifiedBardina,
}

/// Which quadratic form a model conserves up to dissipation and forcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyForm {
    /// `|u|^2 + alpha^2 ||u||^2`, paired with `u`.
    L2,
    /// `||u||^2 + alpha^2 |Au|^2`, paired with `Au`.
    H1,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Nse,
        ModelKind::LerayAlpha,
        ModelKind::NsAlpha,
        ModelKind::ModifiedLerayAlpha,
        ModelKind::SimplifiedBardina,
    ];

    pub const ALPHA_MODELS: [ModelKind; 4] = [
        ModelKind::LerayAlpha,
        ModelKind::NsAlpha,
        ModelKind::ModifiedLerayAlpha,
        ModelKind::SimplifiedBardina,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Nse => "nse",
            ModelKind::LerayAlpha => "leray_alpha",
            ModelKind::NsAlpha => "ns_alpha",
            ModelKind::ModifiedLerayAlpha => "modified_leray_alpha",
            ModelKind::SimplifiedBardina => "simplified_bardina",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// True when the nonlinearity is passed through the Helmholtz filter.
    pub fn filtered(&self) -> bool {
        !matches!(self, ModelKind::Nse)
    }

    pub fn energy_form(&self) -> EnergyForm {
        match self {
            ModelKind::Nse | ModelKind::NsAlpha | ModelKind::ModifiedLerayAlpha => EnergyForm::L2,
            ModelKind::LerayAlpha | ModelKind::SimplifiedBardina => EnergyForm::H1,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Time-independent body force, Leray-projected at construction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingSpec {
    #[default]
    Zero,
    /// Seeded phases on the single shell `|k|^2 = k2`; `|f| / L = amplitude`.
    Shell { k2: u32, amplitude: f64 },
    /// Smooth seeded field with envelope `(1 + |k|^2)^{-exponent/2}`.
    Random { exponent: f64, amplitude: f64 },
}

impl ForcingSpec {
    pub fn build(&self, lattice: Arc<Lattice>, seed: u64) -> SpectralVelocity {
        // Forcing draws from a stream disjoint from the initial condition.
        let seed = seed ^ 0xF0F0_F0F0_0F0F_0F0F;
        match *self {
            ForcingSpec::Zero => SpectralVelocity::zeros(lattice),
            ForcingSpec::Shell { k2, amplitude } => shell_field(lattice, k2, seed, amplitude),
            ForcingSpec::Random {
                exponent,
                amplitude,
            } => random_field_rms(lattice, seed, Envelope::Power(exponent), amplitude),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ForcingSpec::Zero)
            || matches!(self, ForcingSpec::Shell { amplitude, .. } | ForcingSpec::Random { amplitude, .. } if *amplitude == 0.0)
    }
}

/// Initial velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    /// `(amplitude sin(2 pi y / L), 0)`.
    Shear { amplitude: f64 },
    /// Single Taylor-Green cell with peak speed `amplitude`.
    TaylorGreen { amplitude: f64 },
    /// Seeded field with envelope `(1 + |k|^2)^{-exponent/2}`, rescaled to
    /// rms speed `rms_velocity` when given.
    Random {
        exponent: f64,
        #[serde(default)]
        rms_velocity: Option<f64>,
    },
}

impl InitialSpec {
    pub fn build(&self, lattice: Arc<Lattice>, seed: u64) -> SpectralVelocity {
        match *self {
            InitialSpec::Shear { amplitude } => shear(lattice, amplitude),
            InitialSpec::TaylorGreen { amplitude } => taylor_green(lattice, amplitude),
            InitialSpec::Random {
                exponent,
                rms_velocity,
            } => match rms_velocity {
                Some(r) => random_field_rms(lattice, seed, Envelope::Power(exponent), r),
                None => random_field(lattice, seed, Envelope::Power(exponent)),
            },
        }
    }
}

fn default_samples() -> usize {
    64
}

/// Full description of one simulation. Field names carry their units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub model: ModelKind,
    pub nu_viscosity: f64,
    #[serde(default)]
    pub alpha_length: f64,
    pub box_length: f64,
    pub resolution: usize,
    /// Outermost retained shell `|k|^2`; absent means the whole lattice.
    #[serde(default)]
    pub galerkin_cutoff_k2: Option<u32>,
    pub horizon_time: f64,
    pub dt_time: f64,
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub seed: u64,
    /// Number of equally spaced sample times in `(0, T]`.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl SimConfig {
    /// Default random-smooth physics: `L = 2 pi`, `nu = 0.1`, `T = 1`,
    /// `N = 64`, `f = 0`, `s = 4` initial data with rms speed 0.2.
    pub fn default_physics(model: ModelKind, alpha: f64) -> Self {
        SimConfig {
            model,
            nu_viscosity: 0.1,
            alpha_length: alpha,
            box_length: std::f64::consts::TAU,
            resolution: 64,
            galerkin_cutoff_k2: None,
            horizon_time: 1.0,
            dt_time: 1e-3,
            forcing: ForcingSpec::Zero,
            initial: InitialSpec::Random {
                exponent: 4.0,
                rms_velocity: Some(0.2),
            },
            seed: 20_240_601,
            samples: 64,
        }
    }

    /// Checks every invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        pos("nu_viscosity", self.nu_viscosity)?;
        pos("box_length", self.box_length)?;
        pos("horizon_time", self.horizon_time)?;
        pos("dt_time", self.dt_time)?;
        if !(self.alpha_length.is_finite() && self.alpha_length >= 0.0) {
            return Err(invalid(
                "alpha_length",
                format!("must be finite and >= 0, got {}", self.alpha_length),
            ));
        }
        if self.resolution < 4 || !self.resolution.is_multiple_of(2) {
            return Err(invalid(
                "resolution",
                format!("must be an even integer >= 4, got {}", self.resolution),
            ));
        }
        if self.samples == 0 {
            return Err(invalid("samples", "must be at least 1"));
        }
        if let Some(k2) = self.galerkin_cutoff_k2 {
            if !is_shell(k2) {
                return Err(invalid(
                    "galerkin_cutoff_k2",
                    format!("{k2} is not a sum of two squares, so it is not a shell boundary"),
                ));
            }
            let kmax = (self.resolution / 2 - 1) as u32;
            if k2 > kmax * kmax {
                return Err(invalid(
                    "galerkin_cutoff_k2",
                    format!("shell {k2} is not complete on a lattice with |k_i| <= {kmax}"),
                ));
            }
        }
        match &self.initial {
            InitialSpec::Shear { amplitude } | InitialSpec::TaylorGreen { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude", "must be finite"));
                }
            }
            InitialSpec::Random {
                exponent,
                rms_velocity,
            } => {
                if !(exponent.is_finite() && *exponent >= 4.0) {
                    return Err(invalid(
                        "initial.exponent",
                        format!("must be >= 4 so that u0 lies in D(A), got {exponent}"),
                    ));
                }
                if let Some(r) = rms_velocity {
                    if !(r.is_finite() && *r >= 0.0) {
                        return Err(invalid("initial.rms_velocity", "must be finite and >= 0"));
                    }
                }
            }
        }
        match &self.forcing {
            ForcingSpec::Zero => {}
            ForcingSpec::Shell { k2, amplitude } => {
                if !is_shell(*k2) {
                    return Err(invalid("forcing.k2", format!("{k2} is not a shell")));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("forcing.amplitude", "must be finite"));
                }
            }
            ForcingSpec::Random {
                exponent,
                amplitude,
            } => {
                if !exponent.is_finite() || !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(invalid(
                        "forcing",
                        "exponent and amplitude must be finite, amplitude >= 0",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<Arc<Lattice>> {
        Ok(Arc::new(Lattice::new(self.box_length, self.resolution)?))
    }

    pub fn cutoff(&self) -> Cutoff {
        match self.galerkin_cutoff_k2 {
            Some(k2) => Cutoff::Shell(k2),
            None => Cutoff::Full,
        }
    }

    /// `P_m u0` on `lattice`.
    pub fn initial_state(&self, lattice: Arc<Lattice>) -> SpectralVelocity {
        self.initial
            .build(lattice, self.seed)
            .galerkin_project(&self.cutoff())
    }

    /// Projected forcing on `lattice` (not yet truncated to the cutoff).
    pub fn forcing_field(&self, lattice: Arc<Lattice>) -> SpectralVelocity {
        self.forcing.build(lattice, self.seed).leray_project()
    }

    /// Sample times `T k / samples`, `k = 1..=samples`.
    pub fn sample_times(&self) -> Vec<f64> {
        (1..=self.samples)
            .map(|k| self.horizon_time * k as f64 / self.samples as f64)
            .collect()
    }
}
