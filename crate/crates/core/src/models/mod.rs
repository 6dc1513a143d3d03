//! The five Galerkin systems in the common filtered form, their
//! configuration, and their energy identities.

mod config;
mod system;

pub use config::{EnergyForm, ForcingSpec, InitialSpec, ModelKind, SimConfig};
pub use system::{model_dissipation, model_energy, EnergyTerms, ModelSystem};

#[cfg(test)]
mod tests;
