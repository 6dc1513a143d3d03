//! Fourier-Galerkin solver for the 2D periodic Navier-Stokes equations and
//! the Leray-alpha, NS-alpha, modified Leray-alpha and simplified Bardina
//! regularizations, with convergence and inequality harnesses.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod integrator;
pub mod models;
pub mod nonlinear;
pub mod spectral;

pub use error::{Error, Result};
