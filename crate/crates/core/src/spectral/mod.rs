//! Lattice geometry, spectral velocity fields and the diagonal operators
//! (Stokes, Leray, Helmholtz filter, Galerkin projector).

mod cutoff;
mod fft;
mod field;
mod lattice;
pub mod random;

pub use cutoff::Cutoff;
pub use fft::Fft2;
pub use field::{Mode, Norms, PhysicalGrid, PhysicalSampler, SpectralVelocity};
pub use lattice::{is_shell, next_shell, stokes_eigenvalues, weyl_constant, Lattice};

pub(crate) use field::wrap;
