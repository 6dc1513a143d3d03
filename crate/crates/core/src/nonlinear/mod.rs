//! Advective and rotational bilinear forms evaluated exactly on the
//! Galerkin truncation, a direct-sum oracle, and the identity battery.

mod bilinear;
mod identities;
mod oracle;

pub use bilinear::{grad_linf, BilinearWorkspace, Form, Padding};
pub use identities::{
    battery_seed, identity_suite, identity_suite_with, EmpiricalConstant, IdentityCheck,
    IdentityReport, BATTERY_ENVELOPE, CONSTANT_NAMES, IDENTITY_NAMES, IDENTITY_TOL,
};
pub use oracle::{convolution_oracle, DEFAULT_MODE_BUDGET};
