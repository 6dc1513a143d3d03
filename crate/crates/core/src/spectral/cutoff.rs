use serde::{Deserialize, Serialize};

use super::lattice::{is_shell, next_shell, Lattice};
use crate::error::{Error, Result};

/// Galerkin cutoff `P_m`: a union of complete eigenvalue shells.
///
/// `Shell(n)` keeps every mode with `|k|^2 <= n`, where `n` must itself be a
/// shell of Z^2 so that the cutoff never splits a degenerate eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Full,
    Shell(u32),
}

impl Cutoff {
    pub fn shell(k2: u32) -> Result<Self> {
        if is_shell(k2) {
            Ok(Cutoff::Shell(k2))
        } else {
            Err(Error::NotAShellBoundary(k2 as f64))
        }
    }

    /// Cutoff at eigenvalue threshold `lambda`, which must equal
    /// `lambda_1 |k|^2` for some shell (relative tolerance 1e-9).
    pub fn from_eigenvalue(lat: &Lattice, lambda: f64) -> Result<Self> {
        let r = lambda / lat.lambda1();
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::NotAShellBoundary(lambda));
        }
        let n = r.round();
        if (r - n).abs() > 1e-9 * r || !is_shell(n as u32) {
            return Err(Error::NotAShellBoundary(lambda));
        }
        Ok(Cutoff::Shell(n as u32))
    }

    /// Cutoff keeping exactly `m` wavevectors. Fails when `m` falls strictly
    /// inside a shell.
    pub fn from_mode_count(lat: &Lattice, m: usize) -> Result<Self> {
        let mut count = 0usize;
        for (n, c) in lat.shells() {
            let below = count;
            count += c;
            if count == m {
                return Ok(Cutoff::Shell(n));
            }
            if count > m {
                return Err(Error::SplitsShell {
                    requested: m,
                    below,
                    above: count,
                });
            }
        }
        Err(Error::SplitsShell {
            requested: m,
            below: count,
            above: count,
        })
    }

    pub fn contains(&self, k2: u32) -> bool {
        match self {
            Cutoff::Full => true,
            Cutoff::Shell(n) => k2 <= *n,
        }
    }

    /// `|k|^2` of the outermost retained shell on `lat`.
    pub fn top_shell(&self, lat: &Lattice) -> u32 {
        match self {
            Cutoff::Full => 2 * (lat.kmax() * lat.kmax()) as u32,
            Cutoff::Shell(n) => *n,
        }
    }

    /// `lambda_m`, the largest retained eigenvalue.
    pub fn eigenvalue(&self, lat: &Lattice) -> f64 {
        lat.lambda1() * self.top_shell(lat) as f64
    }

    /// `lambda_{m+1}`, the first eigenvalue outside the cutoff (taken in Z^2,
    /// so it exists even when the cutoff fills the lattice).
    pub fn next_eigenvalue(&self, lat: &Lattice) -> f64 {
        lat.lambda1() * next_shell(self.top_shell(lat)) as f64
    }

    /// Number of retained wavevectors `m`.
    pub fn mode_count(&self, lat: &Lattice) -> usize {
        match self {
            Cutoff::Full => lat.len(),
            Cutoff::Shell(n) => lat.count_within(*n),
        }
    }

    /// True when every wavevector of the cutoff space is present on `lat`.
    pub fn fits(&self, lat: &Lattice) -> bool {
        match self {
            Cutoff::Full => true,
            Cutoff::Shell(n) => lat.shell_complete(*n),
        }
    }
}
