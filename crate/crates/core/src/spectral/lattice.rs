use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Truncated Fourier lattice on the periodic box `[0, L]^2`.
///
/// Retained wavevectors are the integer pairs `k != 0` with
/// `|k_x|, |k_y| <= N/2 - 1`. The Nyquist row is dropped so that the set is
/// closed under `k -> -k`. Modes are stored in lexicographic `(k_x, k_y)`
/// order with the origin removed, which makes the negation map `i -> M-1-i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    box_length: f64,
    resolution: usize,
    kmax: i32,
    modes: Vec<[i32; 2]>,
    k2: Vec<u32>,
}

impl Lattice {
    pub fn new(box_length: f64, resolution: usize) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        if resolution < 4 || !resolution.is_multiple_of(2) {
            return Err(Error::InvalidLattice(format!(
                "resolution must be an even integer >= 4, got {resolution}"
            )));
        }
        let kmax = (resolution / 2 - 1) as i32;
        let mut modes = Vec::with_capacity((2 * kmax as usize + 1).pow(2) - 1);
        for kx in -kmax..=kmax {
            for ky in -kmax..=kmax {
                if kx != 0 || ky != 0 {
                    modes.push([kx, ky]);
                }
            }
        }
        let k2 = modes
            .iter()
            .map(|k| (k[0] * k[0] + k[1] * k[1]) as u32)
            .collect();
        Ok(Self {
            box_length,
            resolution,
            kmax,
            modes,
            k2,
        })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Largest retained |k_x| (and |k_y|).
    pub fn kmax(&self) -> i32 {
        self.kmax
    }

    /// Number of retained wavevectors.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[[i32; 2]] {
        &self.modes
    }

    pub fn wavevector(&self, i: usize) -> [i32; 2] {
        self.modes[i]
    }

    /// Integer |k|^2 of mode `i`.
    pub fn k2(&self, i: usize) -> u32 {
        self.k2[i]
    }

    pub fn k2_all(&self) -> &[u32] {
        &self.k2
    }

    /// `2 pi / L`, the wavenumber of the lowest mode.
    pub fn wavenumber_unit(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// First Stokes eigenvalue `(2 pi / L)^2`.
    pub fn lambda1(&self) -> f64 {
        self.wavenumber_unit().powi(2)
    }

    /// Stokes eigenvalue `(2 pi / L)^2 |k|^2` of mode `i`.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.lambda1() * self.k2[i] as f64
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.lambda1() * (2 * self.kmax * self.kmax) as f64
    }

    /// Index of the mode `-k` paired with mode `i`.
    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        self.modes.len() - 1 - i
    }

    pub fn index_of(&self, kx: i32, ky: i32) -> Option<usize> {
        let k = self.kmax;
        if kx.abs() > k || ky.abs() > k || (kx == 0 && ky == 0) {
            return None;
        }
        let side = (2 * k + 1) as usize;
        let dense = (kx + k) as usize * side + (ky + k) as usize;
        let centre = k as usize * side + k as usize;
        Some(if dense < centre { dense } else { dense - 1 })
    }

    /// Grid size used for alias-free quadratic products (3/2 rule).
    pub fn padded_resolution(&self) -> usize {
        3 * self.resolution / 2
    }

    /// True when every wavevector of Z^2 with |k|^2 <= `k2` is retained.
    pub fn shell_complete(&self, k2: u32) -> bool {
        k2 <= (self.kmax * self.kmax) as u32
    }

    /// Sorted eigenvalues with one slot per retained wavevector.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut k2 = self.k2.clone();
        k2.sort_unstable();
        let l1 = self.lambda1();
        k2.into_iter().map(|n| l1 * n as f64).collect()
    }

    /// Distinct `|k|^2` shells attained on the lattice, ascending, with
    /// their multiplicities.
    pub fn shells(&self) -> Vec<(u32, usize)> {
        let mut k2 = self.k2.clone();
        k2.sort_unstable();
        let mut out: Vec<(u32, usize)> = Vec::new();
        for n in k2 {
            match out.last_mut() {
                Some((m, c)) if *m == n => *c += 1,
                _ => out.push((n, 1)),
            }
        }
        out
    }

    /// Number of retained wavevectors with `|k|^2 <= k2`.
    pub fn count_within(&self, k2: u32) -> usize {
        self.k2.iter().filter(|&&n| n <= k2).count()
    }

    pub fn same_geometry(&self, other: &Lattice) -> bool {
        self.resolution == other.resolution && self.box_length == other.box_length
    }
}

/// True when `n` is a sum of two integer squares, i.e. a shell of Z^2.
pub fn is_shell(n: u32) -> bool {
    if n == 0 {
        return false;
    }
    let mut a = 0u32;
    while a * a <= n {
        let rest = n - a * a;
        let b = (rest as f64).sqrt().round() as u32;
        if b * b == rest {
            return true;
        }
        a += 1;
    }
    false
}

/// Smallest shell of Z^2 strictly above `n`.
pub fn next_shell(n: u32) -> u32 {
    let mut m = n + 1;
    while !is_shell(m) {
        m += 1;
    }
    m
}

/// Sorted Stokes eigenvalues `(lambda_j, multiplicity)`; the first entry is
/// `(2 pi / L)^2` with multiplicity 4.
pub fn stokes_eigenvalues(lat: &Lattice) -> Vec<(f64, usize)> {
    let l1 = lat.lambda1();
    lat.shells()
        .into_iter()
        .map(|(n, c)| (l1 * n as f64, c))
        .collect()
}

/// Smallest `c0` with `j / c0 <= lambda_j / lambda_1 <= c0 j` over the
/// sorted eigenvalue list (one slot per wavevector). Only shells that are
/// complete on the lattice are used, so the value does not depend on the
/// square truncation corners.
pub fn weyl_constant(lat: &Lattice) -> f64 {
    let kk = (lat.kmax() * lat.kmax()) as u32;
    let mut k2: Vec<u32> = lat.k2_all().iter().copied().filter(|&n| n <= kk).collect();
    k2.sort_unstable();
    k2.iter()
        .enumerate()
        .map(|(j0, &n)| {
            let j = (j0 + 1) as f64;
            let r = n as f64;
            (r / j).max(j / r)
        })
        .fold(1.0, f64::max)
}
