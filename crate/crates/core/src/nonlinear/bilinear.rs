use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{wrap, Fft2, Lattice, SpectralVelocity};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which of the two bilinear operators to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `B(u, w) = P ((u . grad) w)`.
    Advective,
    /// `B~(u, w) = -P (u x curl w) = P (-u_2 omega, u_1 omega)` with the
    /// scalar vorticity `omega = d_x w_2 - d_y w_1`.
    Rotational,
}

/// Physical grid used for products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Padding {
    /// `3N/2` points: quadratic products of retained modes are alias-free.
    ThreeHalves,
    /// `N` points. Aliased; only useful as a negative control.
    None,
}

/// Scratch space for pseudo-spectral evaluation of `B` and `B~`.
///
/// One workspace serves one thread; evaluation borrows it mutably.
pub struct BilinearWorkspace {
    lattice: Arc<Lattice>,
    padding: Padding,
    fft: Fft2,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

impl BilinearWorkspace {
    pub fn new(lattice: Arc<Lattice>) -> Self {
        Self::with_padding(lattice, Padding::ThreeHalves)
    }

    pub fn with_padding(lattice: Arc<Lattice>, padding: Padding) -> Self {
        let n = match padding {
            Padding::ThreeHalves => lattice.padded_resolution(),
            Padding::None => lattice.resolution(),
        };
        Self {
            lattice,
            padding,
            fft: Fft2::new(n),
            a: vec![ZERO; n * n],
            b: vec![ZERO; n * n],
            c: vec![ZERO; n * n],
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    pub fn grid_size(&self) -> usize {
        self.fft.size()
    }

    pub fn apply(
        &mut self,
        form: Form,
        u: &SpectralVelocity,
        w: &SpectralVelocity,
    ) -> Result<SpectralVelocity> {
        match form {
            Form::Advective => self.advective(u, w),
            Form::Rotational => self.rotational(u, w),
        }
    }

    /// Galerkin value of `B(u, w)`.
    pub fn advective(
        &mut self,
        u: &SpectralVelocity,
        w: &SpectralVelocity,
    ) -> Result<SpectralVelocity> {
        let mut out = self.advective_unprojected(u, w)?;
        out.leray_project_in_place();
        Ok(out)
    }

    /// Truncated `(u . grad) w` without the Leray projection.
    pub fn advective_unprojected(
        &mut self,
        u: &SpectralVelocity,
        w: &SpectralVelocity,
    ) -> Result<SpectralVelocity> {
        self.check(u)?;
        self.check(w)?;
        let n = self.fft.size();
        let kappa = self.lattice.wavenumber_unit();
        clear(&mut self.a);
        clear(&mut self.b);
        clear(&mut self.c);
        for (idx, (um, wm)) in u.coeffs().iter().zip(w.coeffs()).enumerate() {
            let [kx, ky] = self.lattice.wavevector(idx);
            let g = wrap(kx, n) * n + wrap(ky, n);
            self.a[g] = um[0] + I * um[1];
            let dx = I * (kappa * kx as f64);
            let dy = I * (kappa * ky as f64);
            self.b[g] = dx * wm[0] + I * (dy * wm[0]);
            self.c[g] = dx * wm[1] + I * (dy * wm[1]);
        }
        self.fft.inverse(&mut self.a);
        self.fft.inverse(&mut self.b);
        self.fft.inverse(&mut self.c);
        for ((p, g1), g2) in self.a.iter_mut().zip(&self.b).zip(&self.c) {
            let (u1, u2) = (p.re, p.im);
            let r1 = u1 * g1.re + u2 * g1.im;
            let r2 = u1 * g2.re + u2 * g2.im;
            *p = Complex64::new(r1, r2);
        }
        self.fft.forward(&mut self.a);
        Ok(self.extract())
    }

    /// Galerkin value of `B~(u, w)`.
    pub fn rotational(
        &mut self,
        u: &SpectralVelocity,
        w: &SpectralVelocity,
    ) -> Result<SpectralVelocity> {
        self.check(u)?;
        self.check(w)?;
        let n = self.fft.size();
        let kappa = self.lattice.wavenumber_unit();
        clear(&mut self.a);
        clear(&mut self.b);
        for (idx, (um, wm)) in u.coeffs().iter().zip(w.coeffs()).enumerate() {
            let [kx, ky] = self.lattice.wavevector(idx);
            let g = wrap(kx, n) * n + wrap(ky, n);
            self.a[g] = um[0] + I * um[1];
            self.b[g] = I * kappa * (wm[1] * kx as f64 - wm[0] * ky as f64);
        }
        self.fft.inverse(&mut self.a);
        self.fft.inverse(&mut self.b);
        // i (u_1 + i u_2) omega = -u_2 omega + i u_1 omega
        for (p, om) in self.a.iter_mut().zip(&self.b) {
            *p = I * *p * om.re;
        }
        self.fft.forward(&mut self.a);
        let mut out = self.extract();
        out.leray_project_in_place();
        Ok(out)
    }

    fn check(&self, u: &SpectralVelocity) -> Result<()> {
        if Arc::ptr_eq(u.lattice(), &self.lattice) || u.lattice().same_geometry(&self.lattice) {
            Ok(())
        } else {
            Err(crate::Error::LatticeMismatch)
        }
    }

    /// Splits the forward transform of `p_1 + i p_2` held in `a` into the
    /// coefficients of the two real fields on the retained lattice.
    fn extract(&self) -> SpectralVelocity {
        let n = self.fft.size();
        let scale = 1.0 / (n * n) as f64;
        let lat = &self.lattice;
        SpectralVelocity::from_fn(Arc::clone(lat), |[kx, ky]| {
            let z = self.a[wrap(kx, n) * n + wrap(ky, n)];
            let zm = self.a[wrap(-kx, n) * n + wrap(-ky, n)].conj();
            let p = (z + zm) * (0.5 * scale);
            let q = (z - zm) * Complex64::new(0.0, -0.5 * scale);
            [p, q]
        })
    }
}

fn clear(buf: &mut [Complex64]) {
    buf.iter_mut().for_each(|z| *z = ZERO);
}

/// Pointwise sup of the Frobenius norm of `grad v` on an oversampled grid.
pub fn grad_linf(v: &SpectralVelocity) -> f64 {
    let lat = v.lattice();
    let n = crate::spectral::PhysicalGrid::oversampled(lat).0;
    let kappa = lat.wavenumber_unit();
    let mut fft = Fft2::new(n);
    let mut g1 = vec![ZERO; n * n];
    let mut g2 = vec![ZERO; n * n];
    for (idx, m) in v.coeffs().iter().enumerate() {
        let [kx, ky] = lat.wavevector(idx);
        let g = wrap(kx, n) * n + wrap(ky, n);
        let dx = I * (kappa * kx as f64);
        let dy = I * (kappa * ky as f64);
        g1[g] = dx * m[0] + I * (dy * m[0]);
        g2[g] = dx * m[1] + I * (dy * m[1]);
    }
    fft.inverse(&mut g1);
    fft.inverse(&mut g2);
    g1.iter()
        .zip(&g2)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .fold(0.0, f64::max)
        .sqrt()
}
