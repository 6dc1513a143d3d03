use std::sync::Arc;

use num_complex::Complex64;

use super::cutoff::Cutoff;
use super::fft::Fft2;
use super::lattice::Lattice;
use crate::error::{invalid, Error, Result};

pub type Mode = [Complex64; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Two-component Fourier coefficients on a [`Lattice`].
///
/// The physical field is `u(x) = sum_k u_k exp(2 pi i k.x / L)`, so grid
/// values are exact trigonometric sums and every L^2-type norm carries the
/// measure factor `L^2`: `|u|^2 = L^2 sum_k |u_k|^2`.
///
/// Velocities satisfy `u_{-k} = conj(u_k)` and `k . u_k = 0`; the zero mode
/// is never stored. Intermediate quantities (products before projection)
/// reuse this type without the solenoidal constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVelocity {
    lattice: Arc<Lattice>,
    coeffs: Vec<Mode>,
}

impl SpectralVelocity {
    pub fn zeros(lattice: Arc<Lattice>) -> Self {
        let n = lattice.len();
        Self {
            lattice,
            coeffs: vec![[ZERO; 2]; n],
        }
    }

    pub fn from_coeffs(lattice: Arc<Lattice>, coeffs: Vec<Mode>) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(invalid(
                "coeffs",
                format!("expected {} modes, got {}", lattice.len(), coeffs.len()),
            ));
        }
        Ok(Self { lattice, coeffs })
    }

    /// Builds a field mode by mode from a function of the wavevector.
    pub fn from_fn(lattice: Arc<Lattice>, mut f: impl FnMut([i32; 2]) -> Mode) -> Self {
        let coeffs = lattice.modes().iter().map(|&k| f(k)).collect();
        Self { lattice, coeffs }
    }

    /// Velocity `(d psi / dy, -d psi / dx)` of a real streamfunction given
    /// by its Fourier coefficients.
    pub fn from_streamfunction(
        lattice: Arc<Lattice>,
        mut psi: impl FnMut([i32; 2]) -> Complex64,
    ) -> Self {
        let kappa = lattice.wavenumber_unit();
        Self::from_fn(lattice, |k| {
            let p = psi(k);
            let i = Complex64::new(0.0, kappa);
            [i * k[1] as f64 * p, -i * k[0] as f64 * p]
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn coeffs(&self) -> &[Mode] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Mode] {
        &mut self.coeffs
    }

    pub fn coeff(&self, kx: i32, ky: i32) -> Option<Mode> {
        self.lattice.index_of(kx, ky).map(|i| self.coeffs[i])
    }

    pub(crate) fn ensure_same_lattice(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice.same_geometry(&other.lattice)
        {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    // ---- linear algebra -------------------------------------------------

    pub fn scale(&self, a: f64) -> Self {
        self.map_modes(|_, m| [m[0] * a, m[1] * a])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_lattice(other)?;
        Ok(self.zip_modes(other, |a, b| [a[0] + b[0], a[1] + b[1]]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_lattice(other)?;
        Ok(self.zip_modes(other, |a, b| [a[0] - b[0], a[1] - b[1]]))
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) -> Result<()> {
        self.ensure_same_lattice(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            x[0] += y[0] * a;
            x[1] += y[1] * a;
        }
        Ok(())
    }

    /// Applies a real per-mode multiplier `g(i)`.
    pub fn map_diagonal(&self, g: impl Fn(usize) -> f64) -> Self {
        self.map_modes(|i, m| {
            let s = g(i);
            [m[0] * s, m[1] * s]
        })
    }

    pub(crate) fn map_modes(&self, f: impl Fn(usize, &Mode) -> Mode) -> Self {
        Self {
            lattice: Arc::clone(&self.lattice),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, m)| f(i, m))
                .collect(),
        }
    }

    fn zip_modes(&self, other: &Self, f: impl Fn(&Mode, &Mode) -> Mode) -> Self {
        Self {
            lattice: Arc::clone(&self.lattice),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// L^2 inner product `(self, other) = L^2 sum_k Re(u_k . conj(w_k))`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.ensure_same_lattice(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a[0] * b[0].conj() + a[1] * b[1].conj()).re)
            .sum();
        self.lattice.box_length().powi(2) * s
    }

    // ---- diagonal operators ---------------------------------------------

    /// Stokes operator power `A^p` (diagonal, `lambda(k)^p`).
    pub fn stokes_power(&self, p: f64) -> Self {
        let lat = Arc::clone(&self.lattice);
        self.map_diagonal(|i| lat.eigenvalue(i).powf(p))
    }

    pub fn apply_stokes(&self) -> Self {
        let lat = Arc::clone(&self.lattice);
        self.map_diagonal(|i| lat.eigenvalue(i))
    }

    /// `(I + alpha^2 A) u`.
    pub fn apply_helmholtz(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let lat = Arc::clone(&self.lattice);
        let a2 = alpha * alpha;
        Ok(self.map_diagonal(|i| 1.0 + a2 * lat.eigenvalue(i)))
    }

    /// Helmholtz filter: the solution `u` of `u + alpha^2 A u = v`.
    pub fn helmholtz_filter(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let lat = Arc::clone(&self.lattice);
        let a2 = alpha * alpha;
        Ok(self.map_diagonal(|i| 1.0 / (1.0 + a2 * lat.eigenvalue(i))))
    }

    /// Leray projection `u_k - k (k . u_k) / |k|^2`.
    pub fn leray_project(&self) -> Self {
        let lat = Arc::clone(&self.lattice);
        self.map_modes(|i, m| {
            let [kx, ky] = lat.wavevector(i);
            let (kx, ky) = (kx as f64, ky as f64);
            let dot = m[0] * kx + m[1] * ky;
            let r = dot / lat.k2(i) as f64;
            [m[0] - r * kx, m[1] - r * ky]
        })
    }

    pub fn leray_project_in_place(&mut self) {
        let lat = Arc::clone(&self.lattice);
        for (i, m) in self.coeffs.iter_mut().enumerate() {
            let [kx, ky] = lat.wavevector(i);
            let (kx, ky) = (kx as f64, ky as f64);
            let r = (m[0] * kx + m[1] * ky) / lat.k2(i) as f64;
            m[0] -= r * kx;
            m[1] -= r * ky;
        }
    }

    /// Galerkin projection `P_m`: keeps modes inside the cutoff.
    pub fn galerkin_project(&self, cutoff: &Cutoff) -> Self {
        let lat = Arc::clone(&self.lattice);
        self.map_diagonal(|i| if cutoff.contains(lat.k2(i)) { 1.0 } else { 0.0 })
    }

    /// Complementary projection `I - P_m`.
    pub fn galerkin_complement(&self, cutoff: &Cutoff) -> Self {
        let lat = Arc::clone(&self.lattice);
        self.map_diagonal(|i| if cutoff.contains(lat.k2(i)) { 0.0 } else { 1.0 })
    }

    pub fn is_within(&self, cutoff: &Cutoff) -> bool {
        self.coeffs.iter().enumerate().all(|(i, m)| {
            cutoff.contains(self.lattice.k2(i)) || (m[0].norm() == 0.0 && m[1].norm() == 0.0)
        })
    }

    // ---- invariants -----------------------------------------------------

    pub fn max_amplitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|m| (m[0].norm_sqr() + m[1].norm_sqr()).sqrt())
            .fold(0.0, f64::max)
    }

    /// Largest `|u_{-k} - conj(u_k)|`.
    pub fn reality_defect(&self) -> f64 {
        let lat = &self.lattice;
        (0..lat.len())
            .map(|i| {
                let a = self.coeffs[i];
                let b = self.coeffs[lat.neg(i)];
                ((a[0].conj() - b[0]).norm_sqr() + (a[1].conj() - b[1]).norm_sqr()).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|k . u_k| / |k|`.
    pub fn divergence_defect(&self) -> f64 {
        let lat = &self.lattice;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let [kx, ky] = lat.wavevector(i);
                (m[0] * kx as f64 + m[1] * ky as f64).norm() / (lat.k2(i) as f64).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Checks reality and incompressibility relative to the largest
    /// amplitude (`tol_div` defaults to 1e-12).
    pub fn is_valid_velocity(&self, rel_tol: f64) -> bool {
        let scale = self.max_amplitude();
        if scale == 0.0 {
            return true;
        }
        self.reality_defect() <= rel_tol * scale && self.divergence_defect() <= rel_tol * scale
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|m| {
            m[0].re.is_finite() && m[0].im.is_finite() && m[1].re.is_finite() && m[1].im.is_finite()
        })
    }

    // ---- norms ----------------------------------------------------------

    /// `L^2 sum_k w(k) |u_k|^2` for a per-mode weight.
    fn weighted_sq(&self, w: impl Fn(usize) -> f64) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, m)| w(i) * (m[0].norm_sqr() + m[1].norm_sqr()))
            .sum();
        self.lattice.box_length().powi(2) * s
    }

    /// `|u|`.
    pub fn l2_norm(&self) -> f64 {
        self.weighted_sq(|_| 1.0).sqrt()
    }

    /// `||u|| = |A^{1/2} u|`.
    pub fn h1_norm(&self) -> f64 {
        self.weighted_sq(|i| self.lattice.eigenvalue(i)).sqrt()
    }

    /// `|A u|`.
    pub fn h2_norm(&self) -> f64 {
        self.weighted_sq(|i| self.lattice.eigenvalue(i).powi(2))
            .sqrt()
    }

    /// `|A^{3/2} u|`.
    pub fn h3_norm(&self) -> f64 {
        self.weighted_sq(|i| self.lattice.eigenvalue(i).powi(3))
            .sqrt()
    }

    /// Homogeneous Sobolev norm
    /// `L^2 (2 pi / L)^{2(s-1)} sum_k (1 + |k|^2)^s |u_k|^2`, square-rooted.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let pre = self.lattice.wavenumber_unit().powf(2.0 * (s - 1.0));
        (pre * self.weighted_sq(|i| (1.0 + self.lattice.k2(i) as f64).powf(s))).sqrt()
    }

    pub fn norms(&self) -> Norms {
        let grid = PhysicalGrid::oversampled(&self.lattice);
        let mut sampler = PhysicalSampler::new(grid);
        let (linf, l4) = sampler.linf_l4(self);
        Norms {
            l2: self.l2_norm(),
            h1: self.h1_norm(),
            h2: self.h2_norm(),
            h3: self.h3_norm(),
            linf,
            l4,
            grid: sampler.size(),
        }
    }

    pub fn linf_norm(&self) -> f64 {
        PhysicalSampler::new(PhysicalGrid::oversampled(&self.lattice))
            .linf_l4(self)
            .0
    }

    // ---- lattice transfer ----------------------------------------------

    /// Copies the field onto another lattice with the same box, truncating
    /// or zero-padding as needed.
    pub fn resample(&self, target: Arc<Lattice>) -> Result<Self> {
        if target.box_length() != self.lattice.box_length() {
            return Err(Error::LatticeMismatch);
        }
        let mut out = Self::zeros(Arc::clone(&target));
        for (i, m) in self.coeffs.iter().enumerate() {
            let [kx, ky] = self.lattice.wavevector(i);
            if let Some(j) = target.index_of(kx, ky) {
                out.coeffs[j] = *m;
            }
        }
        Ok(out)
    }

    /// `|u|^2` restricted to modes absent from `target`.
    pub fn tail_l2_sq(&self, target: &Lattice) -> f64 {
        let k = target.kmax();
        self.weighted_sq(|i| {
            let [kx, ky] = self.lattice.wavevector(i);
            if kx.abs() > k || ky.abs() > k {
                1.0
            } else {
                0.0
            }
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "alpha",
            format!("must be finite and >= 0, got {alpha}"),
        ))
    }
}

/// All standard norms of a velocity field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub linf: f64,
    pub l4: f64,
    /// Physical grid size used for `linf` and `l4`.
    pub grid: usize,
}

/// Physical grid resolution for pointwise evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysicalGrid(pub usize);

impl PhysicalGrid {
    /// Twice the padded resolution. The quartic integrand of `L^4` is then
    /// integrated exactly and the grid maximum sits close to the true sup.
    pub fn oversampled(lat: &Lattice) -> Self {
        PhysicalGrid(2 * lat.padded_resolution())
    }
}

/// Evaluates velocity fields on a uniform physical grid.
pub struct PhysicalSampler {
    fft: Fft2,
    buf: Vec<Complex64>,
}

impl PhysicalSampler {
    pub fn new(grid: PhysicalGrid) -> Self {
        let n = grid.0;
        Self {
            fft: Fft2::new(n),
            buf: vec![ZERO; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.fft.size()
    }

    /// Grid values of `(u_1, u_2)` packed as `u_1 + i u_2`.
    pub fn evaluate(&mut self, u: &SpectralVelocity) -> &[Complex64] {
        let n = self.fft.size();
        let lat = u.lattice();
        assert!(
            n > 2 * lat.kmax() as usize,
            "grid of {n} points cannot represent the lattice"
        );
        self.buf.iter_mut().for_each(|z| *z = ZERO);
        let i = Complex64::new(0.0, 1.0);
        for (idx, m) in u.coeffs().iter().enumerate() {
            let [kx, ky] = lat.wavevector(idx);
            let g = wrap(kx, n) * n + wrap(ky, n);
            self.buf[g] = m[0] + i * m[1];
        }
        self.fft.inverse(&mut self.buf);
        &self.buf
    }

    /// `(||u||_inf, ||u||_{L^4})` where `|u|` is the Euclidean magnitude.
    pub fn linf_l4(&mut self, u: &SpectralVelocity) -> (f64, f64) {
        let n = self.fft.size();
        let area = u.lattice().box_length().powi(2);
        let vals = self.evaluate(u);
        let mut max2 = 0.0f64;
        let mut sum4 = 0.0f64;
        for z in vals {
            let m2 = z.norm_sqr();
            max2 = max2.max(m2);
            sum4 += m2 * m2;
        }
        let l4 = (area * sum4 / (n * n) as f64).powf(0.25);
        (max2.sqrt(), l4)
    }
}

#[inline]
pub(crate) fn wrap(k: i32, n: usize) -> usize {
    k.rem_euclid(n as i32) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lat(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::new(2.0 * PI, n).unwrap())
    }

    fn shear(lat: Arc<Lattice>) -> SpectralVelocity {
        // (sin y, 0)
        SpectralVelocity::from_fn(lat, |k| match k {
            [0, 1] => [Complex64::new(0.0, -0.5), ZERO],
            [0, -1] => [Complex64::new(0.0, 0.5), ZERO],
            _ => [ZERO; 2],
        })
    }

    #[test]
    fn leray_examples() {
        let l = lat(8);
        let mut f = SpectralVelocity::zeros(Arc::clone(&l));
        let i = l.index_of(1, 0).unwrap();
        let j = l.index_of(-1, 0).unwrap();
        f.coeffs_mut()[i] = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        f.coeffs_mut()[j] = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let p = f.leray_project();
        assert!(p.coeffs()[i][0].norm() < 1e-15);
        assert!((p.coeffs()[i][1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn leray_kills_gradients() {
        let l = lat(12);
        let kappa = l.wavenumber_unit();
        let g = SpectralVelocity::from_fn(Arc::clone(&l), |k| {
            let phi = Complex64::new(1.0 / (1 + k[0].abs() + k[1].abs()) as f64, 0.0);
            let ik = Complex64::new(0.0, kappa);
            [ik * k[0] as f64 * phi, ik * k[1] as f64 * phi]
        });
        assert!(g.leray_project().max_amplitude() < 1e-15);
    }

    #[test]
    fn helmholtz_filter_halves_lowest_mode() {
        let u = shear(lat(8));
        let f = u.helmholtz_filter(1.0).unwrap();
        assert!((f.l2_norm() - 0.5 * u.l2_norm()).abs() < 1e-15);
        assert_eq!(u.helmholtz_filter(0.0).unwrap(), u);
        assert!(u.helmholtz_filter(-0.1).is_err());
    }

    #[test]
    fn shear_norms() {
        let u = shear(lat(8));
        // |u|^2 = int sin^2 y = 2 pi^2
        assert!((u.l2_norm().powi(2) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((u.h1_norm() - u.l2_norm()).abs() < 1e-13);
        let n = u.norms();
        assert!((n.linf - 1.0).abs() < 1e-12);
        // int sin^4 y dx dy = 2 pi * 3 pi / 4
        let want = (2.0 * PI * 0.75 * PI).powf(0.25);
        assert!((n.l4 - want).abs() < 1e-12);
    }

    #[test]
    fn hs_norm_matches_h1_convention_at_s1() {
        let u = shear(lat(8));
        // s = 1: (1 + |k|^2) weight on the unit shell gives 2 |u|^2.
        assert!((u.hs_norm(1.0).powi(2) - 2.0 * u.l2_norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn resample_round_trip() {
        let small = lat(8);
        let big = lat(16);
        let u = shear(Arc::clone(&small));
        let v = u.resample(big).unwrap();
        assert_eq!(v.resample(small).unwrap(), u);
        assert_eq!(v.tail_l2_sq(u.lattice()), 0.0);
    }
}
