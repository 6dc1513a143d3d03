//! Seeded divergence-free test fields.
//!
//! Each wavevector draws its phase from its own generator keyed by
//! `(seed, kx, ky)`, so the field produced on a coarse lattice is exactly the
//! restriction of the field produced on a finer one with the same seed.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::SpectralVelocity;
use super::lattice::Lattice;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Spectral envelope of a random field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// `|u_k| = (1 + |k|^2)^{-s/2}`.
    Power(f64),
    /// Equal amplitude on every mode.
    Flat,
}

impl Envelope {
    fn amplitude(&self, k2: u32) -> f64 {
        match self {
            Envelope::Power(s) => (1.0 + k2 as f64).powf(-0.5 * s),
            Envelope::Flat => 1.0,
        }
    }
}

fn mode_seed(seed: u64, kx: i32, ky: i32) -> u64 {
    let mut z = seed
        ^ (kx as i64 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (ky as i64 as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random real divergence-free field `u_k = a(k) e^{i theta_k} k_perp / |k|`.
pub fn random_field(lattice: Arc<Lattice>, seed: u64, envelope: Envelope) -> SpectralVelocity {
    let mut u = SpectralVelocity::zeros(Arc::clone(&lattice));
    let half = lattice.len() / 2;
    let coeffs = u.coeffs_mut();
    for i in 0..half {
        let [kx, ky] = lattice.wavevector(i);
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, kx, ky));
        let theta: f64 = rng.gen::<f64>() * TAU;
        let a = envelope.amplitude(lattice.k2(i)) / (lattice.k2(i) as f64).sqrt();
        let z = Complex64::from_polar(a, theta);
        let m = [z * -(ky as f64), z * kx as f64];
        coeffs[i] = m;
        coeffs[lattice.neg(i)] = [m[0].conj(), m[1].conj()];
    }
    u
}

/// Deterministic field with envelope `envelope` whose first component has
/// every Fourier coefficient real and nonnegative, so all modes add up at
/// the origin. This is the extremal case for sup-norm estimates.
pub fn aligned_field(lattice: Arc<Lattice>, envelope: Envelope) -> SpectralVelocity {
    let mut u = SpectralVelocity::zeros(Arc::clone(&lattice));
    let half = lattice.len() / 2;
    let coeffs = u.coeffs_mut();
    for i in 0..half {
        let [kx, ky] = lattice.wavevector(i);
        let a = envelope.amplitude(lattice.k2(i)) / (lattice.k2(i) as f64).sqrt();
        let z = Complex64::new(-a * (ky as f64).signum(), 0.0);
        let m = [z * -(ky as f64), z * kx as f64];
        coeffs[i] = m;
        coeffs[lattice.neg(i)] = [m[0].conj(), m[1].conj()];
    }
    u
}

/// Random field rescaled so that its rms velocity `|u| / L` equals `rms`.
pub fn random_field_rms(
    lattice: Arc<Lattice>,
    seed: u64,
    envelope: Envelope,
    rms: f64,
) -> SpectralVelocity {
    let u = random_field(Arc::clone(&lattice), seed, envelope);
    let cur = u.l2_norm() / lattice.box_length();
    if cur == 0.0 {
        u
    } else {
        u.scale(rms / cur)
    }
}

/// Unidirectional shear `(a sin(2 pi y / L), 0)`.
pub fn shear(lattice: Arc<Lattice>, amplitude: f64) -> SpectralVelocity {
    let h = 0.5 * amplitude;
    SpectralVelocity::from_fn(lattice, |k| match k {
        [0, 1] => [Complex64::new(0.0, -h), ZERO],
        [0, -1] => [Complex64::new(0.0, h), ZERO],
        _ => [ZERO; 2],
    })
}

/// Taylor-Green cell from `psi = a cos(2 pi x / L) cos(2 pi y / L)`, scaled so
/// that the peak velocity is `amplitude`.
pub fn taylor_green(lattice: Arc<Lattice>, amplitude: f64) -> SpectralVelocity {
    let a = amplitude / lattice.wavenumber_unit();
    SpectralVelocity::from_streamfunction(lattice, |k| {
        if k[0].abs() == 1 && k[1].abs() == 1 {
            Complex64::new(0.25 * a, 0.0)
        } else {
            ZERO
        }
    })
}

/// Steady field supported on the single shell `|k|^2 = k2`, with seeded
/// phases, normalized so that `|f| / L = amplitude`.
pub fn shell_field(lattice: Arc<Lattice>, k2: u32, seed: u64, amplitude: f64) -> SpectralVelocity {
    let u = random_field(Arc::clone(&lattice), seed, Envelope::Flat);
    let lat = Arc::clone(&lattice);
    let f = u.map_diagonal(|i| if lat.k2(i) == k2 { 1.0 } else { 0.0 });
    let n = f.l2_norm() / lattice.box_length();
    if n == 0.0 {
        f
    } else {
        f.scale(amplitude / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lat(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::new(2.0 * PI, n).unwrap())
    }

    #[test]
    fn random_field_is_a_velocity() {
        let u = random_field(lat(16), 7, Envelope::Power(4.0));
        assert!(u.is_valid_velocity(1e-12));
        assert!(u.l2_norm() > 0.0);
    }

    #[test]
    fn aligned_field_peaks_at_origin() {
        let u = aligned_field(lat(16), Envelope::Flat);
        assert!(u.is_valid_velocity(1e-12));
        let sum: f64 = u.coeffs().iter().map(|m| m[0].re).sum();
        assert!(u.coeffs().iter().all(|m| m[0].im == 0.0 && m[0].re >= 0.0));
        assert!(u.linf_norm() >= sum * (1.0 - 1e-12));
    }

    #[test]
    fn fields_nest_across_resolutions() {
        let a = random_field(lat(16), 3, Envelope::Power(4.0));
        let b = random_field(lat(32), 3, Envelope::Power(4.0));
        assert_eq!(b.resample(lat(16)).unwrap(), a);
    }

    #[test]
    fn rms_normalization() {
        let u = random_field_rms(lat(16), 1, Envelope::Power(4.0), 0.2);
        assert!((u.l2_norm() / (2.0 * PI) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn shear_and_taylor_green_peaks() {
        let s = shear(lat(8), 1.0);
        assert!((s.norms().linf - 1.0).abs() < 1e-12);
        let t = taylor_green(lat(8), 1.0);
        assert!(t.is_valid_velocity(1e-14));
        assert!((t.norms().linf - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shell_field_support() {
        let f = shell_field(lat(16), 5, 2, 1.0);
        for (i, m) in f.coeffs().iter().enumerate() {
            if f.lattice().k2(i) != 5 {
                assert_eq!(m[0].norm() + m[1].norm(), 0.0);
            }
        }
        assert!((f.l2_norm() / (2.0 * PI) - 1.0).abs() < 1e-14);
    }
}
