use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Square 2D complex FFT on an `n x n` grid stored row-major (`ix * n + iy`).
///
/// Both directions are unnormalized; callers scale forward transforms by
/// `1 / n^2` so that physical values are exact trigonometric sums.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    transposed: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            transposed: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// `x_j = sum_k X_k exp(+2 pi i k.j / n)`.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        let plan = Arc::clone(&self.inverse);
        self.run(plan.as_ref(), buf);
    }

    /// `X_k = sum_j x_j exp(-2 pi i k.j / n)`.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        let plan = Arc::clone(&self.forward);
        self.run(plan.as_ref(), buf);
    }

    fn run(&mut self, plan: &dyn Fft<f64>, buf: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n * n);
        plan.process_with_scratch(buf, &mut self.scratch);
        transpose(buf, &mut self.transposed, n);
        plan.process_with_scratch(&mut self.transposed, &mut self.scratch);
        transpose(&self.transposed, buf, n);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = 12;
        let mut fft = Fft2::new(n);
        let orig: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let mut buf = orig.clone();
        fft.forward(&mut buf);
        fft.inverse(&mut buf);
        let scale = 1.0 / (n * n) as f64;
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a * scale - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_inverse() {
        let n = 8;
        let mut fft = Fft2::new(n);
        let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
        // mode (kx, ky) = (1, 2)
        buf[n + 2] = Complex64::new(1.0, 0.0);
        fft.inverse(&mut buf);
        for ix in 0..n {
            for iy in 0..n {
                let phase = 2.0 * std::f64::consts::PI * (ix as f64 + 2.0 * iy as f64) / n as f64;
                let want = Complex64::new(phase.cos(), phase.sin());
                assert!((buf[ix * n + iy] - want).norm() < 1e-13);
            }
        }
    }
}
