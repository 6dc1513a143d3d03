use std::sync::Arc;

use num_complex::Complex64;

use super::bilinear::Form;
use crate::error::{Error, Result};
use crate::spectral::SpectralVelocity;

/// Largest lattice the direct sum accepts by default.
pub const DEFAULT_MODE_BUDGET: usize = 1024;

/// Direct `O(M^2)` convolution over retained mode pairs, followed by the
/// same truncation and Leray projection as the pseudo-spectral path.
pub fn convolution_oracle(
    u: &SpectralVelocity,
    w: &SpectralVelocity,
    form: Form,
    mode_budget: usize,
) -> Result<SpectralVelocity> {
    u.ensure_same_lattice(w)?;
    let lat = Arc::clone(u.lattice());
    if lat.len() > mode_budget {
        return Err(Error::ModeBudgetExceeded {
            modes: lat.len(),
            budget: mode_budget,
        });
    }
    let kappa = lat.wavenumber_unit();
    let i = Complex64::new(0.0, 1.0);
    let mut out = SpectralVelocity::zeros(Arc::clone(&lat));
    let uc = u.coeffs();
    let wc = w.coeffs();
    let acc = out.coeffs_mut();
    for (p, up) in uc.iter().enumerate() {
        let [px, py] = lat.wavevector(p);
        for (q, wq) in wc.iter().enumerate() {
            let [qx, qy] = lat.wavevector(q);
            let Some(k) = lat.index_of(px + qx, py + qy) else {
                continue;
            };
            match form {
                Form::Advective => {
                    let ud = (up[0] * qx as f64 + up[1] * qy as f64) * i * kappa;
                    acc[k][0] += ud * wq[0];
                    acc[k][1] += ud * wq[1];
                }
                Form::Rotational => {
                    let om = i * kappa * (wq[1] * qx as f64 - wq[0] * qy as f64);
                    acc[k][0] -= up[1] * om;
                    acc[k][1] += up[0] * om;
                }
            }
        }
    }
    out.leray_project_in_place();
    Ok(out)
}
