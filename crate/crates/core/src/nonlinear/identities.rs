use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bilinear::{grad_linf, BilinearWorkspace, Padding};
use crate::error::{invalid, Result};
use crate::spectral::random::{random_field, Envelope};
use crate::spectral::Lattice;

/// Relative tolerance for the exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Spectral exponent of the battery fields: `|u_k| ~ (1 + |k|^2)^{-2}`.
pub const BATTERY_ENVELOPE: Envelope = Envelope::Power(4.0);

/// Exact identities, in report order:
/// `(B(a,b),c) = -(B(a,c),b)`, `(B(a,b),b) = 0`, `(B(a,a),Aa) = 0`,
/// `(B~(a,b),c) = (B(a,b),c) - (B(c,b),a)` and `(B~(a,b),a) = 0`.
pub const IDENTITY_NAMES: [&str; 5] = [
    "antisymmetry",
    "energy_orthogonality",
    "enstrophy_orthogonality",
    "rotational_decomposition",
    "rotational_orthogonality",
];

/// Ratios of the left side to the right-hand shape of each inequality, in
/// report order, for `(u, v, w)` and `T = |(B(u,v),w)|`:
///
/// | name | bound shape |
/// |---|---|
/// | `ladyzhenskaya` | `L4(u) <= c |u|^1/2 ||u||^1/2` |
/// | `trilinear_interp` | `T <= c |u|^1/2 ||u||^1/2 ||v|| |w|^1/2 ||w||^1/2` |
/// | `trilinear_linf_first` | `T <= c Linf(u) ||v|| |w|` |
/// | `trilinear_grad_linf` | `T <= c |u| Linf(grad v) |w|` |
/// | `trilinear_linf_third` | `T <= c |u| ||v|| Linf(w)` |
/// | `enstrophy_transfer` | `|(B(u,v),Av)| <= c ||u|| ||v|| |Av|` |
/// | `log_first` | `T <= c ||u|| ||v|| |w| (1 + log(|Au|^2/(||u||^2 l1)))^1/2` |
/// | `log_third` | `T <= c |u| ||v|| ||w|| (1 + log(|Aw|^2/(||w||^2 l1)))^1/2` |
/// | `rotational_interp` | `|(B~(u,v),w)|` against the `trilinear_interp` shape |
pub const CONSTANT_NAMES: [&str; 9] = [
    "ladyzhenskaya",
    "trilinear_interp",
    "trilinear_linf_first",
    "trilinear_grad_linf",
    "trilinear_linf_third",
    "enstrophy_transfer",
    "log_first",
    "log_third",
    "rotational_interp",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_rel_violation: f64,
    pub worst_trial: usize,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalConstant {
    pub name: String,
    pub max_ratio: f64,
    pub worst_trial: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub resolution: usize,
    pub box_length: f64,
    pub trials: usize,
    pub seed: u64,
    pub padding: Padding,
    pub identities: Vec<IdentityCheck>,
    pub constants: Vec<EmpiricalConstant>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|c| c.pass)
            && self.constants.iter().all(|c| c.max_ratio.is_finite())
    }

    pub fn identity(&self, name: &str) -> Option<&IdentityCheck> {
        self.identities.iter().find(|c| c.name == name)
    }

    pub fn constant(&self, name: &str) -> Option<&EmpiricalConstant> {
        self.constants.iter().find(|c| c.name == name)
    }
}

/// Seed of field `slot` in trial `trial` of a battery rooted at `seed`.
pub fn battery_seed(seed: u64, trial: usize, slot: usize) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D)
        .wrapping_add((trial as u64) << 8 | slot as u64)
}

#[derive(Default)]
struct Tracker {
    max: f64,
    at: usize,
}

impl Tracker {
    fn push(&mut self, v: f64, trial: usize) {
        // A NaN must surface as a failure, so it sticks once seen.
        if !self.max.is_nan() && (v.is_nan() || v > self.max) {
            self.max = v;
            self.at = trial;
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Evaluates the exact identities and the inequality ratios of
/// [`CONSTANT_NAMES`] over `trials` triples of seeded random fields.
pub fn identity_suite(lattice: Arc<Lattice>, trials: usize, seed: u64) -> Result<IdentityReport> {
    identity_suite_with(lattice, trials, seed, Padding::ThreeHalves)
}

pub fn identity_suite_with(
    lattice: Arc<Lattice>,
    trials: usize,
    seed: u64,
    padding: Padding,
) -> Result<IdentityReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let mut ws = BilinearWorkspace::with_padding(Arc::clone(&lattice), padding);
    let l1 = lattice.lambda1();

    let names_id = IDENTITY_NAMES;
    let names_c = CONSTANT_NAMES;
    let mut id: Vec<Tracker> = names_id.iter().map(|_| Tracker::default()).collect();
    let mut co: Vec<Tracker> = names_c.iter().map(|_| Tracker::default()).collect();

    for t in 0..trials {
        let field = |slot| {
            random_field(
                Arc::clone(&lattice),
                battery_seed(seed, t, slot),
                BATTERY_ENVELOPE,
            )
        };
        let w1 = field(0);
        let w2 = field(1);
        let w3 = field(2);

        let b12 = ws.advective(&w1, &w2)?;
        let b13 = ws.advective(&w1, &w3)?;
        let b32 = ws.advective(&w3, &w2)?;
        let bt12 = ws.rotational(&w1, &w2)?;
        let b11 = ws.advective(&w1, &w1)?;
        let aw1 = w1.apply_stokes();

        let n1 = (w1.l2_norm(), w1.h1_norm(), w1.h2_norm());
        let n2 = (w2.l2_norm(), w2.h1_norm(), w2.h2_norm());
        let n3 = (w3.l2_norm(), w3.h1_norm(), w3.h2_norm());

        let x = b12.inner_unchecked(&w3);
        let y = b13.inner_unchecked(&w2);
        id[0].push(
            ratio((x + y).abs(), b12.l2_norm() * n3.0 + b13.l2_norm() * n2.0),
            t,
        );
        let e = b12.inner_unchecked(&w2);
        id[1].push(ratio(e.abs(), b12.l2_norm() * n2.0), t);
        let z = b11.inner_unchecked(&aw1);
        id[2].push(ratio(z.abs(), b11.l2_norm() * aw1.l2_norm()), t);
        let bt = bt12.inner_unchecked(&w3);
        let r = b32.inner_unchecked(&w1);
        let scale = bt12.l2_norm() * n3.0 + b12.l2_norm() * n3.0 + b32.l2_norm() * n1.0;
        id[3].push(ratio((bt - x + r).abs(), scale), t);
        let o = bt12.inner_unchecked(&w1);
        id[4].push(ratio(o.abs(), bt12.l2_norm() * n1.0), t);

        // empirical constants; (u, v, w) = (w1, w2, w3) and |<B(u,v),w>| = |x|
        let linf1 = w1.linf_norm();
        let linf3 = w3.linf_norm();
        let l4 = w1.norms().l4;
        co[0].push(ratio(l4, (n1.0 * n1.1).sqrt()), t);
        co[1].push(
            ratio(x.abs(), (n1.0 * n1.1).sqrt() * n2.1 * (n3.0 * n3.1).sqrt()),
            t,
        );
        co[2].push(ratio(x.abs(), linf1 * n2.1 * n3.0), t);
        co[3].push(ratio(x.abs(), n1.0 * grad_linf(&w2) * n3.0), t);
        co[4].push(ratio(x.abs(), n1.0 * n2.1 * linf3), t);
        let b12_au = b12.inner_unchecked(&w2.apply_stokes());
        co[5].push(ratio(b12_au.abs(), n1.1 * n2.1 * n2.2), t);
        let log_u = (1.0 + (n1.2 * n1.2 / (n1.1 * n1.1 * l1)).ln()).sqrt();
        co[6].push(ratio(x.abs(), n1.1 * n2.1 * n3.0 * log_u), t);
        let log_w = (1.0 + (n3.2 * n3.2 / (n3.1 * n3.1 * l1)).ln()).sqrt();
        co[7].push(ratio(x.abs(), n1.0 * n2.1 * n3.1 * log_w), t);
        co[8].push(
            ratio(bt.abs(), (n1.0 * n1.1).sqrt() * n2.1 * (n3.0 * n3.1).sqrt()),
            t,
        );
    }

    Ok(IdentityReport {
        resolution: lattice.resolution(),
        box_length: lattice.box_length(),
        trials,
        seed,
        padding,
        identities: names_id
            .iter()
            .zip(id)
            .map(|(n, tr)| IdentityCheck {
                name: n.to_string(),
                max_rel_violation: tr.max,
                worst_trial: tr.at,
                tolerance: IDENTITY_TOL,
                pass: tr.max <= IDENTITY_TOL,
            })
            .collect(),
        constants: names_c
            .iter()
            .zip(co)
            .map(|(n, tr)| EmpiricalConstant {
                name: n.to_string(),
                max_ratio: tr.max,
                worst_trial: tr.at,
            })
            .collect(),
    })
}
