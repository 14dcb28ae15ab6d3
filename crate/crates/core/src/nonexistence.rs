//! Nonexistence certificate for four-species waves.
//!
//! Consider a four-species competition system in which species 4 would
//! have to invade a wave formed by species 1-3. Eliminating species 4's
//! own equilibrium load leaves the reduced growth rates
//!
//! ```text
//! sigma_tilde_i = sigma_i - c_i4 sigma_4 / c_44,   i = 1, 2, 3.
//! ```
//!
//! If those stay positive (condition H1) and the lower maximum-principle
//! bound of the reduced three-species system, weighted by species 4's
//! competition row `alpha*_i = c_4i`, clears `sigma_4`,
//!
//! ```text
//! min_i ( c_4i * min_j sigma_tilde_j / c_ji ) * (min d) / (max d)
//!     >= sigma_4                                  (condition H2),
//! ```
//!
//! then no traveling wave of the full system can leave species 4 extinct
//! on both ends while the wave carries enough total density to feed on:
//! the certificate reports such configurations as nonexistent. Failure of
//! either condition is inconclusive, not a proof of existence.
//!
//! The min/max over diffusion rates ranges over all four by default;
//! [`DiffusionRange::FirstThree`] restricts it to the reduced system's
//! own rates, which is the variant that matches `barrier::nbmp_bounds` on
//! the reduced system exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LvSystem;

/// Absolute bisection tolerance of [`sigma4_threshold`].
const THRESHOLD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DiffusionRange {
    #[serde(rename = "all")]
    #[default]
    All,
    #[serde(rename = "first3")]
    FirstThree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "certified-nonexistent")]
    CertifiedNonexistent,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonexistenceCertificate {
    pub verdict: Verdict,
    pub h1_holds: bool,
    /// Reduced growth rates `sigma_tilde_1..3`.
    pub sigma_tilde: Vec<f64>,
    pub h2_holds: bool,
    /// Left side of H2 (weighted lower bound of the reduced system).
    pub h2_lhs: f64,
    /// Right side of H2 (`sigma_4`).
    pub h2_rhs: f64,
    /// Weights `alpha*_i = c_4i` used on the reduced system.
    pub alpha_star: Vec<f64>,
    pub diffusion_range: DiffusionRange,
}

/// Evaluate both conditions on a four-species system.
pub fn check_nonexistence(
    sys: &LvSystem,
    range: DiffusionRange,
) -> Result<NonexistenceCertificate> {
    if sys.n() != 4 {
        return Err(Error::Dimension {
            what: "species count",
            expected: 4,
            actual: sys.n(),
        });
    }
    let c = sys.c();
    let sigma4 = sys.sigma()[3];
    let c44 = c[3][3];
    let sigma_tilde: Vec<f64> = (0..3)
        .map(|i| sys.sigma()[i] - c[i][3] * sigma4 / c44)
        .collect();
    let h1_holds = sigma_tilde.iter().all(|&s| s > 0.0);

    let alpha_star: Vec<f64> = (0..3).map(|i| c[3][i]).collect();
    // Column-wise intercept minima of the reduced system; the same
    // arithmetic as barrier::lv_box followed by barrier::nbmp_bounds, kept
    // evaluable even when H1 fails (the value is then <= 0 and H2 fails
    // with it).
    let mut weighted_min = f64::INFINITY;
    for i in 0..3 {
        let mut lower_i = f64::INFINITY;
        for j in 0..3 {
            lower_i = lower_i.min(sigma_tilde[j] / c[j][i]);
        }
        weighted_min = weighted_min.min(alpha_star[i] * lower_i);
    }
    let d_slice = match range {
        DiffusionRange::All => sys.d(),
        DiffusionRange::FirstThree => &sys.d()[..3],
    };
    let d_min = d_slice.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d_slice.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let h2_lhs = weighted_min * d_min / d_max;
    let h2_holds = h2_lhs >= sigma4;

    Ok(NonexistenceCertificate {
        verdict: if h1_holds && h2_holds {
            Verdict::CertifiedNonexistent
        } else {
            Verdict::Inconclusive
        },
        h1_holds,
        sigma_tilde,
        h2_holds,
        h2_lhs,
        h2_rhs: sigma4,
        alpha_star,
        diffusion_range: range,
    })
}

/// Largest `sigma_4` (to within `1e-9`) for which the certificate still
/// reports nonexistence, treating the given system as a template whose
/// fourth growth rate is varied. Returns `0.0` when even vanishing
/// `sigma_4` is not certified.
pub fn sigma4_threshold(sys: &LvSystem, range: DiffusionRange) -> Result<f64> {
    if sys.n() != 4 {
        return Err(Error::Dimension {
            what: "species count",
            expected: 4,
            actual: sys.n(),
        });
    }
    let certified = |s4: f64| -> Result<bool> {
        let probe = sys.clone().with_sigma(3, s4)?;
        Ok(check_nonexistence(&probe, range)?.verdict == Verdict::CertifiedNonexistent)
    };
    // The left side of H2 decreases in sigma_4 while the right side
    // increases, so certification is monotone and bisection applies.
    if !certified(1e-12)? {
        return Ok(0.0);
    }
    let mut lo = 1e-12;
    let mut hi = sys.sigma()[3].max(1.0);
    while certified(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e18 {
            return Err(Error::invalid(
                "sigma4 threshold search did not bracket a failure",
            ));
        }
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if certified(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
