//! A-posteriori checks: bound verification along computed profiles,
//! a Monte Carlo containment oracle for the tangent-line estimate, and a
//! side-by-side comparison of the lower-bound pipelines.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::barrier::{BarrierKind, BarrierTriple, Bounds};
use crate::error::{Error, Result};
use crate::tangent::{h_value, improved_pipeline, tangent_lambda2, Composition, TwoSpeciesParams};
use crate::waves::WaveProfile;

/// Sign slack of the containment oracle: a sample counts as inside while
/// `H >= -CONTAINMENT_SLACK`.
const CONTAINMENT_SLACK: f64 = 1e-12;

/// Relative slack of the dominance assertion in [`compare_bounds`].
const DOMINANCE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Lower,
    Upper,
}

/// Which weighted density broke a bound: `p = sum alpha_i u_i` or
/// `q = sum alpha_i d_i u_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    P,
    Q,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub x: f64,
    pub value: f64,
    pub side: BoundSide,
    pub quantity: Quantity,
}

/// Extrema and barrier levels of the diffusion-weighted density `q`.
#[derive(Debug, Clone, Serialize)]
pub struct QSection {
    pub q_min: f64,
    pub q_max: f64,
    pub lambda1_lower: f64,
    pub lambda1_upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub alpha: Vec<f64>,
    pub tol: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub violations: Vec<Violation>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<QSection>,
}

fn check_weights(profile: &WaveProfile, alpha: &[f64]) -> Result<()> {
    let n = profile.species();
    if alpha.len() != n {
        return Err(Error::Dimension {
            what: "weight vector",
            expected: n,
            actual: alpha.len(),
        });
    }
    if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
        return Err(Error::invalid("weights must be finite and positive"));
    }
    Ok(())
}

fn weighted_density(profile: &WaveProfile, weights: &[f64], j: usize) -> f64 {
    profile
        .values()
        .iter()
        .zip(weights)
        .map(|(u, w)| w * u[j])
        .sum()
}

/// Check `lambda_lower <= p(x) <= lambda_upper` at every grid point, with
/// slack `tol` on each side.
pub fn verify_bounds(
    profile: &WaveProfile,
    alpha: &[f64],
    bounds: &Bounds,
    tol: f64,
) -> Result<BoundsReport> {
    check_weights(profile, alpha)?;
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::invalid("tolerance must be finite and nonnegative"));
    }
    let mut p_min = f64::INFINITY;
    let mut p_max = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for j in 0..profile.grid().num_points() {
        let p = weighted_density(profile, alpha, j);
        p_min = p_min.min(p);
        p_max = p_max.max(p);
        if p < bounds.lambda_lower - tol {
            violations.push(Violation {
                x: profile.grid().point(j),
                value: p,
                side: BoundSide::Lower,
                quantity: Quantity::P,
            });
        } else if p > bounds.lambda_upper + tol {
            violations.push(Violation {
                x: profile.grid().point(j),
                value: p,
                side: BoundSide::Upper,
                quantity: Quantity::P,
            });
        }
    }
    let pass = violations.is_empty();
    Ok(BoundsReport {
        alpha: alpha.to_vec(),
        tol,
        p_min,
        p_max,
        lambda_lower: bounds.lambda_lower,
        lambda_upper: bounds.lambda_upper,
        violations,
        pass,
        q: None,
    })
}

/// Like [`verify_bounds`], additionally checking the diffusion-weighted
/// density `q = sum alpha_i d_i u_i` against the barrier levels
/// `lambda_1` of the two triples.
pub fn verify_bounds_with_barriers(
    profile: &WaveProfile,
    alpha: &[f64],
    d: &[f64],
    bounds: &Bounds,
    lower: &BarrierTriple,
    upper: &BarrierTriple,
    tol: f64,
) -> Result<BoundsReport> {
    let mut report = verify_bounds(profile, alpha, bounds, tol)?;
    let n = profile.species();
    if d.len() != n {
        return Err(Error::Dimension {
            what: "diffusion vector",
            expected: n,
            actual: d.len(),
        });
    }
    if d.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::invalid(
            "diffusion rates must be finite and positive",
        ));
    }
    if lower.kind != BarrierKind::Lower || upper.kind != BarrierKind::Upper {
        return Err(Error::invalid("barrier triples passed in the wrong order"));
    }
    if lower.alpha != alpha || upper.alpha != alpha {
        return Err(Error::invalid(
            "barrier triples were built with different weights",
        ));
    }
    let weights: Vec<f64> = alpha.iter().zip(d).map(|(a, di)| a * di).collect();
    let mut q_min = f64::INFINITY;
    let mut q_max = f64::NEG_INFINITY;
    for j in 0..profile.grid().num_points() {
        let q = weighted_density(profile, &weights, j);
        q_min = q_min.min(q);
        q_max = q_max.max(q);
        if q < lower.lambda1 - tol {
            report.violations.push(Violation {
                x: profile.grid().point(j),
                value: q,
                side: BoundSide::Lower,
                quantity: Quantity::Q,
            });
        } else if q > upper.lambda1 + tol {
            report.violations.push(Violation {
                x: profile.grid().point(j),
                value: q,
                side: BoundSide::Upper,
                quantity: Quantity::Q,
            });
        }
    }
    report.pass = report.violations.is_empty();
    report.q = Some(QSection {
        q_min,
        q_max,
        lambda1_lower: lower.lambda1,
        lambda1_upper: upper.lambda1,
    });
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentReport {
    pub lambda: f64,
    pub contained: bool,
    pub samples_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_at_witness: Option<f64>,
}

/// Sample the triangle `{u, v >= 0, alpha u + d beta v <= lambda}` and
/// test whether `H >= 0` holds throughout (up to a `1e-12` slack).
///
/// Besides `n_samples` uniform draws, the oracle always checks the
/// triangle's corners and the tangency touch point rescaled onto the
/// query line; the latter is where containment fails first when `lambda`
/// exceeds the tangent-line estimate, and random sampling alone would
/// miss that sliver at small excesses.
pub fn containment_oracle(
    lambda: f64,
    p: &TwoSpeciesParams,
    n_samples: usize,
    seed: u64,
) -> Result<ContainmentReport> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid("lambda must be finite and nonnegative"));
    }
    if n_samples == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let b = [lambda / p.alpha, 0.0];
    let c = [0.0, lambda / (p.d * p.beta)];
    let tangency = tangent_lambda2(p)?;
    let t = if tangency.lambda2 > 0.0 {
        lambda / tangency.lambda2
    } else {
        0.0
    };
    let touch = [t * tangency.touch_point[0], t * tangency.touch_point[1]];

    let mut checked = 0usize;
    let mut probe = |u: f64, v: f64| -> Option<([f64; 2], f64)> {
        checked += 1;
        let h = h_value(p, u, v);
        if h < -CONTAINMENT_SLACK {
            Some(([u, v], h))
        } else {
            None
        }
    };

    let mut witness = None;
    for [u, v] in [[0.0, 0.0], b, c, touch] {
        if witness.is_none() {
            witness = probe(u, v);
        }
    }
    if witness.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..n_samples {
            let r1: f64 = rng.gen::<f64>();
            let r2: f64 = rng.gen::<f64>();
            // Uniform over the triangle (0,0), b, c.
            let s = r1.sqrt();
            let u = s * (1.0 - r2) * b[0];
            let v = s * r2 * c[1];
            witness = probe(u, v);
            if witness.is_some() {
                break;
            }
        }
    }
    let (witness, h_at_witness) = match witness {
        Some((w, h)) => (Some(w), Some(h)),
        None => (None, None),
    };
    Ok(ContainmentReport {
        lambda,
        contained: witness.is_none(),
        samples_checked: checked,
        witness,
        h_at_witness,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundComparison {
    pub baseline: f64,
    pub improved: f64,
    /// `improved / baseline`.
    pub ratio: f64,
    /// Corner-based estimate `min(alpha / a2, d beta / a1)`.
    pub polyhedral_lambda2: f64,
    /// The corner estimate pushed through the same nested composition.
    pub polyhedral_bound: f64,
}

/// Compare the tangent-line lower bound against the baseline and the
/// corner (polyhedral) estimate it must dominate.
pub fn compare_bounds(p: &TwoSpeciesParams) -> Result<BoundComparison> {
    let baseline = crate::tangent::baseline_lower_bound(p);
    let improved = improved_pipeline(p, Composition::Nested)?;
    let polyhedral_lambda2 = (p.alpha / p.a2).min(p.d * p.beta / p.a1);
    let eta = polyhedral_lambda2 / p.d.max(1.0);
    let lambda1 = eta * p.d.min(1.0);
    let polyhedral_bound = lambda1 / p.d.max(1.0);
    let slack = DOMINANCE_SLACK * improved.bound.abs().max(polyhedral_bound.abs()).max(1e-300);
    if improved.bound < polyhedral_bound - slack {
        return Err(Error::invalid(
            "tangent-line bound fell below the corner estimate; parameters outside the validated regime",
        ));
    }
    Ok(BoundComparison {
        baseline,
        improved: improved.bound,
        ratio: improved.bound / baseline,
        polyhedral_lambda2,
        polyhedral_bound,
    })
}
