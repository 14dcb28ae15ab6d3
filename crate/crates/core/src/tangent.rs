//! Tangent-line lower bound for two-species competition.
//!
//! For the system
//!
//! ```text
//! u'' + theta u' + alpha u (1 - u - a1 v) = 0
//! d v'' + theta v' + beta k v (1 - a2 u - v) = 0
//! ```
//!
//! with strong competition (`a1, a2 > 1`), the combination
//!
//! ```text
//! H(u, v) = alpha u (1 - u - a1 v) + beta k v (1 - a2 u - v)
//! ```
//!
//! vanishes on a conic whose branch L through (0, 1) and (1, 0) bounds the
//! region where `H >= 0`. The largest `lambda2` such that the triangle
//! `{alpha u + d beta v <= lambda2, u, v >= 0}` stays inside that region
//! is found by sliding the line `alpha u + d beta v = lambda` until it
//! either hits a corner of L or becomes tangent to it:
//!
//! * case I: the line is steeper than L at (0, 1); it exits through that
//!   corner and `lambda2 = d beta`,
//! * case II: the line is shallower than L at (1, 0); `lambda2 = alpha`,
//! * case III: the line slope falls between the endpoint slopes of L and
//!   the optimum is an interior tangency, found from a quadratic obtained
//!   by squaring the tangency condition.
//!
//! `lambda2` then feeds the usual barrier pipeline (`eta`, `lambda1`) to
//! produce a lower bound for `alpha u + beta v` that dominates the
//! polyhedral (simplex-only) construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible tangency roots must satisfy the tangency equation to this
/// tolerance, relative to the line slope magnitude.
const TANGENCY_RESIDUAL_TOL: f64 = 1e-9;

/// Relative threshold below which the leading quadratic coefficient is
/// treated as zero and the linear fallback applies.
const QUADRATIC_DEGENERACY_TOL: f64 = 1e-12;

/// Parameters of the two-species system. Diffusion rates are normalized to
/// `(1, d)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoSpeciesParams {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub k: f64,
    pub a1: f64,
    pub a2: f64,
}

impl TwoSpeciesParams {
    pub fn new(alpha: f64, beta: f64, d: f64, k: f64, a1: f64, a2: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("d", d), ("k", k)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and positive"
                )));
            }
        }
        for (name, v) in [("a1", a1), ("a2", a2)] {
            if !v.is_finite() || v <= 1.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and greater than 1 (strong competition)"
                )));
            }
        }
        Ok(TwoSpeciesParams {
            alpha,
            beta,
            d,
            k,
            a1,
            a2,
        })
    }

    /// Slope of the sliding line `alpha u + d beta v = lambda` in the
    /// `(u, v)` plane.
    pub fn line_slope(&self) -> f64 {
        -self.alpha / (self.d * self.beta)
    }
}

/// `H(u, v)`, the weighted sum of the two kinetic terms.
pub fn h_value(p: &TwoSpeciesParams, u: f64, v: f64) -> f64 {
    p.alpha * u * (1.0 - u - p.a1 * v) + p.beta * p.k * v * (1.0 - p.a2 * u - v)
}

/// Discriminant under the square root of the branch formula; nonnegative
/// for `0 <= u <= 1`.
fn branch_disc(p: &TwoSpeciesParams, u: f64) -> f64 {
    let lin = p.alpha * p.a1 * u + p.beta * p.k * (p.a2 * u - 1.0);
    lin * lin - 4.0 * p.alpha * p.beta * p.k * u * (u - 1.0)
}

/// Upper branch L of `{H = 0}`, the root of the quadratic in `v`:
///
/// ```text
/// v(u) = [-(alpha a1 u + beta k (a2 u - 1)) + sqrt(disc(u))] / (2 beta k)
/// ```
///
/// with `v(0) = 1` and `v(1) = 0`.
pub fn hyperbola_v(p: &TwoSpeciesParams, u: f64) -> Result<f64> {
    let disc = branch_disc(p, u);
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant { u });
    }
    let lin = p.alpha * p.a1 * u + p.beta * p.k * (p.a2 * u - 1.0);
    Ok((-lin + disc.sqrt()) / (2.0 * p.beta * p.k))
}

/// Slope `dv/du` of the branch L.
pub fn hyperbola_slope(p: &TwoSpeciesParams, u: f64) -> Result<f64> {
    let disc = branch_disc(p, u);
    if disc < 0.0 {
        return Err(Error::NegativeDiscriminant { u });
    }
    if disc == 0.0 {
        return Err(Error::DegenerateTangency { u });
    }
    let x = p.alpha * p.a1 + p.beta * p.k * p.a2;
    let lin = p.alpha * p.a1 * u + p.beta * p.k * (p.a2 * u - 1.0);
    let inner = lin * x - 2.0 * p.alpha * p.beta * p.k * (2.0 * u - 1.0);
    Ok((-x + inner / disc.sqrt()) / (2.0 * p.beta * p.k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    I,
    II,
    III,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseId::I => "I",
            CaseId::II => "II",
            CaseId::III => "III",
        };
        f.write_str(s)
    }
}

/// Compare the line slope with the endpoint slopes of L. Boundary ties go
/// to the corner cases, so `lambda2(d)` stays continuous across the case
/// switches. The endpoint slopes use their closed forms rather than the
/// general branch formula; both agree to rounding, but the closed forms
/// resolve exact ties exactly.
pub fn classify_case(p: &TwoSpeciesParams) -> CaseId {
    let s = p.line_slope();
    let bk = p.beta * p.k;
    let s0 = (-p.alpha * (p.a1 - 1.0) - bk * p.a2) / bk;
    let s1 = -p.alpha / (p.alpha * p.a1 + bk * (p.a2 - 1.0));
    if s <= s0 {
        CaseId::I
    } else if s >= s1 {
        CaseId::II
    } else {
        CaseId::III
    }
}

/// Coefficients of the squared tangency condition
/// `(A - D G) u^2 + (B - E G) u + (C - J G) = 0`, reported for diagnosis
/// of case III results.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub j: f64,
    pub g: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TangencyResult {
    pub case_id: CaseId,
    pub lambda2: f64,
    /// Point of L where the optimal line touches.
    pub touch_point: [f64; 2],
    /// Present for case III only.
    pub aux: Option<QuadraticCoeffs>,
}

/// Largest `lambda` with `{alpha u + d beta v <= lambda, u, v >= 0}`
/// contained in `{H >= 0}`.
pub fn tangent_lambda2(p: &TwoSpeciesParams) -> Result<TangencyResult> {
    match classify_case(p) {
        CaseId::I => Ok(TangencyResult {
            case_id: CaseId::I,
            lambda2: p.d * p.beta,
            touch_point: [0.0, 1.0],
            aux: None,
        }),
        CaseId::II => Ok(TangencyResult {
            case_id: CaseId::II,
            lambda2: p.alpha,
            touch_point: [1.0, 0.0],
            aux: None,
        }),
        CaseId::III => tangency_case_iii(p),
    }
}

fn tangency_case_iii(p: &TwoSpeciesParams) -> Result<TangencyResult> {
    let (alpha, beta, k, d) = (p.alpha, p.beta, p.k, p.d);
    let bk = beta * k;
    let x = alpha * p.a1 + bk * p.a2;
    // The slope numerator is linear in u: P(u) = Dcap u + Fcap, and the
    // discriminant is disc(u) = Dcap u^2 + E u + J. Squaring the tangency
    // condition P(u)/sqrt(disc) = X - 2 alpha k / d gives the quadratic
    // P(u)^2 = G disc(u).
    let dcap = x * x - 4.0 * alpha * bk;
    let fcap = -bk * x + 2.0 * alpha * bk;
    let a = dcap * dcap;
    let b = 2.0 * dcap * fcap;
    let c = fcap * fcap;
    let e = 2.0 * fcap;
    let j = bk * bk;
    let g = {
        let t = x - 2.0 * alpha * k / d;
        t * t
    };
    let aux = QuadraticCoeffs {
        a,
        b,
        c,
        d: dcap,
        e,
        j,
        g,
        x,
    };

    let qa = a - dcap * g;
    let qb = b - e * g;
    let qc = c - j * g;
    let candidates = solve_quadratic(qa, qb, qc);
    if candidates.is_empty() {
        return Err(Error::NoAdmissibleRoot {
            candidates: vec![],
            residuals: vec![],
        });
    }

    // Squaring introduces spurious roots; keep those inside the unit
    // interval, on the positive branch, and actually tangent.
    let line = p.line_slope();
    let slope_scale = line.abs().max(1.0);
    let mut best: Option<(f64, f64, f64)> = None; // (residual, u, v)
    let mut residuals = Vec::new();
    for &u in &candidates {
        let admissible = if u > 0.0 && u < 1.0 {
            match (hyperbola_v(p, u), hyperbola_slope(p, u)) {
                (Ok(v), Ok(s)) if v > 0.0 => {
                    let r = (s - line).abs();
                    residuals.push(r);
                    r <= TANGENCY_RESIDUAL_TOL * slope_scale
                }
                _ => {
                    residuals.push(f64::INFINITY);
                    false
                }
            }
        } else {
            residuals.push(f64::INFINITY);
            false
        };
        if admissible {
            let v = hyperbola_v(p, u)?;
            let r = *residuals.last().unwrap();
            if best.is_none_or(|(rb, _, _)| r < rb) {
                best = Some((r, u, v));
            }
        }
    }
    let (_, u, v) = best.ok_or(Error::NoAdmissibleRoot {
        candidates,
        residuals,
    })?;
    Ok(TangencyResult {
        case_id: CaseId::III,
        lambda2: alpha * u + d * beta * v,
        touch_point: [u, v],
        aux: Some(aux),
    })
}

/// Real roots of `qa u^2 + qb u + qc = 0`, using the cancellation-free
/// form of the quadratic formula, with a linear fallback when the leading
/// coefficient degenerates.
fn solve_quadratic(qa: f64, qb: f64, qc: f64) -> Vec<f64> {
    let scale = qa.abs();
    if scale <= QUADRATIC_DEGENERACY_TOL * (qb.abs() + qc.abs()).max(1e-300) {
        if qb == 0.0 {
            return vec![];
        }
        return vec![-qc / qb];
    }
    if qb == 0.0 {
        let r2 = -qc / qa;
        if r2 < 0.0 {
            return vec![];
        }
        let r = r2.sqrt();
        return vec![r, -r];
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return vec![];
    }
    let q = -(qb + qb.signum() * disc.sqrt()) / 2.0;
    let mut roots = vec![q / qa];
    if q != 0.0 {
        roots.push(qc / q);
    }
    roots
}

/// Polyhedral lower bound that does not use the tangent construction:
/// `min(alpha / (a2 d), beta / a1) * min(1, d^2)`.
pub fn baseline_lower_bound(p: &TwoSpeciesParams) -> f64 {
    (p.alpha / (p.a2 * p.d)).min(p.beta / p.a1) * (1.0f64).min(p.d * p.d)
}

/// How the tangent level is converted into a bound on `alpha u + beta v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    /// Run the barrier pipeline on `q = alpha u + d beta v` and divide the
    /// resulting `lambda1` by `max(1, d)`.
    #[default]
    Nested,
    /// Rescale the second weight to `beta / d` first, so the pipeline's
    /// `lambda1` bounds `alpha u + beta v` directly.
    Reweighted,
}

/// Tangent level together with the barrier pipeline quantities derived
/// from it.
#[derive(Debug, Clone, Serialize)]
pub struct ImprovedBound {
    pub composition: Composition,
    pub tangency: TangencyResult,
    pub eta: f64,
    pub lambda1: f64,
    /// Lower bound for `alpha u + beta v` along the wave.
    pub bound: f64,
}

pub fn improved_pipeline(p: &TwoSpeciesParams, comp: Composition) -> Result<ImprovedBound> {
    let dmax = p.d.max(1.0);
    let dmin = p.d.min(1.0);
    match comp {
        Composition::Nested => {
            let t = tangent_lambda2(p)?;
            let eta = t.lambda2 / dmax;
            let lambda1 = eta * dmin;
            Ok(ImprovedBound {
                composition: comp,
                eta,
                lambda1,
                bound: lambda1 / dmax,
                tangency: t,
            })
        }
        Composition::Reweighted => {
            let rescaled = TwoSpeciesParams::new(p.alpha, p.beta / p.d, p.d, p.k, p.a1, p.a2)?;
            let t = tangent_lambda2(&rescaled)?;
            let eta = t.lambda2 / dmax;
            let lambda1 = eta * dmin;
            Ok(ImprovedBound {
                composition: comp,
                eta,
                lambda1,
                bound: lambda1,
                tangency: t,
            })
        }
    }
}

/// Lower bound for `alpha u + beta v` using the default composition.
pub fn improved_lower_bound(p: &TwoSpeciesParams) -> Result<f64> {
    Ok(improved_pipeline(p, Composition::Nested)?.bound)
}
