//! Maximum-principle bounds for weighted total densities.
//!
//! For a wave profile connecting equilibria, the weighted density
//! `p(x) = sum_i alpha_i u_i(x)` is trapped between two levels built from a
//! componentwise box `lower_i <= u_i <= upper_i` on which the per-capita
//! terms have one sign on each side:
//!
//! * `f_i >= 0` on the inner simplex `sum_i u_i / lower_i <= 1`,
//! * `f_i <= 0` beyond the outer simplex `sum_i u_i / upper_i >= 1`.
//!
//! With such a box the two-sided bound reads
//!
//! ```text
//! chi * (min_i alpha_i lower_i) * (min_i d_i) / (max_i d_i)
//!     <= p(x) <=
//! (max_i alpha_i upper_i) * (max_i d_i) / (min_i d_i),
//! ```
//!
//! where `chi` drops the lower bound to zero when either endpoint state is
//! the origin (the profile then dips arbitrarily close to zero in the
//! tail). The intermediate quantities behind these bounds are the barrier
//! triples `(lambda1, eta, lambda2)`: levels of the diffusion-weighted
//! density `q(x) = sum_i alpha_i d_i u_i` and of `p` whose sub/superlevel
//! simplices nest inside the box simplices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LvSystem;

/// Sign slack for the sampled hypothesis check: per-capita values this
/// close to zero count as the boundary case, not a violation.
const HYPOTHESIS_SLACK: f64 = 1e-12;

/// Rejection sampling for the outer region draws from the slab
/// `[0, OUTER_BOX_FACTOR * max_i upper_i]^n`.
const OUTER_BOX_FACTOR: f64 = 2.0;

/// Componentwise box `0 < lower_i < upper_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl HypothesisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Dimension {
                what: "box levels",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::invalid("box needs at least one species"));
        }
        for i in 0..lower.len() {
            if !(lower[i].is_finite() && upper[i].is_finite()) || lower[i] <= 0.0 {
                return Err(Error::invalid("box levels must be finite and positive"));
            }
            if lower[i] >= upper[i] {
                return Err(Error::DegenerateBox { index: i });
            }
        }
        Ok(HypothesisBox { lower, upper })
    }

    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Box of intercept extrema of the kinetic hyperplanes: species `i` gets
/// `lower_i = min_j sigma_j / c_ji` and `upper_i = max_j sigma_j / c_ji`
/// (the extreme intercepts over all hyperplanes in direction `i`). For
/// competition kinetics this box always satisfies the sign hypothesis.
pub fn lv_box(sys: &LvSystem) -> Result<HypothesisBox> {
    let n = sys.n();
    if n < 2 {
        return Err(Error::invalid("intercept box needs at least 2 species"));
    }
    let mut lower = vec![f64::INFINITY; n];
    let mut upper = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            let r = sys.sigma()[j] / sys.c()[j][i];
            lower[i] = lower[i].min(r);
            upper[i] = upper[i].max(r);
        }
        if lower[i] == upper[i] {
            return Err(Error::DegenerateBox { index: i });
        }
    }
    HypothesisBox::new(lower, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Inner,
    Outer,
}

/// First sampled point where the sign hypothesis failed.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisWitness {
    pub region: Region,
    pub point: Vec<f64>,
    pub species: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub holds: bool,
    pub samples_per_region: usize,
    pub witness: Option<HypothesisWitness>,
}

/// Monte Carlo check of the sign hypothesis on both regions.
///
/// Inner region: `n_samples` points uniform on the simplex
/// `{u >= 0, sum u_i / lower_i <= 1}` (exponential-spacings construction),
/// requiring `f_i >= -1e-12`. Outer region: `n_samples` points drawn by
/// rejection from the slab `[0, 2 max_i upper_i]^n` intersected with
/// `{sum u_i / upper_i >= 1}`, requiring `f_i <= 1e-12`. Deterministic for
/// a fixed seed.
pub fn check_hypothesis(
    sys: &LvSystem,
    bx: &HypothesisBox,
    n_samples: usize,
    seed: u64,
) -> Result<HypothesisReport> {
    let n = sys.n();
    if bx.n() != n {
        return Err(Error::Dimension {
            what: "box",
            expected: n,
            actual: bx.n(),
        });
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; n];
    let mut spacings = vec![0.0; n + 1];

    for _ in 0..n_samples {
        // Uniform on the corner simplex via normalized Exp(1) spacings.
        let mut total = 0.0;
        for e in spacings.iter_mut() {
            *e = -(1.0 - rng.gen::<f64>()).ln();
            total += *e;
        }
        for i in 0..n {
            point[i] = spacings[i] / total * bx.lower[i];
        }
        for i in 0..n {
            let f = sys.per_capita(i, &point);
            if f < -HYPOTHESIS_SLACK {
                return Ok(HypothesisReport {
                    holds: false,
                    samples_per_region: n_samples,
                    witness: Some(HypothesisWitness {
                        region: Region::Inner,
                        point: point.clone(),
                        species: i,
                        value: f,
                    }),
                });
            }
        }
    }

    let cap = bx.upper.iter().fold(0.0f64, |m, &v| m.max(v)) * OUTER_BOX_FACTOR;
    let mut accepted = 0;
    let mut attempts = 0usize;
    let attempt_cap = n_samples.saturating_mul(1000).max(1000);
    while accepted < n_samples {
        attempts += 1;
        if attempts > attempt_cap {
            return Err(Error::invalid(
                "outer-region rejection sampling failed to accept enough points",
            ));
        }
        let mut s = 0.0;
        for i in 0..n {
            point[i] = rng.gen::<f64>() * cap;
            s += point[i] / bx.upper[i];
        }
        if s < 1.0 {
            continue;
        }
        accepted += 1;
        for i in 0..n {
            let f = sys.per_capita(i, &point);
            if f > HYPOTHESIS_SLACK {
                return Ok(HypothesisReport {
                    holds: false,
                    samples_per_region: n_samples,
                    witness: Some(HypothesisWitness {
                        region: Region::Outer,
                        point: point.clone(),
                        species: i,
                        value: f,
                    }),
                });
            }
        }
    }

    Ok(HypothesisReport {
        holds: true,
        samples_per_region: n_samples,
        witness: None,
    })
}

/// Indicator used by the lower bound: `0` when either endpoint state is
/// the origin (max-norm at most `tol`), `1` otherwise.
pub fn chi(e_minus: &[f64], e_plus: &[f64], tol: f64) -> Result<u8> {
    if e_minus.len() != e_plus.len() {
        return Err(Error::Dimension {
            what: "endpoint states",
            expected: e_minus.len(),
            actual: e_plus.len(),
        });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid("chi tolerance must be nonnegative"));
    }
    let norm = |e: &[f64]| e.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    Ok(if norm(e_minus) <= tol || norm(e_plus) <= tol {
        0
    } else {
        1
    })
}

/// Two-sided bound on the weighted density `p = sum_i alpha_i u_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bounds {
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub chi: u8,
}

fn validate_weights(what: &'static str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension {
            what,
            expected: n,
            actual: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(Error::invalid(format!(
            "{what} must be finite and positive"
        )));
    }
    Ok(())
}

/// Assemble the two-sided bound from a box, diffusion rates, and weights:
///
/// ```text
/// lambda_upper = (max_i alpha_i upper_i) * (max d) / (min d)
/// lambda_lower = (min_i alpha_i lower_i) * (min d) / (max d) * chi
/// ```
pub fn nbmp_bounds(bx: &HypothesisBox, d: &[f64], alpha: &[f64], chi: u8) -> Result<Bounds> {
    let n = bx.n();
    validate_weights("d", d, n)?;
    validate_weights("alpha", alpha, n)?;
    if chi > 1 {
        return Err(Error::invalid("chi must be 0 or 1"));
    }
    let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(alpha[i] * bx.lower[i]);
        hi = hi.max(alpha[i] * bx.upper[i]);
    }
    Ok(Bounds {
        lambda_lower: lo * d_min / d_max * chi as f64,
        lambda_upper: hi * d_max / d_min,
        chi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    Lower,
    Upper,
}

/// Barrier levels `(lambda1, eta, lambda2)` for one side of the bound.
///
/// For the lower kind the three levels come from
///
/// ```text
/// lambda2 = min_i alpha_i d_i lower_i,
/// eta     = lambda2 / max_i d_i,
/// lambda1 = eta * min_i d_i,
/// ```
///
/// so that for every species the intercept chain
/// `lambda1/(alpha_i d_i) <= eta/alpha_i <= lambda2/(alpha_i d_i) <=
/// lower_i` holds: the `q`-simplex at `lambda1`, the `p`-simplex at `eta`,
/// and the `q`-simplex at `lambda2` nest inside the inner box simplex.
/// The upper kind mirrors every step (max, division by `min d`, reversed
/// chain against `upper_i`). With equal diffusion the construction
/// collapses to `lambda1 = lambda2` exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierTriple {
    pub kind: BarrierKind,
    pub alpha: Vec<f64>,
    pub lambda1: f64,
    pub eta: f64,
    pub lambda2: f64,
}

pub fn lower_barrier(bx: &HypothesisBox, d: &[f64], alpha: &[f64]) -> Result<BarrierTriple> {
    let n = bx.n();
    validate_weights("d", d, n)?;
    validate_weights("alpha", alpha, n)?;
    let equal_d = d.iter().all(|&x| x == d[0]);
    let (lambda2, eta, lambda1) = if equal_d {
        // Same product order on both levels keeps lambda1 == lambda2 exact.
        let m = (0..n)
            .map(|i| alpha[i] * bx.lower[i])
            .fold(f64::INFINITY, f64::min);
        (d[0] * m, m, d[0] * m)
    } else {
        let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let d_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let l2 = (0..n)
            .map(|i| alpha[i] * d[i] * bx.lower[i])
            .fold(f64::INFINITY, f64::min);
        let eta = l2 / d_max;
        (l2, eta, eta * d_min)
    };
    let triple = BarrierTriple {
        kind: BarrierKind::Lower,
        alpha: alpha.to_vec(),
        lambda1,
        eta,
        lambda2,
    };
    debug_assert!(triple.nesting_holds(bx, d));
    Ok(triple)
}

pub fn upper_barrier(bx: &HypothesisBox, d: &[f64], alpha: &[f64]) -> Result<BarrierTriple> {
    let n = bx.n();
    validate_weights("d", d, n)?;
    validate_weights("alpha", alpha, n)?;
    let equal_d = d.iter().all(|&x| x == d[0]);
    let (lambda2, eta, lambda1) = if equal_d {
        let m = (0..n)
            .map(|i| alpha[i] * bx.upper[i])
            .fold(f64::NEG_INFINITY, f64::max);
        (d[0] * m, m, d[0] * m)
    } else {
        let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let d_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let l2 = (0..n)
            .map(|i| alpha[i] * d[i] * bx.upper[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let eta = l2 / d_min;
        (l2, eta, eta * d_max)
    };
    let triple = BarrierTriple {
        kind: BarrierKind::Upper,
        alpha: alpha.to_vec(),
        lambda1,
        eta,
        lambda2,
    };
    debug_assert!(triple.nesting_holds(bx, d));
    Ok(triple)
}

impl BarrierTriple {
    /// Intercept-chain check against a box, with a small relative slack for
    /// the divisions (the defining arithmetic is exact only in reals).
    pub fn nesting_holds(&self, bx: &HypothesisBox, d: &[f64]) -> bool {
        if bx.n() != self.alpha.len() || d.len() != self.alpha.len() {
            return false;
        }
        let le = |a: f64, b: f64| a <= b + 1e-12 * a.abs().max(b.abs()).max(1e-300);
        for i in 0..self.alpha.len() {
            let ad = self.alpha[i] * d[i];
            let q1 = self.lambda1 / ad;
            let p = self.eta / self.alpha[i];
            let q2 = self.lambda2 / ad;
            let ok = match self.kind {
                BarrierKind::Lower => le(q1, p) && le(p, q2) && le(q2, bx.lower[i]),
                BarrierKind::Upper => le(p, q1) && le(q2, p) && le(bx.upper[i], q2),
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cyclic3() -> LvSystem {
        LvSystem::new(
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
            vec![
                vec![1.0, 2.0, 3.0],
                vec![3.0, 1.0, 2.0],
                vec![2.0, 3.0, 1.0],
            ],
            vec![1.0, 1.0, 1.0],
            0.0,
        )
        .unwrap()
    }

    fn two_species() -> LvSystem {
        LvSystem::new(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![vec![1.0, 2.0], vec![2.0, 1.0]],
            vec![1.0, 1.0],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn lv_box_cyclic_intercepts() {
        // Each column has intercepts {1, 1/2, 1/3}.
        let bx = lv_box(&cyclic3()).unwrap();
        for i in 0..3 {
            assert_relative_eq!(bx.lower()[i], 1.0 / 3.0, epsilon = 1e-15);
            assert_relative_eq!(bx.upper()[i], 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn lv_box_degenerate_column_rejected() {
        let sys = LvSystem::new(
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![vec![1.0, 2.0], vec![1.0, 2.0]],
            vec![1.0, 1.0],
            0.0,
        )
        .unwrap();
        assert!(matches!(lv_box(&sys), Err(Error::DegenerateBox { .. })));
    }

    #[test]
    fn hypothesis_holds_on_intercept_box() {
        let sys = cyclic3();
        let bx = lv_box(&sys).unwrap();
        let rep = check_hypothesis(&sys, &bx, 10_000, 42).unwrap();
        assert!(rep.holds, "witness: {:?}", rep.witness);
    }

    #[test]
    fn hypothesis_fails_on_inflated_inner_simplex() {
        let sys = two_species();
        let bx = lv_box(&sys).unwrap();
        let inflated = HypothesisBox::new(
            bx.lower().iter().map(|v| v * 2.0).collect(),
            bx.upper().iter().map(|v| v * 2.0).collect(),
        )
        .unwrap();
        let rep = check_hypothesis(&sys, &inflated, 10_000, 7).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.region, Region::Inner);
        assert!(w.value < -1e-12);
    }

    #[test]
    fn hypothesis_deterministic_per_seed() {
        let sys = cyclic3();
        let bx = lv_box(&sys).unwrap();
        let a = check_hypothesis(&sys, &bx, 500, 9).unwrap();
        let b = check_hypothesis(&sys, &bx, 500, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn chi_origin_detection() {
        assert_eq!(chi(&[0.0, 0.0], &[1.0, 0.0], 1e-9).unwrap(), 0);
        assert_eq!(chi(&[1e-12, 0.0], &[1.0, 1.0], 1e-9).unwrap(), 0);
        assert_eq!(chi(&[1.0, 0.0], &[0.0, 1.0], 1e-9).unwrap(), 1);
        assert!(chi(&[1.0], &[1.0, 0.0], 1e-9).is_err());
        assert!(chi(&[1.0], &[1.0], -1.0).is_err());
    }

    #[test]
    fn nbmp_bounds_hand_values() {
        // Box [1/3, 1]^3, d = (1, 2, 4), unit weights:
        // upper = 1 * 4 / 1 = 4, lower = (1/3) * (1/4) = 1/12.
        let bx = HypothesisBox::new(vec![1.0 / 3.0; 3], vec![1.0; 3]).unwrap();
        let b = nbmp_bounds(&bx, &[1.0, 2.0, 4.0], &[1.0, 1.0, 1.0], 1).unwrap();
        assert_relative_eq!(b.lambda_upper, 4.0, epsilon = 1e-15);
        assert_relative_eq!(b.lambda_lower, 1.0 / 12.0, epsilon = 1e-15);
        let b0 = nbmp_bounds(&bx, &[1.0, 2.0, 4.0], &[1.0, 1.0, 1.0], 0).unwrap();
        assert_eq!(b0.lambda_lower, 0.0);
        assert_eq!(b0.lambda_upper, b.lambda_upper);
    }

    #[test]
    fn lower_barrier_hand_values() {
        // lower = (1/2, 1/2), d = (1, 2), alpha = (1, 1):
        // lambda2 = min(1/2, 1) = 1/2, eta = 1/4, lambda1 = 1/4.
        let bx = HypothesisBox::new(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let t = lower_barrier(&bx, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_relative_eq!(t.lambda2, 0.5, epsilon = 1e-15);
        assert_relative_eq!(t.eta, 0.25, epsilon = 1e-15);
        assert_relative_eq!(t.lambda1, 0.25, epsilon = 1e-15);
        assert!(t.nesting_holds(&bx, &[1.0, 2.0]));
    }

    #[test]
    fn upper_barrier_hand_values() {
        // upper = (1, 1), d = (1, 2), alpha = (1, 1):
        // lambda2 = max(1, 2) = 2, eta = 2 / 1 = 2, lambda1 = 2 * 2 = 4.
        let bx = HypothesisBox::new(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let t = upper_barrier(&bx, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_relative_eq!(t.lambda2, 2.0, epsilon = 1e-15);
        assert_relative_eq!(t.eta, 2.0, epsilon = 1e-15);
        assert_relative_eq!(t.lambda1, 4.0, epsilon = 1e-15);
        assert!(t.nesting_holds(&bx, &[1.0, 2.0]));
    }

    #[test]
    fn equal_diffusion_collapses_exactly() {
        let bx = HypothesisBox::new(vec![0.3, 0.4, 0.5], vec![1.0, 1.1, 1.2]).unwrap();
        let d = [1.7, 1.7, 1.7];
        let alpha = [0.9, 1.3, 2.1];
        let lo = lower_barrier(&bx, &d, &alpha).unwrap();
        let hi = upper_barrier(&bx, &d, &alpha).unwrap();
        assert_eq!(lo.lambda1, lo.lambda2);
        assert_eq!(hi.lambda1, hi.lambda2);
        assert_relative_eq!(lo.eta * d[0], lo.lambda2, max_relative = 1e-15);
    }

    #[test]
    fn barrier_json_field_names() {
        let bx = HypothesisBox::new(vec![0.5, 0.5], vec![1.0, 1.0]).unwrap();
        let t = lower_barrier(&bx, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        let json = serde_json::to_value(&t).unwrap();
        for key in ["kind", "alpha", "lambda1", "eta", "lambda2"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["kind"], "lower");
        let b = nbmp_bounds(&bx, &[1.0, 2.0], &[1.0, 1.0], 1).unwrap();
        let json = serde_json::to_value(&b).unwrap();
        for key in ["lambda_lower", "lambda_upper", "chi"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }
}
