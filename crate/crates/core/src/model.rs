//! Diffusive Lotka-Volterra competition systems and their kinetics.
//!
//! A system couples `n` species through
//!
//! ```text
//! d_i u_i'' + theta u_i' + u_i^{m_i} (sigma_i - sum_j c_ij u_j) = 0,
//! ```
//!
//! where `d_i` are diffusion rates, `theta` is the wave speed of the moving
//! frame, `sigma_i` are intrinsic growth rates, and `c_ij > 0` are
//! competition coefficients. This module owns the parameter record, the
//! kinetic terms and their Jacobian, equilibrium enumeration over support
//! subsets, and the centered-difference residual of a discrete profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::waves::WaveProfile;

/// Two equilibria closer than this (max-norm) are treated as duplicates.
const EQUILIBRIUM_DEDUP_TOL: f64 = 1e-9;

/// Components above `-NEGATIVE_CLAMP` are accepted as feasible and clamped
/// to zero; anything more negative rejects the candidate point.
const NEGATIVE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Deserialize)]
struct RawSystem {
    n: usize,
    d: Vec<f64>,
    sigma: Vec<f64>,
    c: Vec<Vec<f64>>,
    #[serde(default)]
    m: Option<Vec<f64>>,
    #[serde(default)]
    theta: Option<f64>,
}

/// Parameter record for one competition system.
///
/// Serializes to/from the JSON document
/// `{"n": .., "d": [..], "sigma": [..], "c": [[..]], "m": [..], "theta": ..}`;
/// on input `m` defaults to all ones and `theta` to `0.0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct LvSystem {
    n: usize,
    d: Vec<f64>,
    sigma: Vec<f64>,
    c: Vec<Vec<f64>>,
    m: Vec<f64>,
    theta: f64,
}

impl TryFrom<RawSystem> for LvSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        if raw.sigma.len() != raw.n {
            return Err(Error::Dimension {
                what: "sigma",
                expected: raw.n,
                actual: raw.sigma.len(),
            });
        }
        let m = raw.m.unwrap_or_else(|| vec![1.0; raw.n]);
        LvSystem::new(raw.d, raw.sigma, raw.c, m, raw.theta.unwrap_or(0.0))
    }
}

impl LvSystem {
    pub fn new(
        d: Vec<f64>,
        sigma: Vec<f64>,
        c: Vec<Vec<f64>>,
        m: Vec<f64>,
        theta: f64,
    ) -> Result<Self> {
        let n = sigma.len();
        if n == 0 {
            return Err(Error::invalid("system needs at least one species"));
        }
        for (name, v) in [("d", &d), ("m", &m)] {
            if v.len() != n {
                return Err(Error::Dimension {
                    what: if name == "d" { "d" } else { "m" },
                    expected: n,
                    actual: v.len(),
                });
            }
        }
        if c.len() != n {
            return Err(Error::Dimension {
                what: "c",
                expected: n,
                actual: c.len(),
            });
        }
        for (i, row) in c.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    what: "c row",
                    expected: n,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::invalid(format!(
                    "competition row {i} must be finite and strictly positive"
                )));
            }
        }
        if d.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid(
                "diffusion rates must be finite and positive",
            ));
        }
        if sigma.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid("growth rates must be finite and positive"));
        }
        if m.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::invalid(
                "kinetic exponents must be finite and positive",
            ));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        Ok(LvSystem {
            n,
            d,
            sigma,
            c,
            m,
            theta,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("system JSON: {e}")))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn c(&self) -> &[Vec<f64>] {
        &self.c
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(mut self, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        self.theta = theta;
        Ok(self)
    }

    /// Replace one growth rate, revalidating positivity.
    pub fn with_sigma(mut self, i: usize, value: f64) -> Result<Self> {
        if i >= self.n {
            return Err(Error::Dimension {
                what: "sigma index",
                expected: self.n,
                actual: i,
            });
        }
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::invalid("growth rates must be finite and positive"));
        }
        self.sigma[i] = value;
        Ok(self)
    }

    /// Per-capita term `f_i(u) = sigma_i - sum_j c_ij u_j`.
    pub fn per_capita(&self, i: usize, u: &[f64]) -> f64 {
        let mut acc = self.sigma[i];
        for (j, &uj) in u.iter().enumerate() {
            acc -= self.c[i][j] * uj;
        }
        acc
    }

    /// Kinetic term `g_i(u) = u_i^{m_i} f_i(u)` for every species, written
    /// into `out`.
    pub fn kinetics_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let f = self.per_capita(i, u);
            let w = if self.m[i] == 1.0 {
                u[i]
            } else {
                u[i].powf(self.m[i])
            };
            out[i] = w * f;
        }
    }

    pub fn kinetics(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n {
            return Err(Error::Dimension {
                what: "density",
                expected: self.n,
                actual: u.len(),
            });
        }
        let mut out = vec![0.0; self.n];
        self.kinetics_into(u, &mut out);
        Ok(out)
    }

    /// Jacobian of the kinetics, `out[i*n + l] = dg_i/du_l`, row-major.
    ///
    /// For exponents below one the diagonal term is singular at `u_i = 0`;
    /// it is clamped to zero there so Newton steps stay finite (the residual
    /// itself vanishes at such points).
    pub(crate) fn kinetics_jacobian_into(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(out.len(), n * n);
        for i in 0..n {
            let f = self.per_capita(i, u);
            let (w, dw) = if self.m[i] == 1.0 {
                (u[i], 1.0)
            } else if u[i] == 0.0 {
                (0.0, 0.0)
            } else {
                (u[i].powf(self.m[i]), self.m[i] * u[i].powf(self.m[i] - 1.0))
            };
            for l in 0..n {
                let mut v = -w * self.c[i][l];
                if l == i {
                    v += dw * f;
                }
                out[i * n + l] = v;
            }
        }
    }
}

/// Nonnegative, finite density vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(
                "density components must be finite and nonnegative",
            ));
        }
        Ok(DensityVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for DensityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// One constant equilibrium together with its support (indices of the
/// strictly positive components).
#[derive(Debug, Clone, Serialize)]
pub struct Equilibrium {
    pub point: DensityVector,
    pub support: Vec<usize>,
}

/// All equilibria found by support enumeration, in increasing support-mask
/// order, plus the supports whose linear subsystem was singular.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub singular_supports: Vec<Vec<usize>>,
}

impl EquilibriumSet {
    /// Max-norm distance from `point` to the nearest enumerated equilibrium.
    pub fn min_distance(&self, point: &[f64]) -> f64 {
        self.equilibria
            .iter()
            .map(|e| max_abs_diff(&e.point, point))
            .fold(f64::INFINITY, f64::min)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Enumerate every constant equilibrium by solving, for each support subset
/// `S`, the linear system `sum_{j in S} c_ij u_j = sigma_i (i in S)` and
/// keeping solutions with nonnegative components. Singular subsystems are
/// skipped and reported. Capped at `n <= 8` (the enumeration is 2^n).
pub fn enumerate_equilibria(sys: &LvSystem) -> Result<EquilibriumSet> {
    let n = sys.n();
    if n > 8 {
        return Err(Error::invalid(
            "equilibrium enumeration supports at most 8 species",
        ));
    }
    let mut equilibria: Vec<Equilibrium> = Vec::new();
    let mut singular_supports = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = support.len();
        if k == 0 {
            equilibria.push(Equilibrium {
                point: DensityVector(vec![0.0; n]),
                support: Vec::new(),
            });
            continue;
        }
        let mut a = vec![0.0; k * k];
        let mut b = vec![0.0; k];
        for (r, &i) in support.iter().enumerate() {
            b[r] = sys.sigma()[i];
            for (cc, &j) in support.iter().enumerate() {
                a[r * k + cc] = sys.c()[i][j];
            }
        }
        match linalg::solve_dense(k, a, b) {
            Err(_) => singular_supports.push(support),
            Ok(x) => {
                if x.iter().all(|&v| v >= -NEGATIVE_CLAMP) {
                    let mut point = vec![0.0; n];
                    for (r, &i) in support.iter().enumerate() {
                        point[i] = x[r].max(0.0);
                    }
                    let duplicate = equilibria
                        .iter()
                        .any(|e| max_abs_diff(&e.point, &point) <= EQUILIBRIUM_DEDUP_TOL);
                    if !duplicate {
                        let actual: Vec<usize> = (0..n).filter(|&i| point[i] > 0.0).collect();
                        equilibria.push(Equilibrium {
                            point: DensityVector(point),
                            support: actual,
                        });
                    }
                }
            }
        }
    }
    Ok(EquilibriumSet {
        equilibria,
        singular_supports,
    })
}

/// Centered-difference residual of a profile at the interior grid points.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// `per_point[i][j]` is the residual of species `i` at interior point
    /// `j + 1` (grid points `1..M-1`).
    pub per_point: Vec<Vec<f64>>,
    /// Max-norm over all species and interior points.
    pub norm: f64,
}

/// Evaluate `d_i D2 u_i + theta D1 u_i + g_i(u)` with centered differences
/// at every interior point, using `sys.theta()` for the advection term.
pub fn residual(sys: &LvSystem, profile: &WaveProfile) -> Result<ResidualReport> {
    let n = sys.n();
    if profile.species() != n {
        return Err(Error::Dimension {
            what: "profile species",
            expected: n,
            actual: profile.species(),
        });
    }
    let interior = profile.grid().intervals() - 1;
    let mut flat = vec![0.0; n * interior];
    residual_flat(sys, profile.grid().spacing(), profile.values(), &mut flat);
    let mut per_point = vec![vec![0.0; interior]; n];
    let mut norm = 0.0f64;
    for j in 0..interior {
        for i in 0..n {
            let v = flat[j * n + i];
            per_point[i][j] = v;
            norm = norm.max(v.abs());
        }
    }
    Ok(ResidualReport { per_point, norm })
}

/// Flat interior residual used by both [`residual`] and the Newton solver:
/// `out[j*n + i]` is the residual of species `i` at grid point `j + 1`.
pub(crate) fn residual_flat(sys: &LvSystem, h: f64, values: &[Vec<f64>], out: &mut [f64]) {
    let n = sys.n();
    let npts = values[0].len();
    let interior = npts - 2;
    debug_assert_eq!(out.len(), n * interior);
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 0.5 / h;
    let theta = sys.theta();
    let mut u = vec![0.0; n];
    let mut g = vec![0.0; n];
    for j in 1..npts - 1 {
        for i in 0..n {
            u[i] = values[i][j];
        }
        sys.kinetics_into(&u, &mut g);
        for i in 0..n {
            let vm = values[i][j - 1];
            let v0 = values[i][j];
            let vp = values[i][j + 1];
            out[(j - 1) * n + i] =
                sys.d()[i] * (vp - 2.0 * v0 + vm) * inv_h2 + theta * (vp - vm) * inv_2h + g[i];
        }
    }
}
