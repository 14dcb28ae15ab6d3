//! Traveling-wave profiles on a truncated line.
//!
//! The boundary value problem
//!
//! ```text
//! d_i u_i'' + theta u_i' + u_i^{m_i} f_i(u) = 0 on (-L, L),
//! u(-L) = e_minus,  u(L) = e_plus,
//! ```
//!
//! is discretized with centered differences on a uniform grid and solved by
//! a damped Newton iteration. The Jacobian is assembled analytically: each
//! interior point contributes a dense block over the species (the kinetics
//! couple everything at one point) while neighbouring points couple only
//! species-to-itself, giving the block-tridiagonal shape handled by
//! `linalg::solve_block_tridiag`. Damping halves the step until the
//! residual norm decreases and gives up below `min_step`.
//!
//! Profiles travel between equilibria of the kinetics; `solve_wave` rejects
//! endpoint states that are not equilibria. Output values are clamped to
//! zero when they round slightly negative (never by more than `1e-10`).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{self, LvSystem};

/// Relative slack when checking that grid-point spacings are uniform and
/// that endpoints sit symmetric about zero.
const GRID_UNIFORMITY_TOL: f64 = 1e-9;

/// Endpoint states must sit this close (max-norm) to an enumerated
/// equilibrium before a solve is attempted.
const ENDPOINT_EQUILIBRIUM_TOL: f64 = 1e-8;

/// Converged values in `(-CLAMP, 0)` are rounding noise and are clamped to
/// zero; anything below fails the run.
const NEGATIVE_VALUE_CLAMP: f64 = 1e-10;

/// Uniform symmetric grid `x_j = -L + j h`, `j = 0..=M`, with `M h = 2 L`.
#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    half_length: f64,
    spacing: f64,
    intervals: usize,
}

impl Grid {
    pub fn new(half_length: f64, spacing: f64) -> Result<Self> {
        if !half_length.is_finite() || half_length <= 0.0 {
            return Err(Error::invalid("grid half-length must be positive"));
        }
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::invalid("grid spacing must be positive"));
        }
        let m = (2.0 * half_length / spacing).round();
        if m < 4.0 {
            return Err(Error::invalid("grid needs at least 4 intervals"));
        }
        if (m * spacing - 2.0 * half_length).abs() > GRID_UNIFORMITY_TOL * (2.0 * half_length) {
            return Err(Error::UnsupportedGrid(format!(
                "spacing {spacing} does not divide the interval [-{half_length}, {half_length}]"
            )));
        }
        Ok(Grid {
            half_length,
            spacing,
            intervals: m as usize,
        })
    }

    /// Rebuild a grid from explicit point locations, rejecting non-uniform
    /// or asymmetric data.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        if points.len() < 5 {
            return Err(Error::UnsupportedGrid("need at least 5 grid points".into()));
        }
        let h = points[1] - points[0];
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::UnsupportedGrid("points must be increasing".into()));
        }
        for w in points.windows(2) {
            if ((w[1] - w[0]) - h).abs() > GRID_UNIFORMITY_TOL * h.max(1.0) {
                return Err(Error::UnsupportedGrid("non-uniform spacing".into()));
            }
        }
        let first = points[0];
        let last = *points.last().unwrap();
        let half = (last - first) / 2.0;
        if (first + last).abs() > GRID_UNIFORMITY_TOL * (2.0 * half) {
            return Err(Error::UnsupportedGrid(
                "grid must be symmetric about zero".into(),
            ));
        }
        Grid::new(half, h)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn num_points(&self) -> usize {
        self.intervals + 1
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points()).map(move |j| self.point(j))
    }
}

/// Newton solve parameters. `continuation_steps > 1` ramps the wave speed
/// from zero to the target in equal increments, re-solving at each stage
/// from the previous profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub min_step: f64,
    pub continuation_steps: usize,
    /// Transition width of the sigmoid initial guess built by `solve_wave`.
    pub guess_width: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-10,
            max_iter: 50,
            min_step: (2.0f64).powi(-20),
            continuation_steps: 1,
            guess_width: 4.0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.newton_tol.is_finite() && self.newton_tol > 0.0) {
            return Err(Error::invalid("newton_tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.min_step.is_finite() && self.min_step > 0.0 && self.min_step < 1.0) {
            return Err(Error::invalid("min_step must lie in (0, 1)"));
        }
        if self.continuation_steps == 0 {
            return Err(Error::invalid("continuation_steps must be at least 1"));
        }
        if !(self.guess_width.is_finite() && self.guess_width > 0.0) {
            return Err(Error::invalid("guess_width must be positive"));
        }
        Ok(())
    }
}

/// Discrete wave profile with its endpoint states.
///
/// `values[i][j]` is species `i` at grid point `j`; the first and last
/// columns equal `e_minus` and `e_plus`. `theta` records the wave speed the
/// profile was produced at (zero for raw initial guesses);
/// `residual_norm` is `None` until a solver run has evaluated it.
#[derive(Debug, Clone, Serialize)]
pub struct WaveProfile {
    grid: Grid,
    values: Vec<Vec<f64>>,
    theta: f64,
    e_minus: Vec<f64>,
    e_plus: Vec<f64>,
    residual_norm: Option<f64>,
}

impl WaveProfile {
    /// Build a profile from raw per-species values; endpoint states are
    /// taken from the first and last columns.
    pub fn from_values(grid: Grid, values: Vec<Vec<f64>>, theta: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("profile needs at least one species"));
        }
        let npts = grid.num_points();
        for row in &values {
            if row.len() != npts {
                return Err(Error::Dimension {
                    what: "profile row",
                    expected: npts,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(
                    "profile values must be finite and nonnegative",
                ));
            }
        }
        let e_minus: Vec<f64> = values.iter().map(|r| r[0]).collect();
        let e_plus: Vec<f64> = values.iter().map(|r| r[npts - 1]).collect();
        Ok(WaveProfile {
            grid,
            values,
            theta,
            e_minus,
            e_plus,
            residual_norm: None,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn species(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, species: usize, j: usize) -> f64 {
        self.values[species][j]
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn e_minus(&self) -> &[f64] {
        &self.e_minus
    }

    pub fn e_plus(&self) -> &[f64] {
        &self.e_plus
    }

    pub fn residual_norm(&self) -> Option<f64> {
        self.residual_norm
    }
}

/// Sidecar metadata stored next to a profile CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub theta: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub h: f64,
    pub residual_norm: Option<f64>,
    pub e_minus: Vec<f64>,
    pub e_plus: Vec<f64>,
}

impl From<&WaveProfile> for ProfileMeta {
    fn from(p: &WaveProfile) -> Self {
        ProfileMeta {
            theta: p.theta,
            half_length: p.grid.half_length(),
            h: p.grid.spacing(),
            residual_norm: p.residual_norm,
            e_minus: p.e_minus.clone(),
            e_plus: p.e_plus.clone(),
        }
    }
}

/// Iteration counts and final residual of a solver run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual_norm: f64,
}

fn validate_state(name: &'static str, e: &[f64], n: usize) -> Result<()> {
    if e.len() != n {
        return Err(Error::Dimension {
            what: name,
            expected: n,
            actual: e.len(),
        });
    }
    if e.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid(format!(
            "{name} components must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Sigmoid ramp between the endpoint states:
/// `u_i(x) = e_minus_i + (e_plus_i - e_minus_i) / (1 + exp(-x / width))`.
/// The first and last columns are pinned to the endpoint states exactly.
pub fn initial_guess(
    e_minus: &[f64],
    e_plus: &[f64],
    grid: &Grid,
    width: f64,
) -> Result<WaveProfile> {
    let n = e_minus.len();
    validate_state("e_minus", e_minus, n)?;
    validate_state("e_plus", e_plus, n)?;
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid("guess width must be positive"));
    }
    let npts = grid.num_points();
    let mut values = vec![vec![0.0; npts]; n];
    for j in 0..npts {
        let s = 1.0 / (1.0 + (-grid.point(j) / width).exp());
        for i in 0..n {
            values[i][j] = e_minus[i] + (e_plus[i] - e_minus[i]) * s;
        }
    }
    for i in 0..n {
        values[i][0] = e_minus[i];
        values[i][npts - 1] = e_plus[i];
    }
    WaveProfile::from_values(grid.clone(), values, 0.0)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// One damped Newton run on the interior unknowns at the system's own
/// theta. Returns iterations used and the final residual norm.
fn newton(
    sys: &LvSystem,
    grid: &Grid,
    values: &mut [Vec<f64>],
    cfg: &SolverConfig,
) -> Result<(usize, f64)> {
    let n = sys.n();
    let npts = grid.num_points();
    let interior = npts - 2;
    let dim = n * interior;
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 0.5 / h;
    let theta = sys.theta();

    let mut res = vec![0.0; dim];
    model::residual_flat(sys, h, values, &mut res);
    let mut norm = max_abs(&res);
    if norm <= cfg.newton_tol {
        return Ok((0, norm));
    }

    // Off-diagonal coupling is species-diagonal and constant over the grid.
    let mut sub = vec![0.0; dim];
    let mut sup = vec![0.0; dim];
    for j in 0..interior {
        for i in 0..n {
            sub[j * n + i] = sys.d()[i] * inv_h2 - theta * inv_2h;
            sup[j * n + i] = sys.d()[i] * inv_h2 + theta * inv_2h;
        }
    }

    let mut diag = vec![0.0; dim * n];
    let mut step_rhs = vec![0.0; dim];
    let mut block = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    let mut trial: Vec<Vec<f64>> = values.to_vec();
    let mut trial_res = vec![0.0; dim];

    for iter in 1..=cfg.max_iter {
        for j in 0..interior {
            for i in 0..n {
                point[i] = values[i][j + 1];
            }
            sys.kinetics_jacobian_into(&point, &mut block);
            for i in 0..n {
                block[i * n + i] -= 2.0 * sys.d()[i] * inv_h2;
            }
            diag[j * n * n..(j + 1) * n * n].copy_from_slice(&block);
        }
        for (r, s) in step_rhs.iter_mut().zip(res.iter()) {
            *r = -s;
        }
        linalg::solve_block_tridiag(n, interior, &sub, &mut diag, &sup, &mut step_rhs)
            .map_err(|j| Error::SingularSystem { index: j })?;

        let mut step = 1.0f64;
        loop {
            for i in 0..n {
                trial[i].copy_from_slice(&values[i]);
                for j in 0..interior {
                    trial[i][j + 1] += step * step_rhs[j * n + i];
                }
            }
            model::residual_flat(sys, h, &trial, &mut trial_res);
            let trial_norm = max_abs(&trial_res);
            if trial_norm < norm {
                norm = trial_norm;
                break;
            }
            step *= 0.5;
            if step < cfg.min_step {
                let last = WaveProfile {
                    grid: grid.clone(),
                    values: clamp_for_report(values),
                    theta,
                    e_minus: values.iter().map(|r| r[0]).collect(),
                    e_plus: values.iter().map(|r| r[npts - 1]).collect(),
                    residual_norm: Some(norm),
                };
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: norm,
                    last: Box::new(last),
                });
            }
        }
        for i in 0..n {
            std::mem::swap(&mut values[i], &mut trial[i]);
        }
        res.copy_from_slice(&trial_res);
        if norm <= cfg.newton_tol {
            return Ok((iter, norm));
        }
    }

    let last = WaveProfile {
        grid: grid.clone(),
        values: clamp_for_report(values),
        theta,
        e_minus: values.iter().map(|r| r[0]).collect(),
        e_plus: values.iter().map(|r| r[npts - 1]).collect(),
        residual_norm: Some(norm),
    };
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: norm,
        last: Box::new(last),
    })
}

/// Failure reports must still satisfy the profile nonnegativity invariant.
fn clamp_for_report(values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    values
        .iter()
        .map(|row| row.iter().map(|v| v.max(0.0)).collect())
        .collect()
}

/// Finish a converged iterate: clamp rounding-noise negatives, re-polish if
/// the clamp disturbed the residual, and package the profile.
fn finalize(
    sys: &LvSystem,
    grid: &Grid,
    mut values: Vec<Vec<f64>>,
    mut iterations: usize,
    cfg: &SolverConfig,
) -> Result<(WaveProfile, SolveStats)> {
    let n = sys.n();
    let h = grid.spacing();
    let dim = n * (grid.num_points() - 2);
    let mut res = vec![0.0; dim];
    let mut norm;
    let mut cycles = 0;
    loop {
        let min_v = values
            .iter()
            .flat_map(|r| r.iter().copied())
            .fold(f64::INFINITY, f64::min);
        if min_v < -NEGATIVE_VALUE_CLAMP {
            let last = WaveProfile {
                grid: grid.clone(),
                values: clamp_for_report(&values),
                theta: sys.theta(),
                e_minus: values.iter().map(|r| r[0]).collect(),
                e_plus: values.iter().map(|r| r[grid.num_points() - 1]).collect(),
                residual_norm: None,
            };
            return Err(Error::NegativeProfile {
                min: min_v,
                last: Box::new(last),
            });
        }
        for row in values.iter_mut() {
            for v in row.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        model::residual_flat(sys, h, &values, &mut res);
        norm = max_abs(&res);
        if norm <= cfg.newton_tol || cycles >= 3 {
            break;
        }
        let (it, _) = newton(sys, grid, &mut values, cfg)?;
        iterations += it;
        cycles += 1;
    }
    if norm > cfg.newton_tol {
        let last = WaveProfile {
            grid: grid.clone(),
            values,
            theta: sys.theta(),
            e_minus: vec![],
            e_plus: vec![],
            residual_norm: Some(norm),
        };
        return Err(Error::NoConvergence {
            iterations,
            residual: norm,
            last: Box::new(last),
        });
    }
    let npts = grid.num_points();
    let profile = WaveProfile {
        grid: grid.clone(),
        e_minus: values.iter().map(|r| r[0]).collect(),
        e_plus: values.iter().map(|r| r[npts - 1]).collect(),
        values,
        theta: sys.theta(),
        residual_norm: Some(norm),
    };
    Ok((
        profile,
        SolveStats {
            iterations,
            residual_norm: norm,
        },
    ))
}

/// Solve the truncated boundary value problem between the equilibrium
/// states `e_minus` and `e_plus` at wave speed `sys.theta()`.
pub fn solve_wave(
    sys: &LvSystem,
    e_minus: &[f64],
    e_plus: &[f64],
    grid: &Grid,
    cfg: &SolverConfig,
) -> Result<(WaveProfile, SolveStats)> {
    cfg.validate()?;
    let n = sys.n();
    validate_state("e_minus", e_minus, n)?;
    validate_state("e_plus", e_plus, n)?;
    let eqs = model::enumerate_equilibria(sys)?;
    for (name, e) in [("e_minus", e_minus), ("e_plus", e_plus)] {
        let dist = eqs.min_distance(e);
        if dist > ENDPOINT_EQUILIBRIUM_TOL {
            return Err(Error::invalid(format!(
                "{name} is not an equilibrium of the system (distance {dist:.3e})"
            )));
        }
    }
    let guess = initial_guess(e_minus, e_plus, grid, cfg.guess_width)?;
    solve_from(sys, guess, cfg)
}

/// Run the damped Newton iteration from an explicit starting profile
/// (used for warm starts and refinement). Applies wave-speed continuation
/// when `cfg.continuation_steps > 1`.
pub fn solve_from(
    sys: &LvSystem,
    start: WaveProfile,
    cfg: &SolverConfig,
) -> Result<(WaveProfile, SolveStats)> {
    cfg.validate()?;
    if start.species() != sys.n() {
        return Err(Error::Dimension {
            what: "profile species",
            expected: sys.n(),
            actual: start.species(),
        });
    }
    let grid = start.grid.clone();
    let mut values = start.values;
    let mut total_iters = 0;
    let steps = cfg.continuation_steps;
    for k in 1..=steps {
        let stage = if k == steps {
            sys.clone()
        } else {
            sys.clone()
                .with_theta(sys.theta() * k as f64 / steps as f64)?
        };
        let (it, _) = newton(&stage, &grid, &mut values, cfg)?;
        total_iters += it;
    }
    finalize(sys, &grid, values, total_iters, cfg)
}

/// Interpolate a converged profile onto a grid refined by an integer
/// factor and re-polish with Newton. The refined residual never exceeds
/// the original for a resolved profile.
pub fn refine(
    sys: &LvSystem,
    profile: &WaveProfile,
    factor: usize,
    cfg: &SolverConfig,
) -> Result<(WaveProfile, SolveStats)> {
    if factor < 2 {
        return Err(Error::invalid("refinement factor must be at least 2"));
    }
    let old = profile.grid();
    let fine = Grid::new(old.half_length(), old.spacing() / factor as f64)?;
    let n = profile.species();
    let npts = fine.num_points();
    let mut values = vec![vec![0.0; npts]; n];
    for j in 0..npts {
        let coarse = j / factor;
        let rem = j % factor;
        for i in 0..n {
            values[i][j] = if rem == 0 {
                profile.value(i, coarse)
            } else {
                let t = rem as f64 / factor as f64;
                (1.0 - t) * profile.value(i, coarse) + t * profile.value(i, coarse + 1)
            };
        }
    }
    for i in 0..n {
        values[i][0] = profile.e_minus[i];
        values[i][npts - 1] = profile.e_plus[i];
    }
    let start = WaveProfile {
        grid: fine,
        values,
        theta: profile.theta,
        e_minus: profile.e_minus.clone(),
        e_plus: profile.e_plus.clone(),
        residual_norm: None,
    };
    solve_from(sys, start, cfg)
}

/// Write the profile as CSV with header `x,u1,...,un`.
pub fn write_profile_csv<W: Write>(profile: &WaveProfile, out: &mut W) -> std::io::Result<()> {
    write!(out, "x")?;
    for i in 1..=profile.species() {
        write!(out, ",u{i}")?;
    }
    writeln!(out)?;
    for (j, x) in profile.grid().points().enumerate() {
        write!(out, "{x}")?;
        for i in 0..profile.species() {
            write!(out, ",{}", profile.value(i, j))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Read a profile CSV written by [`write_profile_csv`] back, pairing it
/// with its sidecar metadata.
pub fn read_profile_csv<R: BufRead>(reader: R, meta: &ProfileMeta) -> Result<WaveProfile> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty profile CSV"))?
        .map_err(|e| Error::invalid(format!("profile CSV: {e}")))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 2 || cols[0] != "x" {
        return Err(Error::invalid("profile CSV header must be x,u1,...,un"));
    }
    let n = cols.len() - 1;
    for (i, c) in cols[1..].iter().enumerate() {
        if *c != format!("u{}", i + 1) {
            return Err(Error::invalid("profile CSV header must be x,u1,...,un"));
        }
    }
    let mut xs = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); n];
    for line in lines {
        let line = line.map_err(|e| Error::invalid(format!("profile CSV: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != n + 1 {
            return Err(Error::invalid(format!(
                "profile CSV row has {} fields, expected {}",
                fields.len(),
                n + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::invalid(format!("profile CSV number {s:?}: {e}")))
        };
        xs.push(parse(fields[0])?);
        for i in 0..n {
            values[i].push(parse(fields[i + 1])?);
        }
    }
    let grid = Grid::from_points(&xs)?;
    if (grid.spacing() - meta.h).abs() > GRID_UNIFORMITY_TOL * meta.h
        || (grid.half_length() - meta.half_length).abs() > GRID_UNIFORMITY_TOL * meta.half_length
    {
        return Err(Error::invalid(
            "profile CSV does not match its metadata grid",
        ));
    }
    let mut profile = WaveProfile::from_values(grid, values, meta.theta)?;
    if meta.e_minus.len() != n || meta.e_plus.len() != n {
        return Err(Error::Dimension {
            what: "metadata endpoint states",
            expected: n,
            actual: meta.e_minus.len(),
        });
    }
    profile.e_minus = meta.e_minus.clone();
    profile.e_plus = meta.e_plus.clone();
    profile.residual_norm = meta.residual_norm;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn logistic(theta: f64) -> LvSystem {
        LvSystem::new(vec![1.0], vec![1.0], vec![vec![1.0]], vec![1.0], theta).unwrap()
    }

    #[test]
    fn grid_construction_and_limits() {
        let g = Grid::new(40.0, 0.05).unwrap();
        assert_eq!(g.intervals(), 1600);
        assert_relative_eq!(g.point(0), -40.0);
        assert_relative_eq!(g.point(1600), 40.0, epsilon = 1e-12);
        assert!(Grid::new(1.0, 0.7).is_err()); // does not divide
        assert!(Grid::new(0.1, 0.05).is_ok()); // exactly 4 intervals, the minimum
        assert!(Grid::new(0.05, 0.05).is_err()); // fewer than 4 intervals
        assert!(Grid::new(-1.0, 0.1).is_err());
    }

    #[test]
    fn grid_from_points_detects_bad_grids() {
        let g = Grid::new(1.0, 0.25).unwrap();
        let pts: Vec<f64> = g.points().collect();
        let back = Grid::from_points(&pts).unwrap();
        assert_eq!(back.intervals(), 8);
        let mut skewed = pts.clone();
        skewed[3] += 0.01;
        assert!(matches!(
            Grid::from_points(&skewed),
            Err(Error::UnsupportedGrid(_))
        ));
        let shifted: Vec<f64> = pts.iter().map(|x| x + 0.5).collect();
        assert!(Grid::from_points(&shifted).is_err());
    }

    #[test]
    fn initial_guess_pins_endpoints() {
        let grid = Grid::new(10.0, 0.5).unwrap();
        let p = initial_guess(&[1.0, 0.0], &[0.0, 1.0], &grid, 2.0).unwrap();
        assert_eq!(p.value(0, 0), 1.0);
        assert_eq!(p.value(1, 0), 0.0);
        assert_eq!(p.value(0, grid.intervals()), 0.0);
        assert_eq!(p.value(1, grid.intervals()), 1.0);
        // Midpoint of the ramp sits at the average of the endpoint states.
        let mid = grid.intervals() / 2;
        assert_relative_eq!(p.value(0, mid), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn constant_equilibrium_converges_in_zero_iterations() {
        let sys = logistic(0.0);
        let grid = Grid::new(5.0, 0.25).unwrap();
        let (profile, stats) =
            solve_wave(&sys, &[1.0], &[1.0], &grid, &SolverConfig::default()).unwrap();
        assert_eq!(stats.iterations, 0);
        assert_eq!(stats.residual_norm, 0.0);
        assert!(profile.values()[0].iter().all(|&v| v == 1.0));
    }

    #[test]
    fn rejects_non_equilibrium_endpoint() {
        let sys = logistic(0.0);
        let grid = Grid::new(5.0, 0.25).unwrap();
        let err = solve_wave(&sys, &[0.5], &[0.0], &grid, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn non_convergence_reports_last_iterate() {
        // One iteration cannot resolve the front; the error carries the
        // iterate reached so far.
        let sys = logistic(0.0);
        let grid = Grid::new(20.0, 0.1).unwrap();
        let cfg = SolverConfig {
            max_iter: 1,
            newton_tol: 1e-14,
            ..SolverConfig::default()
        };
        match solve_wave(&sys, &[1.0], &[0.0], &grid, &cfg) {
            Err(Error::NoConvergence {
                iterations, last, ..
            }) => {
                assert_eq!(iterations, 1);
                assert_eq!(last.species(), 1);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let grid = Grid::new(2.0, 0.5).unwrap();
        let sys = logistic(0.3);
        let (profile, _) =
            solve_wave(&sys, &[1.0], &[1.0], &grid, &SolverConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&profile, &mut buf).unwrap();
        let meta = ProfileMeta::from(&profile);
        let back = read_profile_csv(std::io::BufReader::new(buf.as_slice()), &meta).unwrap();
        assert_eq!(back.species(), 1);
        assert_eq!(back.values(), profile.values());
        assert_eq!(back.theta(), 0.3);
    }
}
