//! Maximum-principle machinery for diffusive Lotka-Volterra competition
//! systems.
//!
//! Given per-species diffusion rates `d_i`, growth rates `sigma_i`, and a
//! competition matrix `c_ij`, the crate computes:
//!
//! - the coordinate box spanned by the nullcline intercepts and a sampled
//!   check of the sign hypothesis on it ([`barrier`]);
//! - two-sided bounds on weighted total density along traveling waves,
//!   plus the barrier triples `lambda_1 <= eta <= lambda_2` behind them;
//! - the tangent-line refinement of the lower bound for two species,
//!   including the exact tangency point ([`tangent`]);
//! - a nonexistence certificate for a fourth competitor invading a
//!   three-species wave ([`nonexistence`]);
//! - discrete traveling-wave profiles by damped Newton iteration on a
//!   uniform grid, with residual reports and CSV round-tripping
//!   ([`waves`]);
//! - a-posteriori verification of the bounds along computed profiles and
//!   a Monte Carlo containment oracle ([`verify`]).
//!
//! Everything is deterministic: sampling routines take explicit seeds and
//! make no use of global RNG state.

// Index loops over parallel arrays are the norm in the numeric kernels
// here; iterator rewrites obscure the stencils.
#![allow(clippy::needless_range_loop)]

pub mod barrier;
pub mod error;
mod linalg;
pub mod model;
pub mod nonexistence;
pub mod presets;
pub mod tangent;
pub mod verify;
pub mod waves;

pub use barrier::{
    check_hypothesis, chi, lower_barrier, lv_box, nbmp_bounds, upper_barrier, BarrierKind,
    BarrierTriple, Bounds, HypothesisBox, HypothesisReport,
};
pub use error::{Error, Result};
pub use model::{
    enumerate_equilibria, residual, DensityVector, Equilibrium, EquilibriumSet, LvSystem,
    ResidualReport,
};
pub use nonexistence::{
    check_nonexistence, sigma4_threshold, DiffusionRange, NonexistenceCertificate, Verdict,
};
pub use tangent::{
    baseline_lower_bound, classify_case, improved_lower_bound, improved_pipeline, tangent_lambda2,
    CaseId, Composition, ImprovedBound, TangencyResult, TwoSpeciesParams,
};
pub use verify::{
    compare_bounds, containment_oracle, verify_bounds, verify_bounds_with_barriers,
    BoundComparison, BoundsReport, ContainmentReport, Violation,
};
pub use waves::{
    initial_guess, read_profile_csv, refine, solve_from, solve_wave, write_profile_csv, Grid,
    ProfileMeta, SolveStats, SolverConfig, WaveProfile,
};
