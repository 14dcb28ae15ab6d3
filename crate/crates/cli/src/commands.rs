//! One function per subcommand. Every function is a thin wrapper: load
//! inputs, call the library, serialize the result, map the outcome to an
//! exit code.

use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use nbarrier::barrier::{check_hypothesis, chi, lower_barrier, lv_box, nbmp_bounds, upper_barrier};
use nbarrier::model::{enumerate_equilibria, LvSystem};
use nbarrier::nonexistence::{check_nonexistence, sigma4_threshold, Verdict};
use nbarrier::presets;
use nbarrier::tangent::{hyperbola_v, improved_pipeline, Composition, TwoSpeciesParams};
use nbarrier::verify::verify_bounds_with_barriers;
use nbarrier::waves::{
    read_profile_csv, solve_wave, write_profile_csv, Grid, ProfileMeta, SolverConfig,
};
use serde::Serialize;
use serde_json::json;

use crate::log;
use crate::{
    BarrierArgs, BoundsArgs, BoxArgs, Command, EquilibriaArgs, NonexistArgs, SolveArgs,
    SweepNonexistArgs, SweepTangentArgs, SweepTarget, TangentArgs, TangentParam, VerifyArgs,
};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<nbarrier::Error> for Failure {
    fn from(e: nbarrier::Error) -> Self {
        let code = match &e {
            nbarrier::Error::NoConvergence { .. } | nbarrier::Error::NegativeProfile { .. } => 5,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Equilibria(a) => equilibria(a),
        Command::Box(a) => box_cmd(a),
        Command::Bounds(a) => bounds_cmd(a),
        Command::Barrier(a) => barrier_cmd(a),
        Command::Tangent(a) => tangent_cmd(a),
        Command::Nonexist(a) => nonexist_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Sweep(a) => match a.target {
            SweepTarget::Tangent(t) => sweep_tangent(t),
            SweepTarget::Nonexist(t) => sweep_nonexist(t),
        },
    }
}

/// Resolve `--system`: an existing file wins; otherwise the name is tried
/// against the embedded presets.
fn load_system(spec: &str) -> Result<LvSystem, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("cannot read system file {spec}: {e}")))?;
        return Ok(LvSystem::from_json(&text)?);
    }
    match presets::by_name(spec) {
        Some(text) => Ok(LvSystem::from_json(text)?),
        None => Err(Failure::validation(format!(
            "system {spec:?} is neither an existing file nor one of the presets {:?}",
            presets::NAMES
        ))),
    }
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(out, &text)
}

fn sidecar_path(profile: &Path) -> PathBuf {
    PathBuf::from(format!("{}.meta.json", profile.display()))
}

fn equilibria(a: EquilibriaArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let set = enumerate_equilibria(&sys)?;
    log::info(format!(
        "{} equilibria, {} singular supports skipped",
        set.equilibria.len(),
        set.singular_supports.len()
    ));
    write_json(&a.out.out, &set)?;
    Ok(0)
}

fn box_cmd(a: BoxArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let bx = lv_box(&sys)?;
    let hypothesis = match (a.samples, a.seed) {
        (Some(samples), Some(seed)) => Some(check_hypothesis(&sys, &bx, samples, seed)?),
        _ => None,
    };
    match &hypothesis {
        Some(rep) => log::info(format!(
            "box computed; sampled sign check {}",
            if rep.holds {
                "holds"
            } else {
                "found a witness"
            }
        )),
        None => log::info("box computed"),
    }
    write_json(&a.out.out, &json!({ "box": bx, "hypothesis": hypothesis }))?;
    Ok(0)
}

fn bounds_cmd(a: BoundsArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let bx = lv_box(&sys)?;
    let chi_value = match (a.chi, &a.e_minus, &a.e_plus) {
        (Some(c), _, _) => c,
        (None, Some(em), Some(ep)) => {
            for (name, e) in [("e-minus", em), ("e-plus", ep)] {
                if e.len() != sys.n() {
                    return Err(Failure::validation(format!(
                        "{name} has {} components, system has {} species",
                        e.len(),
                        sys.n()
                    )));
                }
            }
            chi(em, ep, a.state_tol)?
        }
        _ => 1,
    };
    let bounds = nbmp_bounds(&bx, sys.d(), &a.alpha, chi_value)?;
    log::info(format!(
        "lambda in [{}, {}] (chi = {})",
        bounds.lambda_lower, bounds.lambda_upper, bounds.chi
    ));
    write_json(&a.out.out, &json!({ "box": bx, "bounds": bounds }))?;
    Ok(0)
}

fn barrier_cmd(a: BarrierArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let bx = lv_box(&sys)?;
    let lower = lower_barrier(&bx, sys.d(), &a.alpha)?;
    let upper = upper_barrier(&bx, sys.d(), &a.alpha)?;
    log::info(format!(
        "lower lambda1 = {}, upper lambda1 = {}",
        lower.lambda1, upper.lambda1
    ));
    write_json(
        &a.out.out,
        &json!({ "box": bx, "lower": lower, "upper": upper }),
    )?;
    Ok(0)
}

fn tangent_cmd(a: TangentArgs) -> Result<u8, Failure> {
    let p = TwoSpeciesParams::new(a.alpha, a.beta, a.d, a.k, a.a1, a.a2)?;
    let improved = improved_pipeline(&p, a.composition.into())?;
    log::info(format!(
        "case {}: lambda2 = {}, bound = {}",
        improved.tangency.case_id, improved.tangency.lambda2, improved.bound
    ));
    if let Some(path) = &a.plot {
        let csv = plot_csv(&p)?;
        std::fs::write(path, csv)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
        log::debug(format!("plot data written to {}", path.display()));
    }
    write_json(&a.out.out, &improved)?;
    Ok(0)
}

/// Long-format CSV of the zero-level curve and the three barrier lines,
/// 201 points per series. The lines always show the nested construction on
/// the original weights, independent of --composition.
fn plot_csv(p: &TwoSpeciesParams) -> Result<String, Failure> {
    let improved = improved_pipeline(p, Composition::Nested)?;
    let steps = 200usize;
    let mut csv = String::from("series,u,v\n");
    for j in 0..=steps {
        let u = j as f64 / steps as f64;
        let v = hyperbola_v(p, u)?;
        writeln!(csv, "curve,{u},{v}").unwrap();
    }
    let d_beta = p.d * p.beta;
    let lines = [
        ("lambda2", improved.tangency.lambda2, d_beta),
        ("eta", improved.eta, p.beta),
        ("lambda1", improved.lambda1, d_beta),
    ];
    for (name, level, v_weight) in lines {
        let u_max = level / p.alpha;
        for j in 0..=steps {
            let u = u_max * j as f64 / steps as f64;
            let v = (level - p.alpha * u) / v_weight;
            writeln!(csv, "{name},{u},{v}").unwrap();
        }
    }
    Ok(csv)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::CertifiedNonexistent => "certified-nonexistent",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn nonexist_cmd(a: NonexistArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let cert = check_nonexistence(&sys, a.range.into())?;
    let threshold = if a.threshold {
        Some(sigma4_threshold(&sys, a.range.into())?)
    } else {
        None
    };
    log::info(format!("verdict: {}", verdict_name(cert.verdict)));
    let code = match cert.verdict {
        Verdict::CertifiedNonexistent => 0,
        Verdict::Inconclusive => 3,
    };
    write_json(
        &a.out.out,
        &json!({ "certificate": cert, "sigma4_threshold": threshold }),
    )?;
    Ok(code)
}

fn solve_cmd(a: SolveArgs) -> Result<u8, Failure> {
    let mut sys = load_system(&a.system.system)?;
    if let Some(theta) = a.theta {
        sys = sys.with_theta(theta)?;
    }
    let grid = Grid::new(a.half_length, a.spacing)?;
    let cfg = SolverConfig {
        newton_tol: a.newton_tol,
        max_iter: a.max_iter,
        continuation_steps: a.continuation_steps,
        guess_width: a.guess_width,
        ..SolverConfig::default()
    };
    let (profile, stats) = solve_wave(&sys, &a.e_minus, &a.e_plus, &grid, &cfg)?;
    let meta = ProfileMeta::from(&profile);
    let mut csv = Vec::new();
    write_profile_csv(&profile, &mut csv)
        .map_err(|e| Failure::validation(format!("profile serialization failed: {e}")))?;
    std::fs::write(&a.out, &csv)
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", a.out.display())))?;
    let meta_path = sidecar_path(&a.out);
    let mut meta_text = serde_json::to_string_pretty(&meta)
        .map_err(|e| Failure::validation(format!("serialization failed: {e}")))?;
    meta_text.push('\n');
    std::fs::write(&meta_path, meta_text)
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", meta_path.display())))?;
    log::info(format!(
        "converged in {} iterations, residual {:.3e}; wrote {} and {}",
        stats.iterations,
        stats.residual_norm,
        a.out.display(),
        meta_path.display()
    ));
    write_json(&None, &json!({ "stats": stats, "meta": meta }))?;
    Ok(0)
}

fn verify_cmd(a: VerifyArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let meta_path = sidecar_path(&a.profile);
    let meta_text = std::fs::read_to_string(&meta_path)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", meta_path.display())))?;
    let meta: ProfileMeta = serde_json::from_str(&meta_text)
        .map_err(|e| Failure::validation(format!("metadata {}: {e}", meta_path.display())))?;
    let file = std::fs::File::open(&a.profile)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", a.profile.display())))?;
    let profile = read_profile_csv(BufReader::new(file), &meta)?;
    let h = profile.grid().spacing();
    let tol = a.tol.unwrap_or(10.0 * h * h + 1e-8);
    let chi_value = chi(profile.e_minus(), profile.e_plus(), a.state_tol)?;
    let bx = lv_box(&sys)?;
    let bounds = nbmp_bounds(&bx, sys.d(), &a.alpha, chi_value)?;
    let lower = lower_barrier(&bx, sys.d(), &a.alpha)?;
    let upper = upper_barrier(&bx, sys.d(), &a.alpha)?;
    let report =
        verify_bounds_with_barriers(&profile, &a.alpha, sys.d(), &bounds, &lower, &upper, tol)?;
    log::info(format!(
        "{}: p in [{}, {}] against [{}, {}], tol {}",
        if report.pass { "pass" } else { "VIOLATION" },
        report.p_min,
        report.p_max,
        report.lambda_lower,
        report.lambda_upper,
        tol
    ));
    write_json(&a.out.out, &report)?;
    Ok(if report.pass { 0 } else { 4 })
}

/// Inclusive arithmetic progression `from, from + step, ...` up to `to`
/// (with a small tolerance so the endpoint survives rounding).
fn sweep_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0) {
        return Err(Failure::validation(
            "sweep needs finite --from/--to and a positive --step",
        ));
    }
    if to < from {
        return Err(Failure::validation(
            "empty sweep range: --to is below --from",
        ));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| from + k as f64 * step).collect())
}

fn sweep_tangent(a: SweepTangentArgs) -> Result<u8, Failure> {
    let values = sweep_values(a.from, a.to, a.step)?;
    let mut csv = format!("{},case_id,lambda2,eta,lambda1,bound\n", a.param.name());
    for x in &values {
        let (mut alpha, mut beta, mut k, mut a1, mut a2, mut d) =
            (a.alpha, a.beta, a.k, a.a1, a.a2, a.d);
        match a.param {
            TangentParam::Alpha => alpha = *x,
            TangentParam::Beta => beta = *x,
            TangentParam::K => k = *x,
            TangentParam::A1 => a1 = *x,
            TangentParam::A2 => a2 = *x,
            TangentParam::D => d = *x,
        }
        let p = TwoSpeciesParams::new(alpha, beta, d, k, a1, a2)?;
        let improved = improved_pipeline(&p, a.composition.into())?;
        writeln!(
            csv,
            "{x},{},{},{},{},{}",
            improved.tangency.case_id,
            improved.tangency.lambda2,
            improved.eta,
            improved.lambda1,
            improved.bound
        )
        .unwrap();
    }
    log::info(format!("{} rows", values.len()));
    write_text(&a.out.out, &csv)?;
    Ok(0)
}

fn sweep_nonexist(a: SweepNonexistArgs) -> Result<u8, Failure> {
    let sys = load_system(&a.system.system)?;
    let values = sweep_values(a.from, a.to, a.step)?;
    let mut csv = String::from("sigma4,verdict,h1_holds,h2_holds,h2_lhs,h2_rhs\n");
    for x in &values {
        let probe = sys.clone().with_sigma(3, *x)?;
        let cert = check_nonexistence(&probe, a.range.into())?;
        writeln!(
            csv,
            "{x},{},{},{},{},{}",
            verdict_name(cert.verdict),
            cert.h1_holds,
            cert.h2_holds,
            cert.h2_lhs,
            cert.h2_rhs
        )
        .unwrap();
    }
    log::info(format!("{} rows", values.len()));
    write_text(&a.out.out, &csv)?;
    Ok(0)
}
