//! The six run kinds behind the subcommands, each ending in artifacts on
//! disk: an `effective-config.toml` echo plus command-specific CSV/JSON.
//!
//! Exit-code contract: 0 covers every completed run, including physically
//! negative findings (a diverged quench, a branch that does not exist, an
//! empty boundary); 1 is a computation that failed underway; 2 is a
//! configuration the run could not even start from. The split is made here
//! by wrapping errors into [`Failure`] at the point where the phase is known.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::Serialize;

use dicke_dimer::dynamics::{
    adiabatic_ramp, prepare_start, quench, seed_state, QuenchSpec, RampSpec, StartSpec,
};
use dicke_dimer::export::{
    phase_diagram_csv, ramp_tracking_csv, to_json_string, trajectory_csv, xy_csv,
};
use dicke_dimer::model::{critical_hopping, usp_threshold, DimerParams, DimerState};
use dicke_dimer::ode::StopReason;
use dicke_dimer::phasemap::{
    classify_phase, multistable_boundary, sweep_grid, AxisName, BasinOptions, BasinOutcome,
    GridAxis, Strategy,
};
use dicke_dimer::stability::{np_asrp_boundary, ssrp_boundary, stability_eigs, StabilityReport};
use dicke_dimer::steadystate::{
    np_solution, residual_norm, symmetric_srp_solution, SrpBranch, SrpSign, SrpSymmetry,
    DEFAULT_TOL_PHOTON,
};

use crate::config::{OutputFormat, RunConfig};

/// A failed run, tagged with the exit code its phase maps to.
pub struct Failure {
    pub exit_code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: 2,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self {
            exit_code: 1,
            error: error.into(),
        }
    }
}

pub type RunResult = Result<(), Failure>;

/// Creates the output directory and writes the effective-config echo before
/// any computation, so even a failed run records what it was asked to do.
fn prepare_out_dir(cfg: &RunConfig) -> Result<PathBuf, Failure> {
    let dir = PathBuf::from(&cfg.output.dir);
    fs::create_dir_all(&dir).map_err(|e| {
        Failure::runtime(anyhow!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    let echo = cfg.to_toml().map_err(Failure::runtime)?;
    write_artifact(&dir, "effective-config.toml", &echo)?;
    Ok(dir)
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| Failure::runtime(anyhow!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn json_doc<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = to_json_string(value).map_err(Failure::runtime)?;
    text.push('\n');
    Ok(text)
}

/// One steady-state branch in the `steady` report. Closed-form branches keep
/// their names; asymmetric-dimer roots found numerically are `numeric-k`.
#[derive(Serialize)]
struct BranchEntry {
    branch: String,
    exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<DimerState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_real_part: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    marginal: Option<bool>,
}

#[derive(Serialize)]
struct SteadyDoc {
    params: DimerParams,
    epsilon_margin: f64,
    label: String,
    branches: Vec<BranchEntry>,
}

fn branch_entry(
    params: &DimerParams,
    name: String,
    state: DimerState,
    epsilon_margin: f64,
) -> BranchEntry {
    let residual = residual_norm(params, &state);
    match stability_eigs(params, &state, epsilon_margin) {
        Ok(report) => BranchEntry {
            branch: name,
            exists: true,
            note: None,
            state: Some(state),
            residual: Some(residual),
            max_real_part: Some(report.max_real_part),
            stable: Some(report.stable),
            marginal: Some(report.marginal),
        },
        Err(e) => BranchEntry {
            branch: name,
            exists: true,
            note: Some(format!("stability unavailable: {e}")),
            state: Some(state),
            residual: Some(residual),
            max_real_part: None,
            stable: None,
            marginal: None,
        },
    }
}

fn describe_entry(entry: &BranchEntry) -> String {
    if !entry.exists {
        return format!("{}: does not exist", entry.branch);
    }
    match (entry.stable, entry.max_real_part) {
        (Some(true), Some(m)) => format!("{}: stable (max Re = {m:.3e})", entry.branch),
        (Some(false), Some(m)) => format!("{}: unstable (max Re = {m:.3e})", entry.branch),
        _ => format!("{}: {}", entry.branch, entry.note.as_deref().unwrap_or("?")),
    }
}

pub fn cmd_steady(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    let dir = prepare_out_dir(cfg)?;
    let margin = cfg.tolerances.margin;

    let mut branches = vec![branch_entry(&params, "NP".into(), np_solution(&params), margin)];
    let label;
    if params.identical_cavities() {
        for branch in SrpBranch::all() {
            match symmetric_srp_solution(&params, branch) {
                Ok(state) => branches.push(branch_entry(&params, branch.to_string(), state, margin)),
                Err(e) => branches.push(BranchEntry {
                    branch: branch.to_string(),
                    exists: false,
                    note: Some(e.to_string()),
                    state: None,
                    residual: None,
                    max_real_part: None,
                    stable: None,
                    marginal: None,
                }),
            }
        }
        label = classify_phase(&params, &Strategy::Analytic { epsilon_margin: margin })
            .map(|c| c.label.to_string())
            .map_err(Failure::runtime)?;
    } else {
        let opts = BasinOptions {
            t_max: cfg.steady.t_max,
            solver: cfg.tolerances.solver_opts(),
            epsilon_margin: margin,
            polish_tol: cfg.tolerances.newton,
            ..BasinOptions::default()
        };
        let classification =
            classify_phase(&params, &Strategy::Basin(opts)).map_err(Failure::runtime)?;
        let mut roots: Vec<(DimerState, Vec<String>)> = Vec::new();
        for run in &classification.evidence.basin_runs {
            if let BasinOutcome::Converged { state, .. } = &run.outcome {
                match roots
                    .iter_mut()
                    .find(|(rep, _)| rep.distance_mod_z2(state) < opts.cluster_tol)
                {
                    Some((_, seeds)) => seeds.push(run.seed.clone()),
                    None => roots.push((*state, vec![run.seed.clone()])),
                }
            }
        }
        let mut k = 0;
        for (state, seeds) in roots {
            let dark = state.cavity1.photon_amplitude() < DEFAULT_TOL_PHOTON
                && state.cavity2.photon_amplitude() < DEFAULT_TOL_PHOTON;
            if dark {
                continue;
            }
            k += 1;
            let mut entry = branch_entry(&params, format!("numeric-{k}"), state, margin);
            entry.note = Some(format!("reached from seeds: {}", seeds.join(", ")));
            branches.push(entry);
        }
        label = classification.label.to_string();
    }

    for entry in &branches {
        println!("{}", describe_entry(entry));
    }
    println!("label: {label}");

    let doc = SteadyDoc {
        params,
        epsilon_margin: margin,
        label,
        branches,
    };
    write_artifact(&dir, "steady.json", &json_doc(&doc)?)?;
    Ok(())
}

#[derive(Serialize)]
struct StabilityEntry {
    branch: String,
    exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<DimerState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<StabilityReport>,
}

#[derive(Serialize)]
struct BoundariesDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    np_asrp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ssrp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    critical_hopping: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    usp: Option<f64>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct StabilityDoc {
    params: DimerParams,
    epsilon_margin: f64,
    branches: Vec<StabilityEntry>,
    boundaries: BoundariesDoc,
}

fn parse_branch_selector(s: &str) -> Result<Vec<Option<SrpBranch>>, Failure> {
    let branch = |sym, sign| Some(SrpBranch::new(sym, sign));
    match s.trim().to_ascii_lowercase().as_str() {
        "all" => Ok(vec![
            None,
            branch(SrpSymmetry::Symmetric, SrpSign::Plus),
            branch(SrpSymmetry::Symmetric, SrpSign::Minus),
            branch(SrpSymmetry::Antisymmetric, SrpSign::Plus),
            branch(SrpSymmetry::Antisymmetric, SrpSign::Minus),
        ]),
        "np" => Ok(vec![None]),
        "ssrp+" => Ok(vec![branch(SrpSymmetry::Symmetric, SrpSign::Plus)]),
        "ssrp-" => Ok(vec![branch(SrpSymmetry::Symmetric, SrpSign::Minus)]),
        "asrp+" => Ok(vec![branch(SrpSymmetry::Antisymmetric, SrpSign::Plus)]),
        "asrp-" => Ok(vec![branch(SrpSymmetry::Antisymmetric, SrpSign::Minus)]),
        other => Err(Failure::config(anyhow!(
            "unknown branch '{other}' (expected all, np, ssrp+, ssrp-, asrp+ or asrp-)"
        ))),
    }
}

pub fn cmd_stability(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    let margin = cfg.tolerances.margin;
    let mut selection = parse_branch_selector(&cfg.stability.branch)?;
    if !params.identical_cavities() {
        if selection.iter().any(|b| b.is_some()) && cfg.stability.branch.trim() != "all" {
            return Err(Failure::config(anyhow!(
                "superradiant branches are closed-form only for identical cavities; \
                 use `steady` for numerically found asymmetric roots"
            )));
        }
        selection.retain(|b| b.is_none());
    }
    let dir = prepare_out_dir(cfg)?;

    let mut branches = Vec::new();
    for selected in selection {
        let (name, state) = match selected {
            None => ("NP".to_string(), Ok(np_solution(&params))),
            Some(branch) => (branch.to_string(), symmetric_srp_solution(&params, branch)),
        };
        match state {
            Ok(state) => match stability_eigs(&params, &state, margin) {
                Ok(report) => branches.push(StabilityEntry {
                    branch: name,
                    exists: true,
                    note: None,
                    state: Some(state),
                    report: Some(report),
                }),
                Err(e) => branches.push(StabilityEntry {
                    branch: name,
                    exists: true,
                    note: Some(format!("stability unavailable: {e}")),
                    state: Some(state),
                    report: None,
                }),
            },
            Err(e) => branches.push(StabilityEntry {
                branch: name,
                exists: false,
                note: Some(e.to_string()),
                state: None,
                report: None,
            }),
        }
    }

    let mut boundaries = BoundariesDoc {
        np_asrp: None,
        ssrp: None,
        critical_hopping: None,
        usp: None,
        notes: Vec::new(),
    };
    match critical_hopping(&params) {
        Ok(j) => boundaries.critical_hopping = Some(j),
        Err(e) => boundaries.notes.push(format!("critical hopping: {e}")),
    }
    if params.identical_cavities() {
        boundaries.np_asrp = Some(np_asrp_boundary(&params.cavity1));
        match ssrp_boundary(&params.cavity1) {
            Ok(j) => boundaries.ssrp = Some(j),
            Err(e) => boundaries.notes.push(format!("SSRP boundary: {e}")),
        }
        boundaries.usp = Some(usp_threshold(params.cavity1.omega_c, params.cavity1.kappa));
    } else {
        boundaries
            .notes
            .push("analytic boundaries apply to identical cavities only".into());
    }

    for entry in &branches {
        match (&entry.report, entry.exists) {
            (Some(r), _) => println!(
                "{}: max Re = {:.6e} ({})",
                entry.branch,
                r.max_real_part,
                if r.stable {
                    "stable"
                } else if r.marginal {
                    "marginal"
                } else {
                    "unstable"
                }
            ),
            (None, false) => println!("{}: does not exist", entry.branch),
            (None, true) => println!(
                "{}: {}",
                entry.branch,
                entry.note.as_deref().unwrap_or("?")
            ),
        }
    }
    if let Some(j) = boundaries.np_asrp {
        println!("NP/ASRP boundary: J = {j:.6}");
    }
    if let Some(j) = boundaries.ssrp {
        println!("SSRP destabilization: J = {j:.6}");
    }
    if let Some(j) = boundaries.critical_hopping {
        println!("critical hopping: J_c = {j:.6}");
    }
    if let Some(j) = boundaries.usp {
        println!("unstable-phase threshold: J_usp = {j:.6}");
    }

    let doc = StabilityDoc {
        params,
        epsilon_margin: margin,
        branches,
        boundaries,
    };
    write_artifact(&dir, "stability.json", &json_doc(&doc)?)?;
    Ok(())
}

#[derive(Serialize)]
struct QuenchDoc {
    params: DimerParams,
    spec: QuenchSpec,
    outcome: StopReason,
    label: dicke_dimer::dynamics::QuenchLabel,
    initial_state: DimerState,
    final_state: DimerState,
    final_time: f64,
    residual_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    polished: Option<DimerState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polish_shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_polished: Option<f64>,
}

pub fn cmd_quench(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    let start: StartSpec = cfg.quench.start.parse().map_err(Failure::config)?;
    let seed_signs = crate::config::parse_seed_signs(&cfg.quench.seed_signs).map_err(Failure::config)?;
    let spec = QuenchSpec {
        j_initial: cfg.quench.j_initial,
        j_final: cfg.quench.j_final.unwrap_or(cfg.params.hopping),
        start,
        seed_signs,
        seed_eps: cfg.quench.seed_eps,
        t_max: cfg.quench.t_max,
        sample_dt: cfg.quench.sample_dt,
    };
    // A start pattern that cannot be prepared (a branch missing at J_i, a
    // mixed pattern away from J_i = 0) is a configuration error, not a run
    // failure; probe it before committing to the integration.
    prepare_start(&params, spec.j_initial, &spec.start).map_err(Failure::config)?;
    let dir = prepare_out_dir(cfg)?;

    let opts = cfg.tolerances.solver_opts();
    let result = quench(&params, &spec, &opts).map_err(Failure::runtime)?;

    let p_final = params.with_hopping(spec.j_final);
    let doc = QuenchDoc {
        params,
        spec,
        outcome: result.trajectory.outcome,
        label: result.label,
        initial_state: result.initial_state,
        final_state: result.final_state,
        final_time: result.trajectory.final_time(),
        residual_final: residual_norm(&p_final, &result.final_state),
        residual_polished: result.polished.map(|s| residual_norm(&p_final, &s)),
        polished: result.polished,
        polish_shift: result.polish_shift,
    };

    match doc.outcome {
        StopReason::SteadyReached { t } => println!("outcome: {:?} at t = {t:.1}", doc.label),
        StopReason::Diverged { t, amplitude } => {
            println!("outcome: Diverged at t = {t:.1} (|gamma| = {amplitude:.3e})")
        }
        StopReason::Completed => println!("outcome: {:?} (t_max reached)", doc.label),
    }

    write_artifact(&dir, "trajectory.csv", &trajectory_csv(&result.trajectory))?;
    write_artifact(&dir, "quench.json", &json_doc(&doc)?)?;
    Ok(())
}

#[derive(Serialize)]
struct RampDoc {
    params: DimerParams,
    spec: RampSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    tracked: Option<SrpSymmetry>,
    sup_abs: f64,
    sup_rel: f64,
    final_state: DimerState,
    final_time: f64,
    warnings: Vec<String>,
}

pub fn cmd_ramp(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    let start: StartSpec = cfg.ramp.start.parse().map_err(Failure::config)?;
    let seed_signs = crate::config::parse_seed_signs(&cfg.ramp.seed_signs).map_err(Failure::config)?;
    let track = crate::config::parse_track(&cfg.ramp.track).map_err(Failure::config)?;
    let spec = RampSpec {
        j_initial: cfg.ramp.j_initial,
        j_final: cfg.ramp.j_final,
        k: cfg.ramp.k,
        t_f: cfg.ramp.t_f,
        sample_dt: cfg.ramp.sample_dt,
        track,
    };
    let schedule = spec.schedule();
    let warnings = schedule.warnings();
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    // The atan schedule never quite reaches j_initial at t = 0; the start
    // branch is prepared at the actual J(0).
    let prepared = prepare_start(&params, schedule.value(0.0), &start).map_err(Failure::config)?;
    let state0 = seed_state(&prepared, seed_signs, cfg.ramp.seed_eps);
    let dir = prepare_out_dir(cfg)?;

    let opts = cfg.tolerances.solver_opts();
    let result = adiabatic_ramp(&params, &state0, &spec, &opts).map_err(Failure::runtime)?;

    match result.tracked {
        Some(sym) => println!(
            "tracked {sym:?} branch: sup |error| = {:.3e} (relative {:.3e})",
            result.sup_abs, result.sup_rel
        ),
        None => println!("no branch tracked (asymmetric cavities)"),
    }

    let doc = RampDoc {
        params,
        spec,
        tracked: result.tracked,
        sup_abs: result.sup_abs,
        sup_rel: result.sup_rel,
        final_state: *result.trajectory.final_state(),
        final_time: result.trajectory.final_time(),
        warnings,
    };
    write_artifact(&dir, "ramp_trajectory.csv", &trajectory_csv(&result.trajectory))?;
    write_artifact(&dir, "tracking.csv", &ramp_tracking_csv(&result))?;
    write_artifact(&dir, "ramp.json", &json_doc(&doc)?)?;
    Ok(())
}

fn build_strategy(name: &str, cfg: &RunConfig, basin_t_max: f64) -> Result<Strategy, Failure> {
    match name.trim().to_ascii_lowercase().as_str() {
        "analytic" => Ok(Strategy::Analytic {
            epsilon_margin: cfg.tolerances.margin,
        }),
        "basin" => Ok(Strategy::Basin(BasinOptions {
            t_max: basin_t_max,
            solver: cfg.tolerances.solver_opts(),
            epsilon_margin: cfg.tolerances.margin,
            polish_tol: cfg.tolerances.newton,
            ..BasinOptions::default()
        })),
        other => Err(Failure::config(anyhow!(
            "unknown strategy '{other}' (expected analytic or basin)"
        ))),
    }
}

pub fn cmd_sweep(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    if cfg.sweep.axis.is_empty() {
        return Err(Failure::config(anyhow!(
            "sweep needs 1 to 3 axes; pass --axis name:lo:hi:n or fill [sweep] in the config"
        )));
    }
    if cfg.sweep.axis.len() > 3 {
        return Err(Failure::config(anyhow!(
            "sweeps take at most 3 axes, got {}",
            cfg.sweep.axis.len()
        )));
    }
    let axes: Vec<GridAxis> = cfg
        .sweep
        .axis
        .iter()
        .map(|a| a.build())
        .collect::<anyhow::Result<_>>()
        .map_err(Failure::config)?;
    let strategy = build_strategy(&cfg.sweep.strategy, cfg, cfg.sweep.basin_t_max)?;
    let dir = prepare_out_dir(cfg)?;

    let diagram = match cfg.sweep.workers {
        0 => sweep_grid(&params, &axes, &strategy),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::runtime(anyhow!("cannot build worker pool: {e}")))?
            .install(|| sweep_grid(&params, &axes, &strategy)),
    }
    .map_err(Failure::runtime)?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cell in &diagram.cells {
        *counts.entry(cell.label.to_string()).or_default() += 1;
    }
    let summary: Vec<String> = counts.iter().map(|(l, n)| format!("{l}: {n}")).collect();
    println!("{} cells ({})", diagram.cells.len(), summary.join(", "));

    match cfg.output.format {
        OutputFormat::Csv => write_artifact(&dir, "diagram.csv", &phase_diagram_csv(&diagram))?,
        OutputFormat::Json => write_artifact(&dir, "diagram.json", &json_doc(&diagram)?)?,
    };
    Ok(())
}

#[derive(Serialize)]
struct SkippedPoint {
    value: f64,
    reason: String,
}

#[derive(Serialize)]
struct BoundaryDoc {
    kind: String,
    scan: String,
    y: String,
    points: Vec<(f64, f64)>,
    skipped: Vec<SkippedPoint>,
}

/// Scan axes that keep the two cavities identical, a precondition of the
/// closed-form boundary curves.
fn both_cavity_axis(axis: AxisName) -> bool {
    matches!(
        axis,
        AxisName::Lambda | AxisName::Kappa | AxisName::Chi | AxisName::OmegaC | AxisName::OmegaA
    )
}

pub fn cmd_boundary(cfg: &RunConfig) -> RunResult {
    let params = cfg.params.build().map_err(Failure::config)?;
    let b = &cfg.boundary;
    let scan: AxisName = b.scan.parse().map_err(Failure::config)?;
    let scan_values = GridAxis::linspace(scan, b.lo, b.hi, b.points)
        .map_err(Failure::config)?
        .values;
    let kind = b.kind.trim().to_ascii_lowercase();

    enum Kind {
        Curve(fn(&dicke_dimer::model::CavityParams) -> Result<f64, dicke_dimer::DickeError>),
        Multistable { bisect: AxisName, strategy: Strategy },
    }
    let kind = match kind.as_str() {
        "np-asrp" | "ssrp" => {
            if !params.identical_cavities() {
                return Err(Failure::config(anyhow!(
                    "the {kind} boundary is closed-form for identical cavities only"
                )));
            }
            if !both_cavity_axis(scan) {
                return Err(Failure::config(anyhow!(
                    "scan axis {scan} breaks the cavity symmetry; use lambda, kappa, chi, omega_c or omega_a"
                )));
            }
            if kind == "np-asrp" {
                Kind::Curve(|c| Ok(np_asrp_boundary(c)))
            } else {
                Kind::Curve(ssrp_boundary)
            }
        }
        "multistable" => {
            let bisect: AxisName = b.bisect.parse().map_err(Failure::config)?;
            if bisect == scan {
                return Err(Failure::config(anyhow!(
                    "scan and bisect axes must differ, both are {scan}"
                )));
            }
            if !(b.bisect_hi > b.bisect_lo) {
                return Err(Failure::config(anyhow!(
                    "bisect bracket [{}, {}] is not an increasing interval",
                    b.bisect_lo,
                    b.bisect_hi
                )));
            }
            Kind::Multistable {
                bisect,
                strategy: build_strategy(&b.strategy, cfg, cfg.sweep.basin_t_max)?,
            }
        }
        other => {
            return Err(Failure::config(anyhow!(
                "unknown boundary kind '{other}' (expected np-asrp, ssrp or multistable)"
            )))
        }
    };
    let dir = prepare_out_dir(cfg)?;

    let y_name = match &kind {
        Kind::Curve(_) => "j_star".to_string(),
        Kind::Multistable { bisect, .. } => format!("{bisect}_star"),
    };
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &v in &scan_values {
        let mut p = params;
        scan.apply(&mut p, v);
        let result = match &kind {
            Kind::Curve(f) => f(&p.cavity1),
            Kind::Multistable { bisect, strategy } => {
                multistable_boundary(&p, *bisect, (b.bisect_lo, b.bisect_hi), strategy, b.resolution)
            }
        };
        match result {
            Ok(y) => points.push((v, y)),
            Err(e) => skipped.push(SkippedPoint {
                value: v,
                reason: e.to_string(),
            }),
        }
    }

    println!("{} boundary points, {} skipped", points.len(), skipped.len());

    let doc = BoundaryDoc {
        kind: b.kind.clone(),
        scan: b.scan.clone(),
        y: y_name.clone(),
        points: points.clone(),
        skipped,
    };
    write_artifact(&dir, "boundary.csv", &xy_csv(&b.scan, &y_name, &points))?;
    write_artifact(&dir, "boundary.json", &json_doc(&doc)?)?;
    Ok(())
}
