//! Phase classification of parameter points and grid sweeps over them.
//!
//! Two classification strategies are offered. Analytic (identical cavities
//! only) builds the normal-phase and closed-form superradiant candidates and
//! reads the label off their linear stability. Basin (any parameters) relaxes
//! the five canonical seeds, the seeded normal start plus the four
//! sign-combination superradiant starts prepared at J = 0, clusters the
//! converged endpoints modulo the total Z2 flip, and composes the label from
//! the surviving classes. Every converged endpoint must pass a Newton polish
//! and a strict stability check before it counts; roots that land inside the
//! neutral eigenvalue band are refused, which keeps both strategies agreeing
//! on Undetermined at marginal parameters instead of the basin strategy
//! guessing.
//!
//! Divergent runs flag the energetically unbounded region: a cell where every
//! seed diverges is Unstable, while mixed divergence defers to the converged
//! majority with the divergences kept in evidence.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::dynamics::{integrate, seed_state, HoppingSchedule};
use crate::model::{DimerParams, DimerState};
use crate::ode::{SolverOpts, StopReason};
use crate::stability::{stability_eigs, DEFAULT_EPSILON_MARGIN};
use crate::steadystate::{
    np_solution, single_cavity_srp, solve_steady_numeric, symmetric_srp_solution, SrpBranch,
    SrpSign, SrpSymmetry, DEFAULT_TOL_PHOTON,
};

/// Default bisection resolution of `multistable_boundary`.
pub const DEFAULT_BOUNDARY_RESOLUTION: f64 = 1e-3;

/// Phase verdict of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    /// Both cavities dark; the normal phase is the only attractor.
    #[serde(rename = "NP_NP")]
    NpNp,
    /// Both cavities bright in a dimer without mirror symmetry.
    #[serde(rename = "SRP_SRP")]
    SrpSrp,
    /// Only the symmetric superradiant pair survives.
    #[serde(rename = "SSRP_only")]
    SsrpOnly,
    /// Only the antisymmetric superradiant pair survives.
    #[serde(rename = "ASRP_only")]
    AsrpOnly,
    /// At least two attractors distinct modulo the total Z2 flip.
    #[serde(rename = "Multistable")]
    Multistable,
    /// No attractor at all; trajectories diverge.
    #[serde(rename = "Unstable")]
    Unstable,
    /// Evidence insufficient: marginal eigenvalues or unconverged basins.
    #[serde(rename = "Undetermined")]
    Undetermined,
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PhaseLabel::NpNp => "NP_NP",
            PhaseLabel::SrpSrp => "SRP_SRP",
            PhaseLabel::SsrpOnly => "SSRP_only",
            PhaseLabel::AsrpOnly => "ASRP_only",
            PhaseLabel::Multistable => "Multistable",
            PhaseLabel::Unstable => "Unstable",
            PhaseLabel::Undetermined => "Undetermined",
        };
        f.write_str(s)
    }
}

/// Knobs of the basin strategy.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct BasinOptions {
    /// Relaxation horizon per seed.
    pub t_max: f64,
    pub seed_eps: f64,
    pub solver: SolverOpts,
    /// Photon amplitude separating dark from bright endpoints.
    pub tol_photon: f64,
    /// Max-norm radius identifying two endpoints as the same state.
    pub cluster_tol: f64,
    /// Neutral eigenvalue band; polished roots inside it are refused.
    pub epsilon_margin: f64,
    /// Newton residual tolerance for polishing endpoints.
    pub polish_tol: f64,
    /// Sample spacing, also the grain of the endpoint window average.
    pub sample_dt: f64,
}

impl Default for BasinOptions {
    fn default() -> Self {
        Self {
            t_max: 5000.0,
            seed_eps: 1e-6,
            solver: SolverOpts::default(),
            tol_photon: DEFAULT_TOL_PHOTON,
            cluster_tol: 1e-4,
            epsilon_margin: DEFAULT_EPSILON_MARGIN,
            polish_tol: 1e-10,
            sample_dt: 2.5,
        }
    }
}

/// How a point is classified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Strategy {
    /// Closed-form candidates plus eigenvalues; identical cavities only.
    Analytic { epsilon_margin: f64 },
    /// Seeded relaxation from the canonical starts; any parameters.
    Basin(BasinOptions),
}

impl Strategy {
    pub fn analytic() -> Self {
        Strategy::Analytic {
            epsilon_margin: DEFAULT_EPSILON_MARGIN,
        }
    }

    pub fn basin() -> Self {
        Strategy::Basin(BasinOptions::default())
    }
}

/// Stability record of one analytic candidate branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateReport {
    pub branch: String,
    pub exists: bool,
    /// Nonexistence reason or other remark.
    pub note: Option<String>,
    pub max_real_part: Option<f64>,
    pub stable: bool,
    pub marginal: bool,
}

/// End of one seeded basin run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BasinOutcome {
    Converged {
        state: DimerState,
        max_real_part: f64,
    },
    Diverged {
        t: f64,
    },
    Undetermined {
        reason: String,
    },
}

/// One seeded basin run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasinRun {
    pub seed: String,
    pub outcome: BasinOutcome,
}

/// Everything needed to re-derive a cell's label.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Evidence {
    pub candidates: Vec<CandidateReport>,
    pub basin_runs: Vec<BasinRun>,
    pub note: Option<String>,
}

/// A label together with its supporting evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub label: PhaseLabel,
    pub evidence: Evidence,
}

fn classify_analytic(params: &DimerParams, epsilon_margin: f64) -> Result<Classification> {
    if !params.identical_cavities() {
        return Err(DickeError::UnsupportedConfiguration(
            "analytic classification needs identical cavities; use the basin strategy".into(),
        ));
    }
    let mut candidates = Vec::with_capacity(3);
    let mut stable = Vec::new();
    let mut marginal_any = false;

    let np = np_solution(params);
    let np_report = stability_eigs(params, &np, epsilon_margin)?;
    marginal_any |= np_report.marginal;
    if np_report.stable {
        stable.push(PhaseLabel::NpNp);
    }
    candidates.push(CandidateReport {
        branch: "NP".into(),
        exists: true,
        note: None,
        max_real_part: Some(np_report.max_real_part),
        stable: np_report.stable,
        marginal: np_report.marginal,
    });

    for (symmetry, name, label) in [
        (SrpSymmetry::Symmetric, "SSRP±", PhaseLabel::SsrpOnly),
        (SrpSymmetry::Antisymmetric, "ASRP±", PhaseLabel::AsrpOnly),
    ] {
        match symmetric_srp_solution(params, SrpBranch::new(symmetry, SrpSign::Plus)) {
            Ok(state) => {
                let report = stability_eigs(params, &state, epsilon_margin)?;
                marginal_any |= report.marginal;
                if report.stable {
                    stable.push(label);
                }
                candidates.push(CandidateReport {
                    branch: name.into(),
                    exists: true,
                    note: None,
                    max_real_part: Some(report.max_real_part),
                    stable: report.stable,
                    marginal: report.marginal,
                });
            }
            Err(DickeError::NonexistentBranch(msg)) => candidates.push(CandidateReport {
                branch: name.into(),
                exists: false,
                note: Some(msg),
                max_real_part: None,
                stable: false,
                marginal: false,
            }),
            Err(e) => return Err(e),
        }
    }

    // NP and an SRP branch cannot both be strictly stable: ASRP existence
    // starts exactly where NP destabilizes. If numerics ever claim both, the
    // census is not trustworthy.
    let (label, note) = match stable.as_slice() {
        [] if marginal_any => (PhaseLabel::Undetermined, None),
        [] => (PhaseLabel::Unstable, None),
        [single] => (*single, None),
        s if s.contains(&PhaseLabel::NpNp) => (
            PhaseLabel::Undetermined,
            Some("NP and a superradiant branch both read as stable; inconsistent census".into()),
        ),
        _ => (PhaseLabel::Multistable, None),
    };
    Ok(Classification {
        label,
        evidence: Evidence {
            candidates,
            basin_runs: Vec::new(),
            note,
        },
    })
}

struct BasinSeed {
    name: String,
    state: DimerState,
}

// Every start gets the same antisymmetric (+,-) tickle. Mirror-symmetric
// starts tickled symmetrically would stay on the symmetric manifold and
// relax toward its restricted fixed point even where that point is unstable
// off the manifold.
const BASIN_TICKLE: (SrpSign, SrpSign) = (SrpSign::Plus, SrpSign::Minus);

fn basin_seeds(params: &DimerParams, opts: &BasinOptions) -> Vec<BasinSeed> {
    let mut seeds: Vec<BasinSeed> = Vec::with_capacity(5);
    let np = np_solution(params);
    let mut push_unique = |name: String, state: DimerState| {
        if !seeds.iter().any(|s| s.state.max_norm_distance(&state) < 1e-12) {
            seeds.push(BasinSeed { name, state });
        }
    };

    push_unique("np".into(), seed_state(&np, BASIN_TICKLE, opts.seed_eps));
    for s1 in [SrpSign::Plus, SrpSign::Minus] {
        for s2 in [SrpSign::Plus, SrpSign::Minus] {
            let c1 = single_cavity_srp(&params.cavity1, s1).unwrap_or(np.cavity1);
            let c2 = single_cavity_srp(&params.cavity2, s2).unwrap_or(np.cavity2);
            let state = seed_state(
                &DimerState {
                    cavity1: c1,
                    cavity2: c2,
                },
                BASIN_TICKLE,
                opts.seed_eps,
            );
            let tag = |s: SrpSign| if s == SrpSign::Plus { '+' } else { '-' };
            push_unique(format!("srp({}{})", tag(s1), tag(s2)), state);
        }
    }
    seeds
}

fn window_average(
    times: &[f64],
    states: &[DimerState],
    window: f64,
) -> Option<DimerState> {
    let t_last = *times.last()?;
    let mut acc = [0.0f64; 10];
    let mut count = 0usize;
    for i in (0..times.len()).rev() {
        if t_last - times[i] > window {
            break;
        }
        let a = states[i].to_array();
        for k in 0..10 {
            acc[k] += a[k];
        }
        count += 1;
    }
    if count < 2 {
        return None;
    }
    for v in &mut acc {
        *v /= count as f64;
    }
    Some(DimerState::from_array(&acc))
}

fn polish_and_gate(
    params: &DimerParams,
    guess: &DimerState,
    opts: &BasinOptions,
) -> std::result::Result<(DimerState, f64), String> {
    let root = solve_steady_numeric(params, guess, opts.polish_tol)
        .map_err(|e| format!("polish failed: {e}"))?;
    let report = stability_eigs(params, &root, opts.epsilon_margin)
        .map_err(|e| format!("stability check failed: {e}"))?;
    if report.stable {
        Ok((root, report.max_real_part))
    } else {
        Err(format!(
            "polished root is not strictly stable (max Re = {:.3e})",
            report.max_real_part
        ))
    }
}

fn run_basin_seed(params: &DimerParams, seed: &BasinSeed, opts: &BasinOptions) -> BasinRun {
    let schedule = HoppingSchedule::Constant(params.hopping);
    let traj = match integrate(
        params,
        &seed.state,
        &schedule,
        (0.0, opts.t_max),
        opts.sample_dt,
        &opts.solver,
        true,
    ) {
        Ok(t) => t,
        Err(e) => {
            return BasinRun {
                seed: seed.name.clone(),
                outcome: BasinOutcome::Undetermined {
                    reason: format!("integration failed: {e}"),
                },
            }
        }
    };
    let outcome = match traj.outcome {
        StopReason::Diverged { t, .. } => BasinOutcome::Diverged { t },
        StopReason::SteadyReached { .. } => match polish_and_gate(params, traj.final_state(), opts)
        {
            Ok((state, max_real_part)) => BasinOutcome::Converged {
                state,
                max_real_part,
            },
            Err(reason) => BasinOutcome::Undetermined { reason },
        },
        StopReason::Completed => {
            // Orbit centers estimated over several window lengths: short
            // windows suit fast relaxation remnants, long ones average out
            // slow multi-frequency orbits around weakly attracting roots.
            let mut candidates: Vec<DimerState> = Vec::with_capacity(4);
            for window in [
                opts.solver.steady_window,
                0.1 * opts.t_max,
                0.5 * opts.t_max,
            ] {
                if let Some(avg) = window_average(&traj.times, &traj.states, window) {
                    candidates.push(avg);
                }
            }
            candidates.push(*traj.final_state());
            let mut last_err = String::from("no polish candidates");
            let mut found = None;
            for guess in &candidates {
                match polish_and_gate(params, guess, opts) {
                    Ok(hit) => {
                        found = Some(hit);
                        break;
                    }
                    Err(reason) => last_err = reason,
                }
            }
            match found {
                Some((state, max_real_part)) => BasinOutcome::Converged {
                    state,
                    max_real_part,
                },
                None => BasinOutcome::Undetermined {
                    reason: format!("no steadiness by t = {}; {last_err}", opts.t_max),
                },
            }
        }
    };
    BasinRun {
        seed: seed.name.clone(),
        outcome,
    }
}

fn classify_basin(params: &DimerParams, opts: &BasinOptions) -> Result<Classification> {
    let seeds = basin_seeds(params, opts);
    let basin_runs: Vec<BasinRun> = seeds
        .iter()
        .map(|seed| run_basin_seed(params, seed, opts))
        .collect();

    let evidence = |note: Option<String>| Evidence {
        candidates: Vec::new(),
        basin_runs: basin_runs.clone(),
        note,
    };

    if basin_runs
        .iter()
        .any(|r| matches!(r.outcome, BasinOutcome::Undetermined { .. }))
    {
        return Ok(Classification {
            label: PhaseLabel::Undetermined,
            evidence: evidence(Some("at least one seed left undetermined".into())),
        });
    }

    let converged: Vec<&DimerState> = basin_runs
        .iter()
        .filter_map(|r| match &r.outcome {
            BasinOutcome::Converged { state, .. } => Some(state),
            _ => None,
        })
        .collect();
    if converged.is_empty() {
        return Ok(Classification {
            label: PhaseLabel::Unstable,
            evidence: evidence(Some("every seed diverged".into())),
        });
    }

    let mut classes: Vec<&DimerState> = Vec::new();
    for state in &converged {
        if !classes
            .iter()
            .any(|c| c.distance_mod_z2(state) < opts.cluster_tol)
        {
            classes.push(state);
        }
    }

    let label = if classes.len() >= 2 {
        PhaseLabel::Multistable
    } else {
        let rep = classes[0];
        let bright1 = rep.cavity1.photon_amplitude() >= opts.tol_photon;
        let bright2 = rep.cavity2.photon_amplitude() >= opts.tol_photon;
        match (bright1, bright2) {
            (false, false) => PhaseLabel::NpNp,
            (true, true) if params.identical_cavities() => {
                if rep.cavity1.re_gamma * rep.cavity2.re_gamma > 0.0 {
                    PhaseLabel::SsrpOnly
                } else {
                    PhaseLabel::AsrpOnly
                }
            }
            (true, true) => PhaseLabel::SrpSrp,
            _ => {
                return Err(DickeError::InvalidState(format!(
                    "converged steady state is bright in one cavity only (|g1| = {:.3e}, |g2| = {:.3e}); \
                     this contradicts the coupling structure",
                    rep.cavity1.photon_amplitude(),
                    rep.cavity2.photon_amplitude()
                )))
            }
        }
    };
    Ok(Classification {
        label,
        evidence: evidence(None),
    })
}

/// Labels one parameter point. The hopping in `params` is the working J;
/// basin seeds are prepared at J = 0 regardless.
pub fn classify_phase(params: &DimerParams, strategy: &Strategy) -> Result<Classification> {
    params.validate()?;
    match strategy {
        Strategy::Analytic { epsilon_margin } => classify_analytic(params, *epsilon_margin),
        Strategy::Basin(opts) => classify_basin(params, opts),
    }
}

/// A sweepable scalar of `DimerParams`. The plain names move both cavities
/// together; the numbered ones address a single cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Lambda,
    Lambda1,
    Lambda2,
    Kappa,
    Kappa1,
    Kappa2,
    Chi,
    Chi1,
    Chi2,
    OmegaC,
    OmegaC1,
    OmegaC2,
    OmegaA,
    OmegaA1,
    OmegaA2,
    Hopping,
}

impl AxisName {
    pub fn apply(&self, params: &mut DimerParams, value: f64) {
        use AxisName::*;
        match self {
            Lambda => {
                params.cavity1.lambda = value;
                params.cavity2.lambda = value;
            }
            Lambda1 => params.cavity1.lambda = value,
            Lambda2 => params.cavity2.lambda = value,
            Kappa => {
                params.cavity1.kappa = value;
                params.cavity2.kappa = value;
            }
            Kappa1 => params.cavity1.kappa = value,
            Kappa2 => params.cavity2.kappa = value,
            Chi => {
                params.cavity1.chi = value;
                params.cavity2.chi = value;
            }
            Chi1 => params.cavity1.chi = value,
            Chi2 => params.cavity2.chi = value,
            OmegaC => {
                params.cavity1.omega_c = value;
                params.cavity2.omega_c = value;
            }
            OmegaC1 => params.cavity1.omega_c = value,
            OmegaC2 => params.cavity2.omega_c = value,
            OmegaA => {
                params.cavity1.omega_a = value;
                params.cavity2.omega_a = value;
            }
            OmegaA1 => params.cavity1.omega_a = value,
            OmegaA2 => params.cavity2.omega_a = value,
            Hopping => params.hopping = value,
        }
    }
}

impl std::str::FromStr for AxisName {
    type Err = DickeError;

    fn from_str(s: &str) -> Result<Self> {
        use AxisName::*;
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "lambda" => Lambda,
            "lambda1" => Lambda1,
            "lambda2" => Lambda2,
            "kappa" => Kappa,
            "kappa1" => Kappa1,
            "kappa2" => Kappa2,
            "chi" => Chi,
            "chi1" => Chi1,
            "chi2" => Chi2,
            "omega_c" | "omega-c" => OmegaC,
            "omega_c1" | "omega-c1" => OmegaC1,
            "omega_c2" | "omega-c2" => OmegaC2,
            "omega_a" | "omega-a" => OmegaA,
            "omega_a1" | "omega-a1" => OmegaA1,
            "omega_a2" | "omega-a2" => OmegaA2,
            "j" | "hopping" => Hopping,
            other => {
                return Err(DickeError::InvalidAxis(format!(
                    "unknown axis '{other}'"
                )))
            }
        })
    }
}

impl std::fmt::Display for AxisName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use AxisName::*;
        let s = match self {
            Lambda => "lambda",
            Lambda1 => "lambda1",
            Lambda2 => "lambda2",
            Kappa => "kappa",
            Kappa1 => "kappa1",
            Kappa2 => "kappa2",
            Chi => "chi",
            Chi1 => "chi1",
            Chi2 => "chi2",
            OmegaC => "omega_c",
            OmegaC1 => "omega_c1",
            OmegaC2 => "omega_c2",
            OmegaA => "omega_a",
            OmegaA1 => "omega_a1",
            OmegaA2 => "omega_a2",
            Hopping => "hopping",
        };
        f.write_str(s)
    }
}

/// One named sweep axis with its grid values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

impl GridAxis {
    /// `n` evenly spaced values on [lo, hi]; a single-point axis pins the
    /// parameter at `lo`.
    pub fn linspace(name: AxisName, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DickeError::InvalidAxis(format!(
                "axis {name} needs at least one grid point"
            )));
        }
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(DickeError::InvalidAxis(format!(
                "axis {name} has an invalid range [{lo}, {hi}]"
            )));
        }
        let values = if n == 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * i as f64 / (n - 1) as f64
                    }
                })
                .collect()
        };
        Ok(Self { name, values })
    }
}

/// One classified grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseCell {
    pub indices: Vec<usize>,
    pub axis_values: Vec<f64>,
    pub label: PhaseLabel,
    pub evidence: Evidence,
}

/// A classified grid. Cells are row-major with the last axis fastest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub base: DimerParams,
    pub axes: Vec<GridAxis>,
    pub strategy: Strategy,
    pub cells: Vec<PhaseCell>,
}

fn check_axes(axes: &[GridAxis]) -> Result<()> {
    if axes.is_empty() || axes.len() > 3 {
        return Err(DickeError::InvalidAxis(format!(
            "sweeps take 1 to 3 axes, got {}",
            axes.len()
        )));
    }
    for axis in axes {
        if axis.values.is_empty() {
            return Err(DickeError::InvalidAxis(format!(
                "axis {} has no grid points",
                axis.name
            )));
        }
    }
    Ok(())
}

fn cell_indices(axes: &[GridAxis], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; axes.len()];
    for d in (0..axes.len()).rev() {
        let n = axes[d].values.len();
        idx[d] = flat % n;
        flat /= n;
    }
    idx
}

fn classify_cell(
    base: &DimerParams,
    axes: &[GridAxis],
    strategy: &Strategy,
    flat: usize,
) -> PhaseCell {
    let indices = cell_indices(axes, flat);
    let mut params = *base;
    let mut axis_values = Vec::with_capacity(axes.len());
    for (axis, &i) in axes.iter().zip(indices.iter()) {
        axis.name.apply(&mut params, axis.values[i]);
        axis_values.push(axis.values[i]);
    }
    let (label, evidence) = match classify_phase(&params, strategy) {
        Ok(c) => (c.label, c.evidence),
        Err(e) => (
            PhaseLabel::Undetermined,
            Evidence {
                note: Some(format!("classification error: {e}")),
                ..Evidence::default()
            },
        ),
    };
    PhaseCell {
        indices,
        axis_values,
        label,
        evidence,
    }
}

/// Classifies every grid point sequentially.
pub fn sweep_grid_sequential(
    base: &DimerParams,
    axes: &[GridAxis],
    strategy: &Strategy,
) -> Result<PhaseDiagram> {
    check_axes(axes)?;
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let cells = (0..total)
        .map(|flat| classify_cell(base, axes, strategy, flat))
        .collect();
    Ok(PhaseDiagram {
        base: *base,
        axes: axes.to_vec(),
        strategy: *strategy,
        cells,
    })
}

/// Classifies every grid point, fanning cells out across the thread pool
/// when the `parallel` feature is on. Cell order and content are identical
/// to the sequential sweep.
pub fn sweep_grid(
    base: &DimerParams,
    axes: &[GridAxis],
    strategy: &Strategy,
) -> Result<PhaseDiagram> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        check_axes(axes)?;
        let total: usize = axes.iter().map(|a| a.values.len()).product();
        let cells = (0..total)
            .into_par_iter()
            .map(|flat| classify_cell(base, axes, strategy, flat))
            .collect();
        Ok(PhaseDiagram {
            base: *base,
            axes: axes.to_vec(),
            strategy: *strategy,
            cells,
        })
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_grid_sequential(base, axes, strategy)
    }
}

/// Bisects the scanned parameter until the Multistable/non-Multistable edge
/// is pinned to `resolution`. The bracket endpoints must disagree about
/// multistability.
pub fn multistable_boundary(
    base: &DimerParams,
    scan_axis: AxisName,
    bracket: (f64, f64),
    strategy: &Strategy,
    resolution: f64,
) -> Result<f64> {
    let label_at = |v: f64| -> Result<bool> {
        let mut params = *base;
        scan_axis.apply(&mut params, v);
        Ok(classify_phase(&params, strategy)?.label == PhaseLabel::Multistable)
    };
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) {
        return Err(DickeError::BracketError {
            label: format!("bracket [{lo}, {hi}] is not an increasing interval"),
        });
    }
    let lo_multi = label_at(lo)?;
    let hi_multi = label_at(hi)?;
    if lo_multi == hi_multi {
        return Err(DickeError::BracketError {
            label: format!(
                "both endpoints classify the same (multistable = {lo_multi}); nothing to bisect in [{lo}, {hi}]"
            ),
        });
    }
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if label_at(mid)? == lo_multi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
