//! Time-domain protocols on the dimer: plain integration under a hopping
//! schedule, sudden quenches with seeded starts, and slow atan-shaped ramps
//! that try to follow an instantaneous steady branch.
//!
//! The normal phase is an exact fixed point at every J, so a quench out of it
//! goes nowhere without a perturbation; protocols therefore seed the start by
//! `seed_eps` on Re(gamma) and X of each cavity (signs configurable, Z
//! re-slaved to the sphere), standing in for the quantum fluctuations the
//! mean-field equations drop. Divergence is declared when a photon amplitude
//! crosses `gamma_max`, which flags the unbounded region J > J_usp long
//! before overflow; steadiness is declared when the right-hand-side norm
//! stays below `steady_tol` for a full window of `steady_window` time units.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::model::{eom_rhs_raw, mean_field_energy, DimerParams, DimerState};
use crate::ode::{drive, SolverOpts, StopReason};
use crate::steadystate::{
    single_cavity_srp, solve_steady_numeric, symmetric_srp_solution, verify_same_phase,
    PhaseVerdict, SrpBranch, SrpSign, SrpSymmetry, DEFAULT_TOL_PHOTON,
};

/// Default quench horizon.
pub const DEFAULT_T_MAX: f64 = 5000.0;
/// Default ramp duration.
pub const DEFAULT_RAMP_T_F: f64 = 4000.0;
/// Default ramp steepness.
pub const DEFAULT_RAMP_K: f64 = 0.02;
/// Default magnitude of the symmetry-breaking seed perturbation.
pub const DEFAULT_SEED_EPS: f64 = 1e-6;
/// Default spacing of trajectory samples.
pub const DEFAULT_SAMPLE_DT: f64 = 1.0;

/// Hopping strength as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HoppingSchedule {
    Constant(f64),
    /// J_i before `t_switch`, J_f from it onward.
    Quench {
        j_initial: f64,
        j_final: f64,
        t_switch: f64,
    },
    /// J(t) = ((J_f - J_i)/pi) atan(k (t - t_f/2)) + (J_f + J_i)/2.
    AtanRamp {
        j_initial: f64,
        j_final: f64,
        k: f64,
        t_f: f64,
    },
}

impl HoppingSchedule {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            HoppingSchedule::Constant(j) => j,
            HoppingSchedule::Quench {
                j_initial,
                j_final,
                t_switch,
            } => {
                if t < t_switch {
                    j_initial
                } else {
                    j_final
                }
            }
            HoppingSchedule::AtanRamp {
                j_initial,
                j_final,
                k,
                t_f,
            } => {
                (j_final - j_initial) / std::f64::consts::PI * (k * (t - 0.5 * t_f)).atan()
                    + 0.5 * (j_final + j_initial)
            }
        }
    }

    /// The constant hopping value, when the schedule is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match *self {
            HoppingSchedule::Constant(j) => Some(j),
            _ => None,
        }
    }

    /// Soft diagnostics: an atan ramp with k t_f < 10 is far from adiabatic
    /// and its endpoints miss (J_i, J_f) noticeably.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let HoppingSchedule::AtanRamp {
            j_initial, k, t_f, ..
        } = *self
        {
            if k * t_f < 10.0 {
                out.push(format!(
                    "atan ramp with k*t_f = {:.3} < 10 is not adiabatic; J(0) = {:.6} vs j_initial = {:.6}",
                    k * t_f,
                    self.value(0.0),
                    j_initial
                ));
            }
        }
        out
    }
}

/// Sampled solution of one integration, with per-sample diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DimerState>,
    /// Hopping value at each sample.
    pub j_values: Vec<f64>,
    /// Spin-norm drift per cavity at each sample.
    pub norm_errs: Vec<(f64, f64)>,
    /// Mean-field energy per sample; present only for a closed system
    /// (kappa = 0) under constant hopping, where it is conserved.
    pub energy: Option<Vec<f64>>,
    pub outcome: StopReason,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DimerState {
        self.states.last().expect("trajectory holds >= 1 sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds >= 1 sample")
    }
}

/// Integrates the dimer from `state0` under a hopping schedule, sampling
/// every `sample_dt` plus the stopping point. The schedule supplies J(t);
/// the `hopping` field of `params` is ignored here.
///
/// `detect_steady` arms the quiet-window stop; divergence past
/// `opts.gamma_max` always stops the run.
pub fn integrate(
    params: &DimerParams,
    state0: &DimerState,
    schedule: &HoppingSchedule,
    t_span: (f64, f64),
    sample_dt: f64,
    opts: &SolverOpts,
    detect_steady: bool,
) -> Result<Trajectory> {
    params.validate()?;
    if !(sample_dt > 0.0) {
        return Err(DickeError::InvalidParams(format!(
            "sample_dt must be > 0, got {sample_dt}"
        )));
    }
    let (e1, e2) = state0.spin_norm_error();
    if e1 > 1e-10 || e2 > 1e-10 {
        return Err(DickeError::InvalidState(format!(
            "initial state violates the spin norms by ({e1:.3e}, {e2:.3e}), budget 1e-10"
        )));
    }
    let (t0, t_end) = t_span;
    let f = |t: f64, y: &[f64; 10]| eom_rhs_raw(params, y, schedule.value(t));

    let mut times = vec![t0];
    let mut states = vec![*state0];
    let mut next_sample = t0 + sample_dt;
    let mut quiet_since: Option<f64> = None;
    let gamma_max = opts.gamma_max;
    let (steady_tol, steady_window) = (opts.steady_tol, opts.steady_window);

    let outcome = drive(f, state0.to_array(), t0, t_end, opts, |seg, y_new, k_new| {
        while next_sample <= seg.t_end() {
            times.push(next_sample);
            states.push(DimerState::from_array(&seg.eval(next_sample)));
            next_sample += sample_dt;
        }
        let amp1 = (y_new[0] * y_new[0] + y_new[1] * y_new[1]).sqrt();
        let amp2 = (y_new[5] * y_new[5] + y_new[6] * y_new[6]).sqrt();
        let amp = amp1.max(amp2);
        if amp > gamma_max {
            return Some(StopReason::Diverged {
                t: seg.t_end(),
                amplitude: amp,
            });
        }
        if detect_steady {
            let norm = k_new.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < steady_tol {
                let since = *quiet_since.get_or_insert(seg.t_end());
                if seg.t_end() - since >= steady_window {
                    return Some(StopReason::SteadyReached { t: seg.t_end() });
                }
            } else {
                quiet_since = None;
            }
        }
        None
    })?;

    if outcome.t > *times.last().unwrap() + 1e-12 {
        times.push(outcome.t);
        states.push(DimerState::from_array(&outcome.y));
    }

    let j_values: Vec<f64> = times.iter().map(|&t| schedule.value(t)).collect();
    let norm_errs: Vec<(f64, f64)> = states.iter().map(|s| s.spin_norm_error()).collect();
    let closed = params.cavity1.kappa == 0.0 && params.cavity2.kappa == 0.0;
    let energy = match (closed, schedule.constant_value()) {
        (true, Some(j)) => {
            let p = params.with_hopping(j);
            Some(states.iter().map(|s| mean_field_energy(&p, s)).collect())
        }
        _ => None,
    };

    Ok(Trajectory {
        times,
        states,
        j_values,
        norm_errs,
        energy,
        outcome: outcome.reason,
        n_accepted: outcome.n_accepted,
        n_rejected: outcome.n_rejected,
    })
}

/// What one cavity is prepared in before a protocol starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CavityStart {
    Normal,
    Superradiant(SrpSign),
}

/// Start pattern of the dimer, one entry per cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartSpec {
    pub cavity1: CavityStart,
    pub cavity2: CavityStart,
}

impl StartSpec {
    pub fn normal() -> Self {
        Self {
            cavity1: CavityStart::Normal,
            cavity2: CavityStart::Normal,
        }
    }

    pub fn superradiant(s1: SrpSign, s2: SrpSign) -> Self {
        Self {
            cavity1: CavityStart::Superradiant(s1),
            cavity2: CavityStart::Superradiant(s2),
        }
    }
}

fn parse_cavity_start(tok: &str) -> Result<CavityStart> {
    match tok {
        "np" => Ok(CavityStart::Normal),
        "srp+" => Ok(CavityStart::Superradiant(SrpSign::Plus)),
        "srp-" => Ok(CavityStart::Superradiant(SrpSign::Minus)),
        _ => Err(DickeError::InvalidParams(format!(
            "unknown cavity start '{tok}' (expected np, srp+ or srp-)"
        ))),
    }
}

impl std::str::FromStr for StartSpec {
    type Err = DickeError;

    /// Accepts per-cavity forms like "np,srp+" and dimer shorthands
    /// np | ssrp+ | ssrp- | asrp+ | asrp-.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some((a, b)) = s.split_once(',') {
            return Ok(StartSpec {
                cavity1: parse_cavity_start(a.trim())?,
                cavity2: parse_cavity_start(b.trim())?,
            });
        }
        match s.as_str() {
            "np" => Ok(StartSpec::normal()),
            "ssrp+" => Ok(StartSpec::superradiant(SrpSign::Plus, SrpSign::Plus)),
            "ssrp-" => Ok(StartSpec::superradiant(SrpSign::Minus, SrpSign::Minus)),
            "asrp+" => Ok(StartSpec::superradiant(SrpSign::Plus, SrpSign::Minus)),
            "asrp-" => Ok(StartSpec::superradiant(SrpSign::Minus, SrpSign::Plus)),
            other => Err(DickeError::InvalidParams(format!(
                "unknown start spec '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for StartSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tok = |c: CavityStart| match c {
            CavityStart::Normal => "np",
            CavityStart::Superradiant(SrpSign::Plus) => "srp+",
            CavityStart::Superradiant(SrpSign::Minus) => "srp-",
        };
        write!(f, "{},{}", tok(self.cavity1), tok(self.cavity2))
    }
}

/// Builds the steady state selected by `start` at hopping `j_initial`.
///
/// At J = 0 each cavity is its own system and any mix of normal and
/// superradiant preparations is exact. At J > 0 only all-normal and
/// all-superradiant (identical cavities) patterns are steady states.
pub fn prepare_start(
    params: &DimerParams,
    j_initial: f64,
    start: &StartSpec,
) -> Result<DimerState> {
    use CavityStart::*;
    let p = params.with_hopping(j_initial);
    match (start.cavity1, start.cavity2) {
        (Normal, Normal) => Ok(crate::steadystate::np_solution(&p)),
        (Superradiant(s1), Superradiant(s2)) if j_initial > 0.0 => {
            let symmetry = if s1 == s2 {
                SrpSymmetry::Symmetric
            } else {
                SrpSymmetry::Antisymmetric
            };
            symmetric_srp_solution(&p, SrpBranch::new(symmetry, s1))
        }
        (c1, c2) if j_initial == 0.0 => {
            let build = |c: CavityStart, cavity| match c {
                Normal => Ok(crate::steadystate::np_solution(&p).cavity1),
                Superradiant(s) => single_cavity_srp(cavity, s),
            };
            Ok(DimerState {
                cavity1: build(c1, &p.cavity1)?,
                cavity2: build(c2, &p.cavity2)?,
            })
        }
        _ => Err(DickeError::UnsupportedConfiguration(
            "mixed normal/superradiant starts are steady states only at j_initial = 0".into(),
        )),
    }
}

/// Adds the symmetry-breaking seed: Re(gamma_j) += sign_j eps,
/// X_j -= sign_j eps (the spin tilt pairs opposite to the quadrature),
/// Z re-slaved so both spin norms hold to rounding error.
pub fn seed_state(state: &DimerState, seed_signs: (SrpSign, SrpSign), seed_eps: f64) -> DimerState {
    let mut a = state.to_array();
    for (j, sign) in [seed_signs.0, seed_signs.1].into_iter().enumerate() {
        let s = sign.as_f64();
        a[5 * j] += s * seed_eps;
        a[5 * j + 2] -= s * seed_eps;
        let (x, y) = (a[5 * j + 2], a[5 * j + 3]);
        let sq = (0.25 - x * x - y * y).max(0.0).sqrt();
        a[5 * j + 4] = if a[5 * j + 4] >= 0.0 { sq } else { -sq };
    }
    DimerState::from_array(&a)
}

/// A sudden hopping change: prepare at J_i, evolve at J_f.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub j_initial: f64,
    pub j_final: f64,
    pub start: StartSpec,
    pub seed_signs: (SrpSign, SrpSign),
    pub seed_eps: f64,
    pub t_max: f64,
    pub sample_dt: f64,
}

impl QuenchSpec {
    pub fn new(j_initial: f64, j_final: f64, start: StartSpec) -> Self {
        Self {
            j_initial,
            j_final,
            start,
            seed_signs: (SrpSign::Plus, SrpSign::Minus),
            seed_eps: DEFAULT_SEED_EPS,
            t_max: DEFAULT_T_MAX,
            sample_dt: DEFAULT_SAMPLE_DT,
        }
    }
}

/// How a quench ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuenchLabel {
    /// Steady detection fired; the verdict classifies the endpoint.
    Steady(PhaseVerdict),
    /// A photon amplitude crossed the divergence guard.
    Diverged,
    /// t_max passed without steadiness or divergence; verdict of the last
    /// state reported for orientation only.
    Undetermined(PhaseVerdict),
}

/// Quench outcome: the sampled relaxation, its endpoint, and the endpoint's
/// polished root when Newton converges from it.
#[derive(Debug, Clone)]
pub struct QuenchResult {
    pub trajectory: Trajectory,
    pub initial_state: DimerState,
    pub final_state: DimerState,
    pub label: QuenchLabel,
    pub polished: Option<DimerState>,
    /// Max-norm distance from the detected endpoint to its polished root.
    pub polish_shift: Option<f64>,
}

/// Prepares the `start` pattern at J_i, seeds it, and relaxes it at J_f
/// until steadiness, divergence, or `t_max`.
pub fn quench(params: &DimerParams, spec: &QuenchSpec, opts: &SolverOpts) -> Result<QuenchResult> {
    let prepared = prepare_start(params, spec.j_initial, &spec.start)?;
    let seeded = seed_state(&prepared, spec.seed_signs, spec.seed_eps);
    let schedule = HoppingSchedule::Constant(spec.j_final);
    let trajectory = integrate(
        params,
        &seeded,
        &schedule,
        (0.0, spec.t_max),
        spec.sample_dt,
        opts,
        true,
    )?;
    let final_state = *trajectory.final_state();
    let p_final = params.with_hopping(spec.j_final);
    let (label, polished, polish_shift) = match trajectory.outcome {
        StopReason::Diverged { .. } => (QuenchLabel::Diverged, None, None),
        reason => {
            let verdict = verify_same_phase(&final_state, DEFAULT_TOL_PHOTON);
            let label = match reason {
                StopReason::SteadyReached { .. } => QuenchLabel::Steady(verdict),
                _ => QuenchLabel::Undetermined(verdict),
            };
            match solve_steady_numeric(&p_final, &final_state, 1e-10) {
                Ok(root) => {
                    let shift = final_state.max_norm_distance(&root);
                    (label, Some(root), Some(shift))
                }
                Err(_) => (label, None, None),
            }
        }
    };
    Ok(QuenchResult {
        trajectory,
        initial_state: seeded,
        final_state,
        label,
        polished,
        polish_shift,
    })
}

/// A slow atan-shaped hopping ramp that should follow an instantaneous
/// steady branch.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RampSpec {
    pub j_initial: f64,
    pub j_final: f64,
    pub k: f64,
    pub t_f: f64,
    pub sample_dt: f64,
    /// Branch compared against at each sample; inferred from the start state
    /// when None (photon pattern if superradiant, antisymmetric for a normal
    /// start, which is the branch growing out of the normal phase here).
    pub track: Option<SrpSymmetry>,
}

impl RampSpec {
    pub fn new(j_initial: f64, j_final: f64) -> Self {
        Self {
            j_initial,
            j_final,
            k: DEFAULT_RAMP_K,
            t_f: DEFAULT_RAMP_T_F,
            sample_dt: DEFAULT_SAMPLE_DT,
            track: None,
        }
    }

    pub fn schedule(&self) -> HoppingSchedule {
        HoppingSchedule::AtanRamp {
            j_initial: self.j_initial,
            j_final: self.j_final,
            k: self.k,
            t_f: self.t_f,
        }
    }
}

/// Ramp outcome with per-sample distance to the tracked instantaneous branch.
#[derive(Debug, Clone)]
pub struct RampResult {
    pub trajectory: Trajectory,
    pub tracked: Option<SrpSymmetry>,
    /// Max-norm distance to the instantaneous branch, minimized over the
    /// total Z2 flip; NaN where the branch does not exist.
    pub tracking_abs: Vec<f64>,
    /// Same, divided by the max-norm of the instantaneous branch state.
    pub tracking_rel: Vec<f64>,
    pub sup_abs: f64,
    pub sup_rel: f64,
}

fn infer_tracked(state0: &DimerState, spec: &RampSpec) -> Option<SrpSymmetry> {
    if let Some(sym) = spec.track {
        return Some(sym);
    }
    let a1 = state0.cavity1.photon_amplitude();
    let a2 = state0.cavity2.photon_amplitude();
    if a1 >= DEFAULT_TOL_PHOTON && a2 >= DEFAULT_TOL_PHOTON {
        if state0.cavity1.re_gamma * state0.cavity2.re_gamma > 0.0 {
            Some(SrpSymmetry::Symmetric)
        } else {
            Some(SrpSymmetry::Antisymmetric)
        }
    } else {
        Some(SrpSymmetry::Antisymmetric)
    }
}

/// Integrates `state0` under the ramp schedule and measures how far the
/// trajectory strays from the instantaneous steady branch at J(t).
pub fn adiabatic_ramp(
    params: &DimerParams,
    state0: &DimerState,
    spec: &RampSpec,
    opts: &SolverOpts,
) -> Result<RampResult> {
    let schedule = spec.schedule();
    let trajectory = integrate(
        params,
        state0,
        &schedule,
        (0.0, spec.t_f),
        spec.sample_dt,
        opts,
        false,
    )?;
    let tracked = if params.identical_cavities() {
        infer_tracked(state0, spec)
    } else {
        None
    };

    let n = trajectory.len();
    let (mut tracking_abs, mut tracking_rel) = (vec![f64::NAN; n], vec![f64::NAN; n]);
    if let Some(symmetry) = tracked {
        let branch = SrpBranch::new(symmetry, SrpSign::Plus);
        for i in 0..n {
            let p = params.with_hopping(trajectory.j_values[i]);
            if let Ok(reference) = symmetric_srp_solution(&p, branch) {
                let d = trajectory.states[i].distance_mod_z2(&reference);
                let scale = reference
                    .to_array()
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()));
                tracking_abs[i] = d;
                tracking_rel[i] = d / scale;
            }
        }
    }
    let sup = |v: &[f64]| {
        v.iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(f64::NAN, f64::max)
    };
    Ok(RampResult {
        sup_abs: sup(&tracking_abs),
        sup_rel: sup(&tracking_rel),
        trajectory,
        tracked,
        tracking_abs,
        tracking_rel,
    })
}

/// Scans the trailing `window` of a trajectory; fires when every sample there
/// has a right-hand-side norm under `tol_ss`, returning the last state.
pub fn steady_state_detect(
    params: &DimerParams,
    traj: &Trajectory,
    window: f64,
    tol_ss: f64,
) -> Option<DimerState> {
    let t_last = *traj.times.last()?;
    let mut checked = 0;
    for i in (0..traj.len()).rev() {
        if t_last - traj.times[i] > window {
            break;
        }
        let rhs = eom_rhs_raw(params, &traj.states[i].to_array(), traj.j_values[i]);
        let norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm >= tol_ss {
            return None;
        }
        checked += 1;
    }
    (checked >= 2).then(|| *traj.states.last().unwrap())
}
