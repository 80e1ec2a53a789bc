//! Steady states of the dimer: the trivial normal phase (NP), the closed-form
//! superradiant family for identical cavities, and Newton continuation for
//! everything else.
//!
//! For identical cavities the superradiant steady states come in two photon
//! patterns, symmetric (SSRP, gamma_1 = gamma_2) and antisymmetric (ASRP,
//! gamma_1 = -gamma_2), each a Z2-degenerate pair. Their spin-z value is
//!
//! ```text
//! Z_{s,a} = -(omega_a / (8 lambda^2)) (omega_c + kappa^2/omega_c +- 2J)
//! ```
//!
//! (upper sign symmetric), and the branch exists when 0 < |Z| < 1/2. The full
//! state follows from the conservation law with r = sqrt(1/(4Z^2) - 1):
//! Re(gamma) = s (omega_a / 4 lambda) r, Im(gamma) = kappa Re(gamma) / omega_c,
//! X = s Z r, Y = 0, with s the Z2 sign. With Z < 0 this pairs the spin tilt
//! opposite to the photon quadrature, X Re(gamma) < 0; the three other sign
//! pairings are not fixed points.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::model::{eom_rhs_raw, CavityParams, CavityState, DimerParams, DimerState};
use crate::stability;

/// Default residual tolerance of the Newton steady-state solver.
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
/// Newton iteration cap.
pub const NEWTON_MAX_ITER: usize = 100;
/// Default photon-amplitude threshold separating NP from SRP endpoints.
pub const DEFAULT_TOL_PHOTON: f64 = 1e-3;

/// Photon pattern of a superradiant branch for identical cavities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SrpSymmetry {
    /// gamma_1 = gamma_2
    Symmetric,
    /// gamma_1 = -gamma_2
    Antisymmetric,
}

/// Which member of the Z2-degenerate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SrpSign {
    Plus,
    Minus,
}

impl SrpSign {
    pub fn as_f64(self) -> f64 {
        match self {
            SrpSign::Plus => 1.0,
            SrpSign::Minus => -1.0,
        }
    }
}

/// A superradiant branch: photon pattern plus Z2 sign. The two signs of a
/// branch map onto each other under the total Z2 flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrpBranch {
    pub symmetry: SrpSymmetry,
    pub sign: SrpSign,
}

impl SrpBranch {
    pub fn new(symmetry: SrpSymmetry, sign: SrpSign) -> Self {
        Self { symmetry, sign }
    }

    /// All four branch/sign combinations.
    pub fn all() -> [SrpBranch; 4] {
        [
            SrpBranch::new(SrpSymmetry::Symmetric, SrpSign::Plus),
            SrpBranch::new(SrpSymmetry::Symmetric, SrpSign::Minus),
            SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus),
            SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Minus),
        ]
    }
}

impl std::fmt::Display for SrpBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self.symmetry {
            SrpSymmetry::Symmetric => "SSRP",
            SrpSymmetry::Antisymmetric => "ASRP",
        };
        let sign = match self.sign {
            SrpSign::Plus => "+",
            SrpSign::Minus => "-",
        };
        write!(f, "{name}{sign}")
    }
}

/// The normal-phase steady state: dark cavities, spins at the south pole.
/// An exact fixed point for any parameters.
pub fn np_solution(_params: &DimerParams) -> DimerState {
    let south = CavityState {
        re_gamma: 0.0,
        im_gamma: 0.0,
        x: 0.0,
        y: 0.0,
        z: -0.5,
    };
    DimerState {
        cavity1: south,
        cavity2: south,
    }
}

/// Steady spin-z of a superradiant branch; the branch exists when 0 < |Z| < 1/2.
pub fn srp_z(cavity: &CavityParams, hopping: f64, symmetry: SrpSymmetry) -> f64 {
    let pm = match symmetry {
        SrpSymmetry::Symmetric => 1.0,
        SrpSymmetry::Antisymmetric => -1.0,
    };
    let eff = cavity.omega_c + cavity.kappa * cavity.kappa / cavity.omega_c + pm * 2.0 * hopping;
    -(cavity.omega_a / (8.0 * cavity.lambda * cavity.lambda)) * eff
}

fn srp_cavity_state(cavity: &CavityParams, z: f64, sign: f64) -> CavityState {
    let r = (1.0 / (4.0 * z * z) - 1.0).sqrt();
    let re_gamma = sign * (cavity.omega_a / (4.0 * cavity.lambda)) * r;
    CavityState {
        re_gamma,
        im_gamma: cavity.kappa * re_gamma / cavity.omega_c,
        x: sign * z * r,
        y: 0.0,
        z,
    }
}

/// Closed-form superradiant steady state of the identical-cavity dimer.
///
/// Errors when the cavities differ or when the branch does not exist at these
/// parameters (|Z| >= 1/2 puts the branch in its normal region; Z = 0 is the
/// singular amplitude limit reached at kappa = 0, J = omega_c/2).
pub fn symmetric_srp_solution(params: &DimerParams, branch: SrpBranch) -> Result<DimerState> {
    if !params.identical_cavities() {
        return Err(DickeError::UnsupportedConfiguration(
            "closed-form SRP solutions require identical cavities; use solve_steady_numeric"
                .into(),
        ));
    }
    let c = &params.cavity1;
    if c.lambda == 0.0 {
        return Err(DickeError::NonexistentBranch(
            "superradiant branches need lambda > 0".into(),
        ));
    }
    let z = srp_z(c, params.hopping, branch.symmetry);
    if !(z.abs() < 0.5) || z == 0.0 {
        return Err(DickeError::NonexistentBranch(format!(
            "{branch} has Z^e = {z:.6}, outside (0 < |Z| < 1/2); parameters lie in the normal region of this branch"
        )));
    }
    let s = branch.sign.as_f64();
    let cav1 = srp_cavity_state(c, z, s);
    let cav2 = match branch.symmetry {
        SrpSymmetry::Symmetric => cav1,
        SrpSymmetry::Antisymmetric => CavityState {
            re_gamma: -cav1.re_gamma,
            im_gamma: -cav1.im_gamma,
            x: -cav1.x,
            y: 0.0,
            z: cav1.z,
        },
    };
    Ok(DimerState {
        cavity1: cav1,
        cavity2: cav2,
    })
}

/// Single-cavity superradiant steady state at J = 0 (each cavity its own Dicke
/// system). Exists when the cavity is supercritical, lambda > lambda_c.
pub fn single_cavity_srp(cavity: &CavityParams, sign: SrpSign) -> Result<CavityState> {
    if cavity.lambda == 0.0 {
        return Err(DickeError::NonexistentBranch(
            "superradiant branches need lambda > 0".into(),
        ));
    }
    let z = srp_z(cavity, 0.0, SrpSymmetry::Symmetric);
    if !(z.abs() < 0.5) || z == 0.0 {
        return Err(DickeError::NonexistentBranch(format!(
            "single-cavity SRP has Z^e = {z:.6}, outside (0 < |Z| < 1/2); cavity is subcritical"
        )));
    }
    Ok(srp_cavity_state(cavity, z, sign.as_f64()))
}

/// Euclidean norm of the equations-of-motion right-hand side at a state.
pub fn residual_norm(params: &DimerParams, state: &DimerState) -> f64 {
    let rhs = eom_rhs_raw(params, &state.to_array(), params.hopping);
    rhs.iter().map(|v| v * v).sum::<f64>().sqrt()
}

const REDUCED_IDX: [usize; 8] = [0, 1, 2, 3, 5, 6, 7, 8];

fn reduced_to_full(u: &[f64; 8]) -> Result<[f64; 10]> {
    let mut full = [0.0; 10];
    for j in 0..2 {
        let (rg, ig, x, y) = (u[4 * j], u[4 * j + 1], u[4 * j + 2], u[4 * j + 3]);
        let sq = 0.25 - x * x - y * y;
        if sq <= 0.0 {
            return Err(DickeError::ConstraintViolation(format!(
                "X^2 + Y^2 = {:.6} >= 1/4 in cavity {}; the spin left the lower hemisphere",
                x * x + y * y,
                j + 1
            )));
        }
        full[5 * j] = rg;
        full[5 * j + 1] = ig;
        full[5 * j + 2] = x;
        full[5 * j + 3] = y;
        full[5 * j + 4] = -sq.sqrt();
    }
    Ok(full)
}

fn reduced_residual(params: &DimerParams, u: &[f64; 8]) -> Result<([f64; 8], [f64; 10])> {
    let full = reduced_to_full(u)?;
    let rhs = eom_rhs_raw(params, &full, params.hopping);
    let mut r = [0.0; 8];
    for (k, &i) in REDUCED_IDX.iter().enumerate() {
        r[k] = rhs[i];
    }
    Ok((r, full))
}

fn norm8(r: &[f64; 8]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Newton root of the steady-state equations from a starting guess.
///
/// The solve runs on the eight independent variables (Re gamma, Im gamma, X, Y
/// per cavity) with each Z slaved to the lower spin hemisphere,
/// Z = -sqrt(1/4 - X^2 - Y^2); the guess's Z components are replaced by the
/// slaved values, so the returned state satisfies the spin norms exactly.
/// Damped steps (Armijo backtracking) keep the residual decreasing.
pub fn solve_steady_numeric(
    params: &DimerParams,
    guess: &DimerState,
    tol: f64,
) -> Result<DimerState> {
    if !guess.is_finite() {
        return Err(DickeError::InvalidState(
            "guess contains non-finite components".into(),
        ));
    }
    let ga = guess.to_array();
    let mut u = [0.0; 8];
    for (k, &i) in REDUCED_IDX.iter().enumerate() {
        u[k] = ga[i];
    }

    let mut residual = f64::INFINITY;
    for _ in 0..NEWTON_MAX_ITER {
        let (r, full) = reduced_residual(params, &u)?;
        residual = norm8(&r);
        if residual < tol {
            return Ok(DimerState::from_array(&full));
        }
        let state = DimerState::from_array(&full);
        let m = stability::jacobian(params, &state)?;
        let rhs_vec = nalgebra::DVector::from_iterator(8, r.iter().map(|v| -v));
        let delta = m
            .lu()
            .solve(&rhs_vec)
            .ok_or_else(|| DickeError::ConvergenceFailed {
                iterations: NEWTON_MAX_ITER,
                residual,
            })?;

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = u;
            for k in 0..8 {
                trial[k] += alpha * delta[k];
            }
            if let Ok((rt, _)) = reduced_residual(params, &trial) {
                if norm8(&rt) < (1.0 - 1e-4 * alpha) * residual {
                    u = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(DickeError::ConvergenceFailed {
                iterations: NEWTON_MAX_ITER,
                residual,
            });
        }
    }
    Err(DickeError::ConvergenceFailed {
        iterations: NEWTON_MAX_ITER,
        residual,
    })
}

/// Phase verdict of a converged steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseVerdict {
    BothNormal,
    BothSuperradiant,
    /// One cavity superradiant while the other is dark. Never observed for a
    /// genuine steady state with J > 0; indicates a bug or a non-steady input.
    Mixed,
}

/// Classifies a steady state by its photon amplitudes against `tol_photon`.
pub fn verify_same_phase(state: &DimerState, tol_photon: f64) -> PhaseVerdict {
    let a1 = state.cavity1.photon_amplitude() >= tol_photon;
    let a2 = state.cavity2.photon_amplitude() >= tol_photon;
    match (a1, a2) {
        (false, false) => PhaseVerdict::BothNormal,
        (true, true) => PhaseVerdict::BothSuperradiant,
        _ => PhaseVerdict::Mixed,
    }
}
