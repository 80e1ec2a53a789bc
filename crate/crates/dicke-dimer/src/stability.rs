//! Linear stability of dimer fixed points and the analytic phase boundaries
//! that follow from it.
//!
//! The spin-norm conservation laws make two of the ten linearized directions
//! neutral, so stability is decided on the eight-dimensional reduced system
//! with each Z slaved to its sphere, dZ = -(X dX + Y dY)/Z. The reduced
//! Jacobian of a symmetric dimer at a symmetric or antisymmetric fixed point
//! has the mirror form [[A, B], [B, A]], which splits exactly into the
//! symmetric and antisymmetric perturbation blocks M_S = A + B and
//! M_A = A - B; their spectra together are the full spectrum.
//!
//! Two stability boundaries of the symmetric dimer have closed or
//! semi-closed forms. The normal phase loses stability to antisymmetric
//! photon fluctuations at
//!
//! ```text
//! J = (omega_c + kappa^2/omega_c)/2 - 2 lambda^2 / omega_a
//! ```
//!
//! and the symmetric superradiant branch destabilizes at the root of
//!
//! ```text
//! J = (omega_c + kappa^2/omega_c)/2 + 16 lambda^2 Z_s(J)^3 / omega_a
//! ```
//!
//! which this module brackets and bisects on (0, J_usp).

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};
use crate::model::{usp_threshold, CavityParams, DimerParams, DimerState};
use crate::steadystate::{srp_z, SrpSymmetry};

/// Spin-z magnitude below which the slaved elimination dZ = -(X dX + Y dY)/Z
/// is ill-conditioned and `jacobian` refuses to build the reduced matrix.
pub const Z_FLOOR: f64 = 1e-6;

/// Default half-width of the neutral band around Re = 0: eigenvalues with
/// |Re| inside it count as marginal rather than stable or unstable.
pub const DEFAULT_EPSILON_MARGIN: f64 = 1e-9;

/// Deterministic orthogonal basis scramble. The plain Francis sweep can cycle
/// without converging on the purely imaginary spectra that show up at
/// kappa = 0; a similarity transform breaks the structure that traps it while
/// preserving the spectrum to rounding error.
fn scrambling_rotation(n: usize, attempt: u32) -> DMatrix<f64> {
    let mut s = 0x9e37_79b9u32.wrapping_mul(attempt + 1);
    let a = DMatrix::from_fn(n, n, |_, _| {
        s = s.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
        (s >> 8) as f64 / (1u32 << 24) as f64 - 0.5
    });
    a.qr().q()
}

fn schur_eigs(m: &DMatrix<f64>, label: &str) -> Result<Vec<Complex64>> {
    let mut target = m.clone();
    let mut attempt = 0u32;
    let schur = loop {
        match Schur::try_new(target, f64::EPSILON, 100_000) {
            Some(schur) => break schur,
            None if attempt < 3 => {
                let q = scrambling_rotation(m.nrows(), attempt);
                target = q.transpose() * m * q;
                attempt += 1;
            }
            None => {
                return Err(DickeError::EigenSolverFailure {
                    matrix: label.to_string(),
                })
            }
        }
    };
    let mut eigs: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();
    eigs.sort_unstable_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    Ok(eigs)
}

fn cavity_block(c: &CavityParams, rg: f64, ig: f64, x: f64, y: f64, z: f64) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    a[0][0] = -c.kappa + 4.0 * c.chi * rg * ig;
    a[0][1] = c.omega_c + 2.0 * c.chi * (rg * rg + 3.0 * ig * ig);
    a[1][0] = -c.omega_c - 2.0 * c.chi * (3.0 * rg * rg + ig * ig);
    a[1][1] = -c.kappa - 4.0 * c.chi * rg * ig;
    a[1][2] = -2.0 * c.lambda;
    a[2][3] = -c.omega_a;
    a[3][0] = -4.0 * c.lambda * z;
    a[3][2] = c.omega_a + 4.0 * c.lambda * rg * x / z;
    a[3][3] = 4.0 * c.lambda * rg * y / z;
    a
}

/// Reduced 8x8 Jacobian at a state, variables (Re gamma, Im gamma, X, Y) per
/// cavity with Z slaved to the lower hemisphere of its sphere.
///
/// Errors with `NearSingularElimination` when either |Z_j| < `Z_FLOOR`; use
/// `stability_eigs`, which falls back to a tangent-space analysis of the full
/// ten-dimensional linearization in that regime.
pub fn jacobian(params: &DimerParams, state: &DimerState) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(8, 8);
    for j in 0..2 {
        let (c, s) = (params.cavity(j), state.cavity(j));
        if s.z.abs() < Z_FLOOR {
            return Err(DickeError::NearSingularElimination {
                cavity: j + 1,
                z_abs: s.z.abs(),
                z_floor: Z_FLOOR,
            });
        }
        let a = cavity_block(c, s.re_gamma, s.im_gamma, s.x, s.y, s.z);
        let o = 4 * j;
        for r in 0..4 {
            for q in 0..4 {
                m[(o + r, o + q)] = a[r][q];
            }
        }
        let other = 4 * (1 - j);
        m[(o + 1, other)] = -2.0 * params.hopping;
    }
    Ok(m)
}

/// Full 10x10 Jacobian with all state components independent. Always defined;
/// carries the two neutral spin-radial directions.
pub fn jacobian_full10(params: &DimerParams, state: &DimerState) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(10, 10);
    for j in 0..2 {
        let (c, s) = (params.cavity(j), state.cavity(j));
        let (rg, ig) = (s.re_gamma, s.im_gamma);
        let o = 5 * j;
        m[(o, o)] = -c.kappa + 4.0 * c.chi * rg * ig;
        m[(o, o + 1)] = c.omega_c + 2.0 * c.chi * (rg * rg + 3.0 * ig * ig);
        m[(o + 1, o)] = -c.omega_c - 2.0 * c.chi * (3.0 * rg * rg + ig * ig);
        m[(o + 1, o + 1)] = -c.kappa - 4.0 * c.chi * rg * ig;
        m[(o + 1, o + 2)] = -2.0 * c.lambda;
        m[(o + 2, o + 3)] = -c.omega_a;
        m[(o + 3, o)] = -4.0 * c.lambda * s.z;
        m[(o + 3, o + 2)] = c.omega_a;
        m[(o + 3, o + 4)] = -4.0 * c.lambda * rg;
        m[(o + 4, o)] = 4.0 * c.lambda * s.y;
        m[(o + 4, o + 3)] = 4.0 * c.lambda * rg;
        let other = 5 * (1 - j);
        m[(o + 1, other)] = -2.0 * params.hopping;
    }
    m
}

fn spin_tangent_basis(x: f64, y: f64, z: f64) -> ([f64; 3], [f64; 3]) {
    let n = [2.0 * x, 2.0 * y, 2.0 * z];
    let seed = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() <= n[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let t1r = cross(n, seed);
    let n1 = norm(t1r);
    let t1 = [t1r[0] / n1, t1r[1] / n1, t1r[2] / n1];
    let t2r = cross(n, t1);
    let n2 = norm(t2r);
    let t2 = [t2r[0] / n2, t2r[1] / n2, t2r[2] / n2];
    (t1, t2)
}

fn tangent_projected(params: &DimerParams, state: &DimerState) -> DMatrix<f64> {
    let j10 = jacobian_full10(params, state);
    let mut q = DMatrix::zeros(10, 8);
    for j in 0..2 {
        let s = state.cavity(j);
        let (ro, co) = (5 * j, 4 * j);
        q[(ro, co)] = 1.0;
        q[(ro + 1, co + 1)] = 1.0;
        let (t1, t2) = spin_tangent_basis(s.x, s.y, s.z);
        for k in 0..3 {
            q[(ro + 2 + k, co + 2)] = t1[k];
            q[(ro + 2 + k, co + 3)] = t2[k];
        }
    }
    q.transpose() * j10 * q
}

/// Linear stability verdict at a state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Reduced-system eigenvalues, sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    /// True when every eigenvalue satisfies Re < -epsilon_margin.
    pub stable: bool,
    /// True when the leading real part sits inside the neutral band
    /// |Re| <= epsilon_margin; such points are neither stable nor unstable
    /// at linear order.
    pub marginal: bool,
    /// Symmetric/antisymmetric block spectra, filled when the linearization
    /// has the mirror form.
    pub block_eigs: Option<BlockEigs>,
}

/// Spectra of the decoupled perturbation blocks of a mirror-symmetric
/// linearization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockEigs {
    pub symmetric: Vec<Complex64>,
    pub antisymmetric: Vec<Complex64>,
}

fn split_blocks(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let a1 = m.view((0, 0), (4, 4)).into_owned();
    let a2 = m.view((4, 4), (4, 4)).into_owned();
    let b12 = m.view((0, 4), (4, 4)).into_owned();
    let b21 = m.view((4, 0), (4, 4)).into_owned();
    let close = |p: &DMatrix<f64>, q: &DMatrix<f64>| (p - q).amax() < 1e-12;
    if close(&a1, &a2) && close(&b12, &b21) {
        Some((&a1 + &b12, &a1 - &b12))
    } else {
        None
    }
}

/// Splits the reduced Jacobian of a mirror-symmetric configuration into its
/// symmetric and antisymmetric perturbation blocks (M_S, M_A) = (A + B, A - B).
///
/// Errors when the linearization lacks the [[A, B], [B, A]] structure, which
/// happens for asymmetric parameters or states without the mirror pattern.
pub fn block_decompose(
    params: &DimerParams,
    state: &DimerState,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = jacobian(params, state)?;
    split_blocks(&m).ok_or_else(|| {
        DickeError::UnsupportedConfiguration(
            "block decomposition needs a mirror-symmetric linearization (identical cavities, symmetric or antisymmetric state)".into(),
        )
    })
}

/// Eigenvalues and stability verdict of the reduced linearization at a state.
///
/// Uses the slaved 8x8 Jacobian when both |Z_j| >= `Z_FLOOR`, otherwise
/// projects the full 10x10 linearization onto the spin-sphere tangent spaces;
/// the two agree in spectrum wherever both are defined. `epsilon_margin`
/// sets the neutral band: stable means max Re < -epsilon_margin, marginal
/// means |max Re| <= epsilon_margin.
pub fn stability_eigs(
    params: &DimerParams,
    state: &DimerState,
    epsilon_margin: f64,
) -> Result<StabilityReport> {
    let (m, block_eigs) = match jacobian(params, state) {
        Ok(m) => {
            let blocks = match split_blocks(&m) {
                Some((ms, ma)) => Some(BlockEigs {
                    symmetric: schur_eigs(&ms, "symmetric block")?,
                    antisymmetric: schur_eigs(&ma, "antisymmetric block")?,
                }),
                None => None,
            };
            (m, blocks)
        }
        Err(DickeError::NearSingularElimination { .. }) => {
            (tangent_projected(params, state), None)
        }
        Err(e) => return Err(e),
    };
    let eigenvalues = schur_eigs(&m, "reduced Jacobian")?;
    let max_real_part = eigenvalues[0].re;
    Ok(StabilityReport {
        stable: max_real_part < -epsilon_margin,
        marginal: max_real_part.abs() <= epsilon_margin,
        eigenvalues,
        max_real_part,
        block_eigs,
    })
}

/// Hopping strength where the normal phase hands stability to antisymmetric
/// photon fluctuations, J = (omega_c + kappa^2/omega_c)/2 - 2 lambda^2/omega_a.
///
/// Negative values mean the cavity is supercritical on its own and the normal
/// phase is unstable for every J >= 0.
pub fn np_asrp_boundary(cavity: &CavityParams) -> f64 {
    0.5 * (cavity.omega_c + cavity.kappa * cavity.kappa / cavity.omega_c)
        - 2.0 * cavity.lambda * cavity.lambda / cavity.omega_a
}

/// Hopping strength where the symmetric superradiant branch loses stability,
/// the smallest positive root of
/// J = (omega_c + kappa^2/omega_c)/2 + 16 lambda^2 Z_s(J)^3 / omega_a
/// on (0, J_usp). Errors with `NoBoundary` when no root exists there.
pub fn ssrp_boundary(cavity: &CavityParams) -> Result<f64> {
    if cavity.lambda == 0.0 {
        return Err(DickeError::NoBoundary { lo: 0.0, hi: 0.0 });
    }
    let j_usp = usp_threshold(cavity.omega_c, cavity.kappa);
    let pivot = 0.5 * (cavity.omega_c + cavity.kappa * cavity.kappa / cavity.omega_c);
    let g = |j: f64| {
        let z = srp_z(cavity, j, SrpSymmetry::Symmetric);
        j - pivot - 16.0 * cavity.lambda * cavity.lambda * z * z * z / cavity.omega_a
    };
    let lo_edge = 1e-12;
    let hi_edge = j_usp - 1e-12;
    let n = 4000;
    let mut prev_j = lo_edge;
    let mut prev_g = g(prev_j);
    for i in 1..=n {
        let j = lo_edge + (hi_edge - lo_edge) * i as f64 / n as f64;
        let gj = g(j);
        if prev_g == 0.0 {
            return Ok(prev_j);
        }
        if prev_g * gj < 0.0 {
            let (mut lo, mut hi) = (prev_j, j);
            let mut glo = prev_g;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-15 * mid.max(1.0) {
                    break;
                }
                let gm = g(mid);
                if gm == 0.0 {
                    return Ok(mid);
                }
                if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev_j = j;
        prev_g = gj;
    }
    Err(DickeError::NoBoundary {
        lo: lo_edge,
        hi: hi_edge,
    })
}
