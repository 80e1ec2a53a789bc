//! Physical model of the Dicke dimer: two Dicke cavities exchanging photons.
//!
//! Each cavity holds a photon mode (frequency `omega_c`, decay `kappa`) coupled
//! with strength `lambda` to a collective spin of two-level atoms (transition
//! frequency `omega_a`). The cavities are joined by a photon-hopping term of
//! strength `J`. In the thermodynamic limit the dynamics close on ten mean-field
//! variables, five per cavity: the photon quadratures Re(gamma_j), Im(gamma_j)
//! (gamma_j is the photon amplitude per sqrt(N)) and the collective-spin
//! components X_j, Y_j, Z_j (spin per atom). The flow conserves each spin norm,
//! X_j^2 + Y_j^2 + Z_j^2 = 1/4.
//!
//! The equations of motion integrated here are
//!
//! ```text
//! d Re(g_j)/dt = -kappa_j Re(g_j) + omega_cj Im(g_j) + 2 chi_j |g_j|^2 Im(g_j)
//! d Im(g_j)/dt = -omega_cj Re(g_j) - kappa_j Im(g_j) - 2 J Re(g_{3-j})
//!                - 2 lambda_j X_j - 2 chi_j |g_j|^2 Re(g_j)
//! d X_j/dt     = -omega_aj Y_j
//! d Y_j/dt     =  omega_aj X_j - 4 lambda_j Z_j Re(g_j)
//! d Z_j/dt     =  4 lambda_j Y_j Re(g_j)
//! ```
//!
//! Kerr convention: `chi` is the thermodynamic-limit combination N*chi_bare of
//! the two-photon coefficient in chi_bare a^dag a^dag a a, so it stays finite as
//! N grows. Heisenberg evolution of <a_j> under that term gives the mean-field
//! contribution d gamma_j/dt = -2i chi |gamma_j|^2 gamma_j used above, and the
//! energy per atom acquires + chi |gamma_j|^4. With kappa = 0 the energy below
//! is an exact constant of the flow, Kerr term included.

use serde::{Deserialize, Serialize};

use crate::error::{DickeError, Result};

/// Physical constants of a single Dicke cavity. All rates share one frequency unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Cavity-mode frequency, > 0.
    pub omega_c: f64,
    /// Atomic transition frequency, > 0.
    pub omega_a: f64,
    /// Atom-cavity coupling, >= 0.
    pub lambda: f64,
    /// Cavity decay rate, >= 0.
    pub kappa: f64,
    /// Kerr coefficient in thermodynamic-limit normalization, default 0.
    #[serde(default)]
    pub chi: f64,
}

impl CavityParams {
    pub fn new(omega_c: f64, omega_a: f64, lambda: f64, kappa: f64, chi: f64) -> Result<Self> {
        let p = Self {
            omega_c,
            omega_a,
            lambda,
            kappa,
            chi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "omega_c must be > 0, got {}",
                self.omega_c
            )));
        }
        if !(self.omega_a > 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "omega_a must be > 0, got {}",
                self.omega_a
            )));
        }
        if !(self.lambda >= 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.kappa >= 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !self.chi.is_finite() {
            return Err(DickeError::InvalidParams(format!(
                "chi must be finite, got {}",
                self.chi
            )));
        }
        Ok(())
    }
}

/// Parameters of the coupled pair: two cavities plus the photon hopping J >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerParams {
    pub cavity1: CavityParams,
    pub cavity2: CavityParams,
    /// Photon hopping rate, real and >= 0 (J = 0 is the uncoupled limit).
    pub hopping: f64,
}

impl DimerParams {
    pub fn new(cavity1: CavityParams, cavity2: CavityParams, hopping: f64) -> Result<Self> {
        let p = Self {
            cavity1,
            cavity2,
            hopping,
        };
        p.validate()?;
        Ok(p)
    }

    /// Two identical cavities, the configuration with closed-form steady states.
    pub fn symmetric(cavity: CavityParams, hopping: f64) -> Result<Self> {
        Self::new(cavity, cavity, hopping)
    }

    pub fn validate(&self) -> Result<()> {
        self.cavity1.validate()?;
        self.cavity2.validate()?;
        if !(self.hopping >= 0.0) {
            return Err(DickeError::InvalidParams(format!(
                "hopping must be >= 0, got {}",
                self.hopping
            )));
        }
        Ok(())
    }

    /// True when the two cavities carry exactly the same constants.
    pub fn identical_cavities(&self) -> bool {
        self.cavity1 == self.cavity2
    }

    /// Copy of these parameters with the hopping replaced. Protocols that
    /// move J (quenches, ramps, scans) derive their working parameters here.
    pub fn with_hopping(mut self, hopping: f64) -> Self {
        self.hopping = hopping;
        self
    }

    pub fn cavity(&self, j: usize) -> &CavityParams {
        match j {
            0 => &self.cavity1,
            1 => &self.cavity2,
            _ => panic!("cavity index must be 0 or 1"),
        }
    }
}

/// Mean-field variables of one cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityState {
    pub re_gamma: f64,
    pub im_gamma: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CavityState {
    /// Photon amplitude |gamma|.
    pub fn photon_amplitude(&self) -> f64 {
        self.re_gamma.hypot(self.im_gamma)
    }

    /// |X^2 + Y^2 + Z^2 - 1/4|, the deviation from the spin conservation law.
    pub fn spin_norm_error(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z - 0.25).abs()
    }

    /// The Z2 image (gamma, X, Y) -> (-gamma, -X, -Y), Z fixed.
    pub fn z2_flip(&self) -> Self {
        Self {
            re_gamma: -self.re_gamma,
            im_gamma: -self.im_gamma,
            x: -self.x,
            y: -self.y,
            z: self.z,
        }
    }
}

/// Mean-field variables of the dimer. Component order in flat form is
/// `[re_g1, im_g1, x1, y1, z1, re_g2, im_g2, x2, y2, z2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerState {
    pub cavity1: CavityState,
    pub cavity2: CavityState,
}

/// Time derivative of the ten mean-field components, same ordering as
/// [`DimerState::to_array`].
pub type DimerStateDerivative = [f64; 10];

impl DimerState {
    pub fn to_array(&self) -> [f64; 10] {
        [
            self.cavity1.re_gamma,
            self.cavity1.im_gamma,
            self.cavity1.x,
            self.cavity1.y,
            self.cavity1.z,
            self.cavity2.re_gamma,
            self.cavity2.im_gamma,
            self.cavity2.x,
            self.cavity2.y,
            self.cavity2.z,
        ]
    }

    pub fn from_array(a: &[f64; 10]) -> Self {
        Self {
            cavity1: CavityState {
                re_gamma: a[0],
                im_gamma: a[1],
                x: a[2],
                y: a[3],
                z: a[4],
            },
            cavity2: CavityState {
                re_gamma: a[5],
                im_gamma: a[6],
                x: a[7],
                y: a[8],
                z: a[9],
            },
        }
    }

    pub fn cavity(&self, j: usize) -> &CavityState {
        match j {
            0 => &self.cavity1,
            1 => &self.cavity2,
            _ => panic!("cavity index must be 0 or 1"),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Total Z2 flip: (gamma_j, X_j, Y_j) -> -(gamma_j, X_j, Y_j) in both cavities.
    pub fn total_z2_flip(&self) -> Self {
        Self {
            cavity1: self.cavity1.z2_flip(),
            cavity2: self.cavity2.z2_flip(),
        }
    }

    /// Max-norm distance between two states.
    pub fn max_norm_distance(&self, other: &Self) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Max-norm distance after optimally applying the total Z2 flip to `other`.
    pub fn distance_mod_z2(&self, other: &Self) -> f64 {
        self.max_norm_distance(other)
            .min(self.max_norm_distance(&other.total_z2_flip()))
    }

    /// Per-cavity deviations from the spin conservation law.
    pub fn spin_norm_error(&self) -> (f64, f64) {
        (
            self.cavity1.spin_norm_error(),
            self.cavity2.spin_norm_error(),
        )
    }
}

/// Per-cavity |X^2 + Y^2 + Z^2 - 1/4| as a pair.
pub fn spin_norm_error(state: &DimerState) -> (f64, f64) {
    state.spin_norm_error()
}

pub(crate) fn eom_rhs_raw(params: &DimerParams, y: &[f64; 10], j_now: f64) -> [f64; 10] {
    let mut out = [0.0; 10];
    for j in 0..2 {
        let c = params.cavity(j);
        let o = 5 * j;
        let oo = 5 * (1 - j);
        let (rg, ig, x, yy, z) = (y[o], y[o + 1], y[o + 2], y[o + 3], y[o + 4]);
        let rg_other = y[oo];
        let g2 = rg * rg + ig * ig;
        out[o] = -c.kappa * rg + c.omega_c * ig + 2.0 * c.chi * g2 * ig;
        out[o + 1] = -c.omega_c * rg
            - c.kappa * ig
            - 2.0 * j_now * rg_other
            - 2.0 * c.lambda * x
            - 2.0 * c.chi * g2 * rg;
        out[o + 2] = -c.omega_a * yy;
        out[o + 3] = c.omega_a * x - 4.0 * c.lambda * z * rg;
        out[o + 4] = 4.0 * c.lambda * yy * rg;
    }
    out
}

/// Right-hand side of the mean-field equations of motion.
///
/// `j_now` overrides `params.hopping` so time-dependent hopping schedules can
/// reuse the same function.
pub fn eom_rhs(
    params: &DimerParams,
    state: &DimerState,
    j_now: f64,
) -> Result<DimerStateDerivative> {
    if !state.is_finite() {
        return Err(DickeError::InvalidState(
            "state contains non-finite components".into(),
        ));
    }
    Ok(eom_rhs_raw(params, &state.to_array(), j_now))
}

/// Critical atom-cavity coupling of a single cavity,
/// lambda_c = (1/2) sqrt(omega_a (omega_c + kappa^2/omega_c)).
pub fn critical_coupling(cavity: &CavityParams) -> f64 {
    0.5 * (cavity.omega_a * (cavity.omega_c + cavity.kappa * cavity.kappa / cavity.omega_c)).sqrt()
}

/// Critical photon hopping for the NP -> SRP transition with both cavities
/// subcritical: J_c = 2 sqrt((lambda_c1^2 - lambda_1^2)(lambda_c2^2 - lambda_2^2)
/// / (omega_a1 omega_a2)).
///
/// When either cavity is supercritical no threshold exists (the dimer is
/// superradiant for any J > 0) and an error says so.
pub fn critical_hopping(params: &DimerParams) -> Result<f64> {
    let mut factors = [0.0; 2];
    for j in 0..2 {
        let c = params.cavity(j);
        let lc = critical_coupling(c);
        let f = lc * lc - c.lambda * c.lambda;
        if f < 0.0 {
            return Err(DickeError::NoHoppingThreshold { cavity: j + 1 });
        }
        factors[j] = f;
    }
    Ok(2.0 * (factors[0] * factors[1] / (params.cavity1.omega_a * params.cavity2.omega_a)).sqrt())
}

/// Mean-field energy per atom,
/// E = sum_j [omega_cj |gamma_j|^2 + omega_aj Z_j + 4 lambda_j X_j Re(gamma_j)
///            + chi_j |gamma_j|^4] + 4 J Re(gamma_1) Re(gamma_2).
///
/// An exact constant of the flow when kappa_1 = kappa_2 = 0 and J is constant.
pub fn mean_field_energy(params: &DimerParams, state: &DimerState) -> f64 {
    let mut e = 4.0 * params.hopping * state.cavity1.re_gamma * state.cavity2.re_gamma;
    for j in 0..2 {
        let c = params.cavity(j);
        let s = state.cavity(j);
        let g2 = s.re_gamma * s.re_gamma + s.im_gamma * s.im_gamma;
        e += c.omega_c * g2 + c.omega_a * s.z + 4.0 * c.lambda * s.x * s.re_gamma + c.chi * g2 * g2;
    }
    e
}

/// Bogoliubov photon branch energies of the empty coupled cavities, plus the
/// decay-corrected hopping threshold of the unstable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonBranches {
    /// sqrt(omega_c (omega_c + 2J)).
    pub e_plus: num_complex::Complex64,
    /// sqrt(omega_c (omega_c - 2J)); imaginary when J > omega_c / 2.
    pub e_minus: num_complex::Complex64,
    /// J_usp = (omega_c^2 + kappa^2) / (2 omega_c): beyond it the linearized
    /// model is unbounded and trajectories diverge unless chi > 0.
    pub j_usp: f64,
}

/// Photon branch energies sqrt(omega_c (omega_c +- 2J)) of the symmetric
/// photon sector. Requires omega_c1 = omega_c2.
pub fn photon_branch_energies(params: &DimerParams) -> Result<PhotonBranches> {
    if params.cavity1.omega_c != params.cavity2.omega_c {
        return Err(DickeError::UnsupportedConfiguration(format!(
            "photon branches assume omega_c1 = omega_c2, got {} and {}",
            params.cavity1.omega_c, params.cavity2.omega_c
        )));
    }
    let wc = params.cavity1.omega_c;
    let j = params.hopping;
    let plus = num_complex::Complex64::new(wc * (wc + 2.0 * j), 0.0).sqrt();
    let minus = num_complex::Complex64::new(wc * (wc - 2.0 * j), 0.0).sqrt();
    Ok(PhotonBranches {
        e_plus: plus,
        e_minus: minus,
        j_usp: usp_threshold(wc, params.cavity1.kappa.max(params.cavity2.kappa)),
    })
}

/// Hopping threshold of the unstable region, (omega_c^2 + kappa^2) / (2 omega_c).
pub fn usp_threshold(omega_c: f64, kappa: f64) -> f64 {
    (omega_c * omega_c + kappa * kappa) / (2.0 * omega_c)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit_cavity(lambda: f64, kappa: f64) -> CavityParams {
        CavityParams {
            omega_c: 1.0,
            omega_a: 1.0,
            lambda,
            kappa,
            chi: 0.0,
        }
    }

    #[test]
    fn np_is_a_fixed_point() {
        let params = DimerParams::symmetric(unit_cavity(0.9, 0.3), 0.3).unwrap();
        let np = DimerState::from_array(&[0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5]);
        let rhs = eom_rhs(&params, &np, params.hopping).unwrap();
        assert!(rhs.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rhs_matches_hand_evaluation() {
        // gamma_1 = (1, 0), gamma_2 = 0, spins at the south pole, lambda = 0,
        // kappa = 0, omega = 1, J = 0.1.
        let params = DimerParams::symmetric(unit_cavity(0.0, 0.0), 0.1).unwrap();
        let state = DimerState::from_array(&[1.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5]);
        let rhs = eom_rhs(&params, &state, 0.1).unwrap();
        assert_eq!(rhs[1], -1.0); // d Im(g1)/dt = -omega_c Re(g1)
        assert_eq!(rhs[6], -0.2); // d Im(g2)/dt = -2 J Re(g1)
        assert_eq!(rhs[0], 0.0);
        assert_eq!(rhs[5], 0.0);
    }

    #[test]
    fn rhs_rejects_non_finite_state() {
        let params = DimerParams::symmetric(unit_cavity(0.5, 0.2), 0.1).unwrap();
        let mut a = [0.0; 10];
        a[4] = -0.5;
        a[9] = -0.5;
        a[0] = f64::NAN;
        let state = DimerState::from_array(&a);
        assert!(matches!(
            eom_rhs(&params, &state, 0.1),
            Err(DickeError::InvalidState(_))
        ));
    }

    #[test]
    fn critical_coupling_values() {
        assert_eq!(critical_coupling(&unit_cavity(0.0, 0.0)), 0.5);
        assert!((critical_coupling(&unit_cavity(0.0, 0.2)) - 0.509_901_951_359_278_45).abs() < 1e-15);
        let c = CavityParams {
            omega_c: 1.0,
            omega_a: 2.0,
            lambda: 0.0,
            kappa: 0.0,
            chi: 0.0,
        };
        assert!((critical_coupling(&c) - 0.707_106_781_186_547_6).abs() < 1e-15);
    }

    #[test]
    fn critical_hopping_values() {
        // Boundary degeneracy: lambda_1 = lambda_c1 exactly.
        let lc = critical_coupling(&unit_cavity(0.0, 0.2));
        let p = DimerParams::new(unit_cavity(lc, 0.2), unit_cavity(0.3, 0.2), 0.0).unwrap();
        assert_eq!(critical_hopping(&p).unwrap(), 0.0);

        let p = DimerParams::symmetric(unit_cavity(0.0, 0.2), 0.0).unwrap();
        assert!((critical_hopping(&p).unwrap() - 0.52).abs() < 1e-15);

        let p = DimerParams::new(unit_cavity(0.25, 0.2), unit_cavity(0.35, 0.2), 0.0).unwrap();
        assert!((critical_hopping(&p).unwrap() - 0.329_583_069_953_54).abs() < 1e-12);

        let p = DimerParams::new(unit_cavity(0.8, 0.2), unit_cavity(0.3, 0.2), 0.0).unwrap();
        assert!(matches!(
            critical_hopping(&p),
            Err(DickeError::NoHoppingThreshold { cavity: 1 })
        ));
    }

    #[test]
    fn np_energy_is_minus_omega_a() {
        let params = DimerParams::symmetric(unit_cavity(0.7, 0.2), 0.25).unwrap();
        let np = DimerState::from_array(&[0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5]);
        assert_eq!(mean_field_energy(&params, &np), -1.0);
    }

    #[test]
    fn photon_branches() {
        let p = DimerParams::symmetric(unit_cavity(0.0, 0.0), 0.0).unwrap();
        let b = photon_branch_energies(&p).unwrap();
        assert_eq!(b.e_plus.re, 1.0);
        assert_eq!(b.e_minus.re, 1.0);

        let p = DimerParams::symmetric(unit_cavity(0.0, 0.2), 0.4).unwrap();
        let b = photon_branch_energies(&p).unwrap();
        assert!((b.e_plus.re - 1.8f64.sqrt()).abs() < 1e-15);
        assert!((b.e_minus.re - 0.2f64.sqrt()).abs() < 1e-15);
        assert!((b.j_usp - 0.52).abs() < 1e-15);

        let p = DimerParams::symmetric(unit_cavity(0.0, 0.0), 0.6).unwrap();
        let b = photon_branch_energies(&p).unwrap();
        assert_eq!(b.e_minus.re, 0.0);
        assert!(b.e_minus.im > 0.0);

        let mut asym = p;
        asym.cavity2.omega_c = 1.1;
        assert!(matches!(
            photon_branch_energies(&asym),
            Err(DickeError::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn spin_norm_error_examples() {
        let south = DimerState::from_array(&[0.0, 0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, -0.5]);
        assert_eq!(spin_norm_error(&south), (0.0, 0.0));

        let on_sphere =
            DimerState::from_array(&[0.0, 0.0, 0.3, 0.0, -0.4, 0.0, 0.0, 0.3, 0.1, -0.4]);
        let (e1, e2) = spin_norm_error(&on_sphere);
        assert!(e1 < 1e-16);
        assert!((e2 - 0.01).abs() < 1e-15);
    }

    #[test]
    fn total_z2_flip_is_an_involution_and_rhs_equivariant() {
        let params = DimerParams::symmetric(unit_cavity(0.8, 0.2), 0.3).unwrap();
        let state = DimerState::from_array(&[
            0.31, -0.12, 0.21, -0.05, -0.447_213_595_499_958, -0.44, 0.09, -0.17, 0.11,
            -0.431_277_173_017_721_4,
        ]);
        assert_eq!(state.total_z2_flip().total_z2_flip(), state);

        // The sign flip commutes with the flow exactly, even in floating point.
        let rhs = eom_rhs(&params, &state, 0.3).unwrap();
        let rhs_flipped = eom_rhs(&params, &state.total_z2_flip(), 0.3).unwrap();
        for i in 0..10 {
            let sign = if i % 5 == 4 { 1.0 } else { -1.0 };
            assert_eq!(rhs_flipped[i], sign * rhs[i]);
        }
    }

    #[test]
    fn distance_mod_z2_identifies_partners() {
        let s = DimerState::from_array(&[1.0, 0.2, 0.3, 0.0, -0.37, -0.9, 0.1, -0.25, 0.0, -0.4]);
        assert_eq!(s.distance_mod_z2(&s.total_z2_flip()), 0.0);
        assert!(s.max_norm_distance(&s.total_z2_flip()) > 1.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(CavityParams::new(0.0, 1.0, 0.5, 0.2, 0.0).is_err());
        assert!(CavityParams::new(1.0, -1.0, 0.5, 0.2, 0.0).is_err());
        assert!(CavityParams::new(1.0, 1.0, -0.5, 0.2, 0.0).is_err());
        assert!(CavityParams::new(1.0, 1.0, 0.5, -0.2, 0.0).is_err());
        let c = unit_cavity(0.5, 0.2);
        assert!(DimerParams::new(c, c, -0.1).is_err());
    }
}
