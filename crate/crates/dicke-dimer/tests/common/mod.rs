//! Helpers shared by the integration test suites.

#![allow(dead_code)]

use dicke_dimer::model::{eom_rhs, DimerParams, DimerState};

pub fn unit_cavity(lambda: f64, kappa: f64) -> dicke_dimer::CavityParams {
    dicke_dimer::CavityParams {
        omega_c: 1.0,
        omega_a: 1.0,
        lambda,
        kappa,
        chi: 0.0,
    }
}

pub fn sym_params(lambda: f64, kappa: f64, hopping: f64) -> DimerParams {
    DimerParams::symmetric(unit_cavity(lambda, kappa), hopping).unwrap()
}

/// Reduced-coordinate indices [rg1, ig1, x1, y1, rg2, ig2, x2, y2] into the
/// 10-component state array.
pub const REDUCED: [usize; 8] = [0, 1, 2, 3, 5, 6, 7, 8];

/// Rebuilds a full state from reduced coordinates, slaving each Z onto the
/// spin sphere with the supplied hemisphere signs.
pub fn full_from_reduced(u: &[f64; 8], z_signs: (f64, f64)) -> [f64; 10] {
    let mut f = [0.0; 10];
    let signs = [z_signs.0, z_signs.1];
    for j in 0..2 {
        let (rg, ig, x, y) = (u[4 * j], u[4 * j + 1], u[4 * j + 2], u[4 * j + 3]);
        f[5 * j] = rg;
        f[5 * j + 1] = ig;
        f[5 * j + 2] = x;
        f[5 * j + 3] = y;
        f[5 * j + 4] = signs[j] * (0.25 - x * x - y * y).max(0.0).sqrt();
    }
    f
}

/// Central-difference Jacobian of the reduced dynamics, independent of the
/// library's analytic construction.
pub fn fd_jacobian(params: &DimerParams, state: &DimerState, h: f64) -> [[f64; 8]; 8] {
    let a = state.to_array();
    let u0 = [a[0], a[1], a[2], a[3], a[5], a[6], a[7], a[8]];
    let z_signs = (a[4].signum(), a[9].signum());
    let mut jac = [[0.0; 8]; 8];
    for col in 0..8 {
        let (mut up, mut dn) = (u0, u0);
        up[col] += h;
        dn[col] -= h;
        let fu = eom_rhs(
            params,
            &DimerState::from_array(&full_from_reduced(&up, z_signs)),
            params.hopping,
        )
        .unwrap();
        let fd = eom_rhs(
            params,
            &DimerState::from_array(&full_from_reduced(&dn, z_signs)),
            params.hopping,
        )
        .unwrap();
        for row in 0..8 {
            jac[row][col] = (fu[REDUCED[row]] - fd[REDUCED[row]]) / (2.0 * h);
        }
    }
    jac
}

/// Largest matched-pair distance between two spectra of equal length.
///
/// Pairs greedily by nearest neighbor rather than by lexicographic sort:
/// purely imaginary spectra (closed system) carry rounding noise in the real
/// parts, and sorting on that noise pairs unrelated eigenvalues.
pub fn spectrum_distance(
    a: Vec<num_complex::Complex64>,
    b: Vec<num_complex::Complex64>,
) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra have different sizes");
    let mut taken = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in &a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .expect("matching candidate left");
        taken[idx] = true;
        worst = worst.max(d);
    }
    worst
}
