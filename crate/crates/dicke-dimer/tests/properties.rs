//! Property-based checks of the model's structural guarantees: conservation
//! laws, symmetry equivariance, closed-form identities, linearization
//! consistency, and the qualitative facts the phase structure rests on
//! (same-phase locking, dissipative branch selection, supercritical
//! threshold loss).

mod common;

use common::{fd_jacobian, sym_params, unit_cavity};
use proptest::prelude::*;

use dicke_dimer::dynamics::{
    integrate, quench, HoppingSchedule, QuenchLabel, QuenchSpec, StartSpec,
};
use dicke_dimer::model::{
    critical_coupling, critical_hopping, eom_rhs, CavityParams, DimerParams,
    DimerState,
};
use dicke_dimer::ode::SolverOpts;
use dicke_dimer::phasemap::{
    classify_phase, sweep_grid, sweep_grid_sequential, AxisName, GridAxis, PhaseLabel,
    Strategy as PhaseStrategy,
};
use dicke_dimer::stability::{
    jacobian_full10, np_asrp_boundary, stability_eigs, DEFAULT_EPSILON_MARGIN,
};
use dicke_dimer::steadystate::{
    np_solution, residual_norm, solve_steady_numeric, symmetric_srp_solution, verify_same_phase,
    PhaseVerdict, SrpBranch, SrpSign, SrpSymmetry,
};
use dicke_dimer::{export, DickeError};

fn arb_cavity() -> impl Strategy<Value = CavityParams> {
    (
        0.8f64..1.2,
        0.8f64..1.3,
        0.0f64..1.2,
        0.0f64..0.5,
        0.0f64..0.05,
    )
        .prop_map(|(omega_c, omega_a, lambda, kappa, chi)| CavityParams {
            omega_c,
            omega_a,
            lambda,
            kappa,
            chi,
        })
}

fn arb_params() -> impl Strategy<Value = DimerParams> {
    (arb_cavity(), arb_cavity(), 0.0f64..0.45)
        .prop_map(|(c1, c2, hopping)| DimerParams::new(c1, c2, hopping).unwrap())
}

/// Spin on the sphere of radius 1/2, kept away from the equator so the
/// slaved linearization applies.
fn arb_spin() -> impl Strategy<Value = (f64, f64, f64)> {
    (-0.3f64..0.3, -0.3f64..0.3, prop::bool::ANY).prop_map(|(x, y, south)| {
        let z = (0.25 - x * x - y * y).sqrt();
        (x, y, if south { -z } else { z })
    })
}

fn arb_cavity_state() -> impl Strategy<Value = dicke_dimer::CavityState> {
    (-2.0f64..2.0, -2.0f64..2.0, arb_spin()).prop_map(|(re_gamma, im_gamma, (x, y, z))| {
        dicke_dimer::CavityState {
            re_gamma,
            im_gamma,
            x,
            y,
            z,
        }
    })
}

fn arb_state() -> impl Strategy<Value = DimerState> {
    (arb_cavity_state(), arb_cavity_state())
        .prop_map(|(cavity1, cavity2)| DimerState { cavity1, cavity2 })
}

/// Hand-written gradient of the mean-field energy, independent of the
/// library's evaluation.
fn energy_gradient(params: &DimerParams, state: &DimerState) -> [f64; 10] {
    let mut g = [0.0; 10];
    let a = state.to_array();
    for j in 0..2 {
        let c = params.cavity(j);
        let o = 5 * j;
        let (rg, ig, x) = (a[o], a[o + 1], a[o + 2]);
        let rg_other = a[5 * (1 - j)];
        let g2 = rg * rg + ig * ig;
        g[o] = 2.0 * c.omega_c * rg
            + 4.0 * c.lambda * x
            + 4.0 * c.chi * g2 * rg
            + 4.0 * params.hopping * rg_other;
        g[o + 1] = 2.0 * c.omega_c * ig + 4.0 * c.chi * g2 * ig;
        g[o + 2] = 4.0 * c.lambda * rg;
        g[o + 3] = 0.0;
        g[o + 4] = c.omega_a;
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_is_tangent_to_the_spin_spheres(params in arb_params(), state in arb_state()) {
        let rhs = eom_rhs(&params, &state, params.hopping).unwrap();
        let a = state.to_array();
        for j in 0..2 {
            let o = 5 * j;
            let contraction =
                a[o + 2] * rhs[o + 2] + a[o + 3] * rhs[o + 3] + a[o + 4] * rhs[o + 4];
            prop_assert!(
                contraction.abs() < 1e-14,
                "cavity {j}: X dX + Y dY + Z dZ = {contraction:e}"
            );
        }
    }

    #[test]
    fn closed_system_energy_gradient_annihilates_the_flow(
        params in arb_params(),
        state in arb_state(),
    ) {
        let mut closed = params;
        closed.cavity1.kappa = 0.0;
        closed.cavity2.kappa = 0.0;
        let rhs = eom_rhs(&closed, &state, closed.hopping).unwrap();
        let grad = energy_gradient(&closed, &state);
        let de: f64 = grad.iter().zip(rhs.iter()).map(|(g, r)| g * r).sum();
        prop_assert!(de.abs() < 1e-12, "dE/dt along the flow = {de:e}");
    }

    #[test]
    fn rhs_is_equivariant_under_the_total_z2_flip(
        params in arb_params(),
        state in arb_state(),
    ) {
        let rhs = eom_rhs(&params, &state, params.hopping).unwrap();
        let rhs_flip = eom_rhs(&params, &state.total_z2_flip(), params.hopping).unwrap();
        for (i, (a, b)) in rhs.iter().zip(rhs_flip.iter()).enumerate() {
            let expected = if i % 5 == 4 { *a } else { -a };
            prop_assert_eq!(expected, *b, "component {}", i);
        }
    }

    #[test]
    fn critical_hopping_equals_the_normal_phase_boundary(
        cavity in arb_cavity(),
        hopping in 0.0f64..0.45,
    ) {
        prop_assume!(cavity.lambda < critical_coupling(&cavity));
        let params = DimerParams::symmetric(cavity, hopping).unwrap();
        let jc = critical_hopping(&params).unwrap();
        prop_assert!((jc - np_asrp_boundary(&cavity)).abs() < 1e-12);
    }

    #[test]
    fn supercritical_cavities_have_no_hopping_threshold(
        cavity in arb_cavity(),
        excess in 1.01f64..2.0,
    ) {
        let mut c = cavity;
        c.lambda = critical_coupling(&c) * excess;
        let params = DimerParams::symmetric(c, 0.1).unwrap();
        let no_threshold = matches!(
            critical_hopping(&params),
            Err(DickeError::NoHoppingThreshold { .. })
        );
        prop_assert!(no_threshold);
    }

    #[test]
    fn srp_solutions_are_numerically_exact_fixed_points(
        lambda in 0.3f64..1.2,
        hopping in 0.0f64..0.5,
        kappa in 0.0f64..0.5,
    ) {
        let params = sym_params(lambda, kappa, hopping);
        for branch in SrpBranch::all() {
            if let Ok(state) = symmetric_srp_solution(&params, branch) {
                let r = residual_norm(&params, &state);
                prop_assert!(r < 1e-10, "{branch}: residual {r:e}");
            }
        }
    }

    #[test]
    fn srp_branch_signs_are_total_z2_partners(
        lambda in 0.3f64..1.2,
        hopping in 0.0f64..0.5,
        kappa in 0.0f64..0.5,
    ) {
        let params = sym_params(lambda, kappa, hopping);
        for symmetry in [SrpSymmetry::Symmetric, SrpSymmetry::Antisymmetric] {
            let plus = symmetric_srp_solution(&params, SrpBranch::new(symmetry, SrpSign::Plus));
            let minus = symmetric_srp_solution(&params, SrpBranch::new(symmetry, SrpSign::Minus));
            match (plus, minus) {
                (Ok(p), Ok(m)) => {
                    prop_assert_eq!(p.total_z2_flip().max_norm_distance(&m), 0.0);
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "existence must not depend on the sign"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(15))]

    #[test]
    fn analytic_jacobian_matches_central_differences(
        params in arb_params(),
        state in arb_state(),
    ) {
        prop_assume!(state.cavity1.z < -0.05 && state.cavity2.z < -0.05);
        let analytic = dicke_dimer::stability::jacobian(&params, &state).unwrap();
        let fd = fd_jacobian(&params, &state, 1e-6);
        for row in 0..8 {
            for col in 0..8 {
                let a = analytic[(row, col)];
                let rel = (fd[row][col] - a).abs() / a.abs().max(1.0);
                prop_assert!(rel < 1e-6, "entry ({row},{col}): {a} vs {}", fd[row][col]);
            }
        }
    }

    #[test]
    fn block_spectra_union_matches_full_spectrum_at_branch_states(
        lambda in 0.3f64..1.2,
        hopping in 0.0f64..0.5,
        kappa in 0.0f64..0.5,
    ) {
        let params = sym_params(lambda, kappa, hopping);
        let mut states = vec![np_solution(&params)];
        for branch in SrpBranch::all() {
            if let Ok(s) = symmetric_srp_solution(&params, branch) {
                states.push(s);
            }
        }
        for state in states {
            let report = stability_eigs(&params, &state, DEFAULT_EPSILON_MARGIN).unwrap();
            let blocks = report.block_eigs.as_ref().expect("mirror form expected");
            let mut union = blocks.symmetric.clone();
            union.extend_from_slice(&blocks.antisymmetric);
            let d = common::spectrum_distance(union, report.eigenvalues.clone());
            prop_assert!(d < 1e-8, "spectral mismatch {d:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn spin_norms_drift_below_1e8_over_long_runs(
        params in arb_params(),
        state in arb_state(),
    ) {
        let traj = integrate(
            &params,
            &state,
            &HoppingSchedule::Constant(params.hopping),
            (0.0, 1000.0),
            50.0,
            &SolverOpts::default(),
            false,
        )
        .unwrap();
        let worst = traj
            .norm_errs
            .iter()
            .map(|&(a, b)| a.max(b))
            .fold(0.0, f64::max);
        prop_assert!(worst < 1e-8, "spin-norm drift {worst:e}");
    }

    #[test]
    fn closed_system_energy_drifts_below_1e8_relative(
        cavity in arb_cavity(),
        hopping in 0.0f64..0.45,
        state in arb_state(),
    ) {
        let mut c = cavity;
        c.kappa = 0.0;
        let params = DimerParams::symmetric(c, hopping).unwrap();
        let traj = integrate(
            &params,
            &state,
            &HoppingSchedule::Constant(hopping),
            (0.0, 1000.0),
            50.0,
            &SolverOpts::default(),
            false,
        )
        .unwrap();
        let energy = traj.energy.as_ref().expect("closed constant run");
        let e0 = energy[0];
        let drift = energy
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
            / e0.abs().max(1.0);
        prop_assert!(drift < 1e-8, "relative energy drift {drift:e}");
    }

    #[test]
    fn mixed_starts_end_with_both_cavities_superradiant(
        lambda1 in 0.25f64..0.45,
        lambda2 in 0.55f64..0.9,
        j_final in 0.05f64..0.4,
    ) {
        let params = DimerParams::new(
            unit_cavity(lambda1, 0.2),
            unit_cavity(lambda2, 0.2),
            j_final,
        )
        .unwrap();
        let spec = QuenchSpec::new(
            0.0,
            j_final,
            StartSpec {
                cavity1: dicke_dimer::dynamics::CavityStart::Normal,
                cavity2: dicke_dimer::dynamics::CavityStart::Superradiant(SrpSign::Plus),
            },
        );
        let result = quench(&params, &spec, &SolverOpts::default()).unwrap();
        let verdict = match result.label {
            QuenchLabel::Steady(v) | QuenchLabel::Undetermined(v) => v,
            QuenchLabel::Diverged => {
                return Err(TestCaseError::fail("mixed start diverged below the hopping threshold"))
            }
        };
        prop_assert_eq!(verdict, PhaseVerdict::BothSuperradiant);
    }
}

#[test]
fn trajectories_flip_with_the_total_z2_flip_of_the_initial_state() {
    let params = sym_params(0.8, 0.2, 0.25);
    let state = dicke_dimer::dynamics::seed_state(
        &np_solution(&params),
        (SrpSign::Plus, SrpSign::Minus),
        1e-6,
    );
    let run = |s0: &DimerState| {
        integrate(
            &params,
            s0,
            &HoppingSchedule::Constant(params.hopping),
            (0.0, 200.0),
            10.0,
            &SolverOpts::default(),
            false,
        )
        .unwrap()
    };
    let a = run(&state);
    let b = run(&state.total_z2_flip());
    assert_eq!(a.len(), b.len());
    for (sa, sb) in a.states.iter().zip(b.states.iter()) {
        assert_eq!(
            sa.max_norm_distance(&sb.total_z2_flip()),
            0.0,
            "trajectories are not exact mirror images"
        );
    }
}

#[test]
fn quench_endpoints_are_genuine_steady_states() {
    let params = sym_params(0.6, 0.2, 0.1);
    let spec = QuenchSpec::new(0.0, 0.1, StartSpec::normal());
    let result = quench(&params, &spec, &SolverOpts::default()).unwrap();
    assert!(matches!(result.label, QuenchLabel::Steady(_)));
    let shift = result.polish_shift.expect("polish must converge");
    assert!(shift < 1e-6, "polish moved the endpoint by {shift:e}");
}

/// Relaxation from a symmetric superradiant start into the antisymmetric
/// branch requires dissipation: the open system reaches ASRP, the closed
/// system conserves energy and never does.
#[test]
fn ssrp_relaxes_into_asrp_only_with_dissipation() {
    let start_of = |params: &DimerParams| {
        let ssrp = symmetric_srp_solution(
            params,
            SrpBranch::new(SrpSymmetry::Symmetric, SrpSign::Plus),
        )
        .unwrap();
        dicke_dimer::dynamics::seed_state(&ssrp, (SrpSign::Plus, SrpSign::Minus), 1e-6)
    };
    let asrp_of = |params: &DimerParams| {
        symmetric_srp_solution(
            params,
            SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus),
        )
        .unwrap()
    };

    let open = sym_params(0.8, 0.2, 0.4);
    let traj = integrate(
        &open,
        &start_of(&open),
        &HoppingSchedule::Constant(0.4),
        (0.0, 5000.0),
        5.0,
        &SolverOpts::default(),
        true,
    )
    .unwrap();
    let polished = solve_steady_numeric(&open, traj.final_state(), 1e-10).unwrap();
    let d_open = polished.distance_mod_z2(&asrp_of(&open));
    assert!(d_open < 1e-6, "open endpoint is {d_open:e} from ASRP");

    let closed = sym_params(0.8, 0.0, 0.4);
    let traj = integrate(
        &closed,
        &start_of(&closed),
        &HoppingSchedule::Constant(0.4),
        (0.0, 5000.0),
        5.0,
        &SolverOpts::default(),
        true,
    )
    .unwrap();
    assert_eq!(traj.outcome, dicke_dimer::ode::StopReason::Completed);
    let d_closed = traj.final_state().distance_mod_z2(&asrp_of(&closed));
    assert!(d_closed > 0.5, "closed endpoint came {d_closed:e} from ASRP");
}

#[test]
fn converged_quenches_never_mix_phases_across_random_draws() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    while checked < 12 {
        let params = DimerParams::new(
            unit_cavity(rng.gen_range(0.1..1.0), rng.gen_range(0.05..0.4)),
            unit_cavity(rng.gen_range(0.1..1.0), rng.gen_range(0.05..0.4)),
            rng.gen_range(0.01..0.45),
        )
        .unwrap();
        let spec = QuenchSpec::new(0.0, params.hopping, StartSpec::normal());
        let result = quench(&params, &spec, &SolverOpts::default()).unwrap();
        if let QuenchLabel::Steady(verdict) = result.label {
            assert_ne!(
                verdict,
                PhaseVerdict::Mixed,
                "mixed steady state at {params:?}"
            );
            checked += 1;
        }
    }
}

#[test]
fn ssrp_and_asrp_merge_as_hopping_vanishes() {
    let cavity_distance = |a: &dicke_dimer::CavityState, b: &dicke_dimer::CavityState| {
        [
            a.re_gamma - b.re_gamma,
            a.im_gamma - b.im_gamma,
            a.x - b.x,
            a.y - b.y,
            a.z - b.z,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    };
    for (j, budget) in [(1e-6, 1e-5), (1e-9, 1e-8)] {
        let params = sym_params(0.8, 0.2, j);
        let ssrp = symmetric_srp_solution(
            &params,
            SrpBranch::new(SrpSymmetry::Symmetric, SrpSign::Plus),
        )
        .unwrap();
        let asrp = symmetric_srp_solution(
            &params,
            SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus),
        )
        .unwrap();
        // Same cavity-1 pattern; cavity 2 differs by the per-cavity flip,
        // which becomes exact in the uncoupled limit.
        let d1 = cavity_distance(&ssrp.cavity1, &asrp.cavity1);
        let d2 = cavity_distance(&ssrp.cavity2, &asrp.cavity2.z2_flip());
        assert!(d1 < budget && d2 < budget, "J={j:e}: d1={d1:e}, d2={d2:e}");
    }
}

#[test]
fn np_stability_region_matches_the_analytic_boundaries() {
    let kappa = 0.2;
    let lambda_c = critical_coupling(&unit_cavity(0.0, kappa));
    let n = 50;
    let mut tested = 0;
    for i in 0..n {
        let lambda = 0.02 + 0.98 * i as f64 / (n - 1) as f64;
        let cavity = unit_cavity(lambda, kappa);
        let boundary = np_asrp_boundary(&cavity);
        for k in 0..n {
            let j = 0.5 * k as f64 / (n - 1) as f64;
            if (lambda - lambda_c).abs() < 2e-3 || (j - boundary).abs() < 2e-3 {
                continue;
            }
            let params = DimerParams::symmetric(cavity, j).unwrap();
            let report =
                stability_eigs(&params, &np_solution(&params), DEFAULT_EPSILON_MARGIN).unwrap();
            let expected = j < boundary;
            assert_eq!(
                report.stable, expected,
                "NP at lambda={lambda}, J={j}: max Re = {:e}",
                report.max_real_part
            );
            tested += 1;
        }
    }
    assert!(tested > 2000, "only {tested} cells were conclusive");
}

#[test]
fn asrp_is_stable_wherever_it_exists_below_the_unstable_window() {
    let kappa = 0.2;
    let n = 50;
    let mut tested = 0;
    for i in 0..n {
        let lambda = 0.02 + 0.98 * i as f64 / (n - 1) as f64;
        for k in 0..n {
            let j = 0.5 * k as f64 / (n - 1) as f64;
            let params = sym_params(lambda, kappa, j);
            let branch = SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus);
            let Ok(state) = symmetric_srp_solution(&params, branch) else {
                continue;
            };
            let report = stability_eigs(&params, &state, DEFAULT_EPSILON_MARGIN).unwrap();
            assert!(
                report.max_real_part < 0.0,
                "ASRP at lambda={lambda}, J={j}: max Re = {:e}",
                report.max_real_part
            );
            tested += 1;
        }
    }
    assert!(tested > 500, "only {tested} cells had an ASRP branch");
}

#[test]
fn full_linearization_has_two_neutral_modes_and_the_reduction_none() {
    let cases = [
        (sym_params(0.3, 0.2, 0.1), np_solution(&sym_params(0.3, 0.2, 0.1))),
        (sym_params(0.8, 0.2, 0.4), {
            let p = sym_params(0.8, 0.2, 0.4);
            symmetric_srp_solution(&p, SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus))
                .unwrap()
        }),
    ];
    for (params, state) in cases {
        let j10 = jacobian_full10(&params, &state);
        let schur = nalgebra::linalg::Schur::try_new(j10, f64::EPSILON, 100_000)
            .expect("Schur on the 10-d linearization");
        let eigs = schur.complex_eigenvalues();
        let neutral = eigs.iter().filter(|e| e.norm() < 1e-9).count();
        assert_eq!(neutral, 2, "sphere-normal zero modes: {eigs:?}");
        let report = stability_eigs(&params, &state, DEFAULT_EPSILON_MARGIN).unwrap();
        let spurious = report
            .eigenvalues
            .iter()
            .filter(|e| e.norm() < 1e-9)
            .count();
        assert_eq!(spurious, 0, "reduced spectrum: {:?}", report.eigenvalues);
    }
}

/// Below the single-cavity critical coupling the basin strategy flips
/// NP_NP -> superradiant exactly at the analytic hopping threshold.
#[test]
fn basin_classification_flips_at_the_critical_hopping() {
    let lambda = 0.3;
    let kappa = 0.2;
    let jc = critical_hopping(&sym_params(lambda, kappa, 0.0)).unwrap();
    assert!((jc - 0.34).abs() < 1e-12);
    let below = classify_phase(&sym_params(lambda, kappa, jc - 5e-3), &PhaseStrategy::basin()).unwrap();
    assert_eq!(below.label, PhaseLabel::NpNp);
    let above = classify_phase(&sym_params(lambda, kappa, jc + 5e-3), &PhaseStrategy::basin()).unwrap();
    assert_eq!(above.label, PhaseLabel::AsrpOnly);
}

#[test]
fn labels_march_from_normal_through_multistable_to_antisymmetric() {
    let base = sym_params(0.5, 0.2, 0.15);
    let axes = [GridAxis::linspace(AxisName::Lambda, 0.1, 1.0, 40).unwrap()];
    let diagram = sweep_grid_sequential(&base, &axes, &PhaseStrategy::analytic()).unwrap();
    let labels: Vec<PhaseLabel> = diagram.cells.iter().map(|c| c.label).collect();
    let first_non_np = labels
        .iter()
        .position(|&l| l != PhaseLabel::NpNp)
        .expect("some cell must leave the normal phase");
    assert!(first_non_np > 0, "the weakest coupling must still be NP_NP");
    for (i, label) in labels.iter().enumerate().skip(first_non_np) {
        assert_ne!(*label, PhaseLabel::NpNp, "re-entrant NP_NP at index {i}");
        assert_ne!(*label, PhaseLabel::SrpSrp, "identical cavities: cell {i}");
    }
    assert!(labels.contains(&PhaseLabel::Multistable));
    assert!(labels.contains(&PhaseLabel::AsrpOnly));
}

#[test]
fn sweeps_are_deterministic_and_independent_of_parallelism() {
    let base = sym_params(0.5, 0.2, 0.1);
    let axes = [
        GridAxis::linspace(AxisName::Lambda, 0.2, 1.0, 8).unwrap(),
        GridAxis::linspace(AxisName::Hopping, 0.0, 0.5, 8).unwrap(),
    ];
    let strategy = PhaseStrategy::analytic();
    let one = sweep_grid(&base, &axes, &strategy).unwrap();
    let two = sweep_grid(&base, &axes, &strategy).unwrap();
    let seq = sweep_grid_sequential(&base, &axes, &strategy).unwrap();
    let csv = export::phase_diagram_csv(&one);
    assert_eq!(csv, export::phase_diagram_csv(&two));
    assert_eq!(csv, export::phase_diagram_csv(&seq));
    let json = export::to_json_string(&one).unwrap();
    assert_eq!(json, export::to_json_string(&two).unwrap());
}

#[test]
fn same_phase_verdict_matches_the_analytic_branches() {
    let params = sym_params(0.8, 0.2, 0.4);
    let np = np_solution(&params);
    assert_eq!(verify_same_phase(&np, 1e-3), PhaseVerdict::BothNormal);
    let asrp = symmetric_srp_solution(
        &params,
        SrpBranch::new(SrpSymmetry::Antisymmetric, SrpSign::Plus),
    )
    .unwrap();
    assert_eq!(verify_same_phase(&asrp, 1e-3), PhaseVerdict::BothSuperradiant);
}
