//! Mean-field toolkit for a pair of Dicke cavities exchanging photons.
//!
//! Two single-mode cavities, each holding an ensemble of two-level atoms with
//! a collective light-matter coupling, are joined by a photon hopping term of
//! strength J. In the thermodynamic limit the dynamics close on ten real
//! variables, a complex photon amplitude gamma_j and a classical spin
//! (X_j, Y_j, Z_j) of conserved length 1/2 per cavity. The hopping competes
//! with the local couplings and splits the superradiant regime into symmetric
//! and antisymmetric photon patterns, with windows of multistability between
//! them and a window above J_usp = (omega_c^2 + kappa^2) / (2 omega_c) where
//! no steady state survives at all.
//!
//! The crate provides the equations of motion and their conserved quantities
//! ([`model`]), closed-form and Newton steady states ([`steadystate`]), linear
//! stability with exact symmetric/antisymmetric block splitting and analytic
//! phase boundaries ([`stability`]), an adaptive Runge-Kutta integrator with
//! dense output and event detection ([`ode`]), quench and ramp protocols
//! ([`dynamics`]), phase-diagram sweeps with multistability detection
//! ([`phasemap`]), and text serialization of all results ([`export`]).

pub mod error;
pub mod dynamics;
pub mod export;
pub mod ode;
pub mod model;
pub mod phasemap;
pub mod stability;
pub mod steadystate;

pub use error::{DickeError, Result};
pub use model::{CavityParams, CavityState, DimerParams, DimerState};
pub use phasemap::{
    classify_phase, multistable_boundary, sweep_grid, sweep_grid_sequential, AxisName,
    Classification, GridAxis, PhaseDiagram, PhaseLabel, Strategy,
};
pub use stability::{stability_eigs, StabilityReport};
pub use steadystate::{
    np_solution, solve_steady_numeric, symmetric_srp_solution, SrpBranch, SrpSign, SrpSymmetry,
};
