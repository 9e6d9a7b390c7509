//! Reduced-order solver for 2D plane-strain bending of thin strips.
//!
//! The displacement field of a rectangular strip `(0, L) x (-t/2, t/2)` under
//! symmetric face tractions is approximated by sums of products of axial
//! finite-element functions and thickness polynomials. The crate provides:
//!
//! * a coupled "block" first approximation that solves the mid-surface
//!   deflection, the rotation-like axial field and the thickness corrector of
//!   the deflection together ([`pgd::fixed_point_block`]);
//! * classical rank-one greedy enrichment on top of it or from scratch
//!   ([`pgd::solve_greedy`], [`pgd::greedy_enrich`]);
//! * selective reduced integration of the shear term to avoid locking on
//!   low-order axial meshes ([`mesh::Integration`]);
//! * reference solutions to verify against: thin-plate closed forms, the
//!   thickness-corrected asymptotic expansion, the slenderness-limit ODE and
//!   a fine 2D finite-element solve ([`oracles`]);
//! * error metrics and the experiment harness behind the `pgd-strip` binary
//!   ([`metrics`], [`cli`]).

pub mod cli;
pub mod mesh;
pub mod metrics;
pub mod model;
pub mod oracles;
pub mod pgd;

pub use mesh::{AxialMesh, ElementOrder, Integration, ThicknessBasis};
pub use model::{CaseId, EndCondition, LoadCase, LoadProfile, Material, StripGeometry};
pub use pgd::{
    fixed_point_block, greedy_enrich, solve_greedy, Discretization, InitialGuess, PgdSolution,
    SeparatedField, SolveError, SolveSettings,
};
