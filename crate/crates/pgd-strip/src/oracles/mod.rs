//! Independent reference solutions used to verify the separated solver:
//! thin-plate closed forms, the thickness-corrected asymptotic displacement,
//! the slenderness-limit ODE for the first mode, and a fine 2D plane-strain
//! finite-element solve.

pub mod asymptotic;
pub mod fine2d;
pub mod kl;
pub mod limit_ode;
