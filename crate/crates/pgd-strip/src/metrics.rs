//! Error measures and kinematics diagnostics for computed solutions.
//!
//! Deflection errors compare the mid-surface deflection at midspan against a
//! reference value; two variants exist because the block first approximation
//! carries a thickness-varying deflection corrector whose mid-surface trace
//! is conventionally reported separately. The kinematics diagnostics measure
//! how far the first mode is from thin-plate (Kirchhoff-Love) kinematics:
//! a linear axial profile through the thickness and vanishing shear.

use thiserror::Error;

use crate::mesh::{gauss_legendre, DiscretizationError, Integration};
use crate::model::CaseId;
use crate::pgd::{Discretization, PgdSolution};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("reference deflection is zero; relative errors are undefined")]
    ZeroReference,
    #[error("reference energy {0} is not positive")]
    NonpositiveEnergy(f64),
    #[error("diagnostics need a block first approximation")]
    BlockRequired,
    #[error(transparent)]
    Eval(#[from] DiscretizationError),
}

/// Mid-surface deflection at midspan, `u3(L/2, 0)`, summed over all modes.
pub fn center_deflection(
    sol: &PgdSolution,
    disc: &Discretization,
) -> Result<f64, DiscretizationError> {
    sol.field()
        .eval_u3(disc, 0.5 * disc.geometry.length, 0.0)
}

/// Center deflection divided by a reference value (the usual normalization
/// against the thin-plate closed form).
pub fn normalized_center_deflection(
    sol: &PgdSolution,
    disc: &Discretization,
    reference: f64,
) -> Result<f64, MetricsError> {
    if reference == 0.0 {
        return Err(MetricsError::ZeroReference);
    }
    Ok(center_deflection(sol, disc)? / reference)
}

/// Relative deflection errors `(err1, err2)` against a reference center
/// deflection.
///
/// `err2` uses the full mid-surface deflection of the solution. For a block
/// solution `err1` drops the corrector term `s3(0) w3(L/2)`, isolating the
/// primary deflection factor; without a block mode the two coincide.
pub fn deflection_errors(
    sol: &PgdSolution,
    disc: &Discretization,
    ref_center: f64,
) -> Result<(f64, f64), MetricsError> {
    if ref_center == 0.0 {
        return Err(MetricsError::ZeroReference);
    }
    let mid = 0.5 * disc.geometry.length;
    let full = sol.field().eval_u3(disc, mid, 0.0)?;
    let corrector = match &sol.block {
        Some(b) => disc.thick.basis.eval(&b.s3, 0.0) * disc.mesh.eval_nodal(&b.w3, mid)?,
        None => 0.0,
    };
    let err2 = ((full - ref_center) / ref_center).abs();
    let err1 = ((full - corrector - ref_center) / ref_center).abs();
    Ok((err1, err2))
}

/// Relative strain-energy error `|e - e_ref| / e_ref`.
pub fn energy_error(e: f64, e_ref: f64) -> Result<f64, MetricsError> {
    if !(e_ref > 0.0) {
        return Err(MetricsError::NonpositiveEnergy(e_ref));
    }
    Ok(((e - e_ref) / e_ref).abs())
}

/// How close the block first approximation is to thin-plate kinematics.
#[derive(Debug, Clone, Copy)]
pub struct KinematicsDiagnostics {
    /// `||r1 - best linear fit||_L2 / ||r1||_L2` through the thickness.
    pub r1_linearity_residual: f64,
    /// `max |v1 + v3'| / max |v3'|` over the axial quadrature points.
    pub shear_constraint_residual: f64,
}

/// Diagnose the block mode's kinematics.
///
/// In the slenderness limit the axial factor pair approaches `u1 = -x3 w'`,
/// i.e. `r1` linear in `x3` and `v1 = -v3'`; both residuals then vanish. For
/// thick strips they stay order one.
pub fn kinematics_diagnostics(
    sol: &PgdSolution,
    disc: &Discretization,
) -> Result<KinematicsDiagnostics, MetricsError> {
    let block = sol.block.as_ref().ok_or(MetricsError::BlockRequired)?;

    // L2-orthogonal projection of r1 onto span{1, x3} in the monomial basis.
    let m3 = &disc.thick.m3;
    let e0 = disc.thick.basis.monomial(0);
    let e1 = disc.thick.basis.monomial(1);
    let g00 = e0.dot(&(m3 * &e0));
    let g11 = e1.dot(&(m3 * &e1));
    // Odd-even orthogonality over the symmetric interval: the Gram matrix of
    // {1, x3} is diagonal.
    let c0 = block.r1.dot(&(m3 * &e0)) / g00;
    let c1 = block.r1.dot(&(m3 * &e1)) / g11;
    let residual = &block.r1 - (&e0 * c0 + &e1 * c1);
    let r1_norm = disc.thick.l2_norm(&block.r1);
    let r1_linearity_residual = if r1_norm > 0.0 {
        disc.thick.l2_norm(&residual) / r1_norm
    } else {
        0.0
    };

    // Shear constraint at the full-rule Gauss points of every element. The
    // thickness factor carries an arbitrary normalization, so the physical
    // rotation of the mid-surface is `r1'(0) v1`, not `v1` itself.
    let rotation_scale = disc.thick.basis.eval_deriv(&block.r1, 0.0);
    let rule = gauss_legendre(disc.mesh.order().full_points());
    let mut worst = 0.0f64;
    let mut slope_scale = 0.0f64;
    for e in 0..disc.mesh.n_elements() {
        let ids = disc.mesh.element_nodes(e);
        let (xl, xr) = (
            disc.mesh.nodes()[ids[0]],
            disc.mesh.nodes()[*ids.last().expect("element has nodes")],
        );
        for &(g, _) in &rule {
            let x = 0.5 * (xl + xr) + 0.5 * (xr - xl) * g;
            let v1 = disc.mesh.eval_nodal(&block.v1, x)?;
            let dv3 = disc.mesh.eval_nodal_deriv(&block.v3, x)?;
            worst = worst.max((rotation_scale * v1 + dv3).abs());
            slope_scale = slope_scale.max(dv3.abs());
        }
    }
    let shear_constraint_residual = if slope_scale > 0.0 {
        worst / slope_scale
    } else {
        0.0
    };

    Ok(KinematicsDiagnostics {
        r1_linearity_residual,
        shear_constraint_residual,
    })
}

/// Which reference solution a record's errors are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Kl,
    Fine2d,
    Asymptotic,
    LimitOde,
}

impl std::fmt::Display for ReferenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceKind::Kl => f.write_str("KL"),
            ReferenceKind::Fine2d => f.write_str("Fine2D"),
            ReferenceKind::Asymptotic => f.write_str("Asymptotic"),
            ReferenceKind::LimitOde => f.write_str("LimitODE"),
        }
    }
}

/// Outcome of one experiment row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    /// The fixed point ran out of iterations; the recorded values are the
    /// last iterate.
    NotConverged,
    /// The solve (or its reference) errored; the error columns are NaN.
    Failed,
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunStatus::Converged => f.write_str("converged"),
            RunStatus::NotConverged => f.write_str("not_converged"),
            RunStatus::Failed => f.write_str("failed"),
        }
    }
}

/// One row of an experiment: a case and slenderness solved with a given mode
/// budget and integration rule, measured against one reference.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub case_id: CaseId,
    pub slenderness: f64,
    pub n_modes: usize,
    pub integration: Integration,
    pub defl_err_1: f64,
    pub defl_err_2: f64,
    pub energy_err: f64,
    pub reference_kind: ReferenceKind,
    pub fp_iterations: usize,
    pub runtime_ms: u128,
    pub status: RunStatus,
}
