//! Separated-representation solver for the plane-strain bending strip.
//!
//! The displacement is sought as a sum of products of thickness functions
//! (polynomials on `(-t/2, t/2)`) and axial finite-element functions on
//! `(0, L)`:
//!
//! * the *block* first approximation couples three axial fields at once,
//!   `u1 = r1(x3) v1(x1)` and `u3 = v3(x1) + s3(x3) w3(x1)`, so the thickness
//!   corrector of the deflection is present from the start;
//! * *greedy* modes are classical rank-one enrichments
//!   `u1 = r1(x3) v1(x1)`, `u3 = r3(x3) v3(x1)` computed against the residual
//!   of the accumulated solution.
//!
//! Both are computed by an alternating fixed point between the axial solve and
//! the thickness solve, stopped when the energy-norm relative change between
//! successive iterates falls below `eta`. Thickness vectors are L2-normalized
//! at the end of each iteration; the next axial solve absorbs the scale, so
//! the displacement iterate is unaffected.
//!
//! A fixed point that exhausts `max_iters`, or whose relative change grows
//! for five consecutive iterations (oscillation between directions of equal
//! energy decrease), still returns its current iterate; the per-mode
//! diagnostics report it as not converged. Converged block solves finish
//! with an exact amplitude line search, so they satisfy the work-energy
//! identity `2E = W` to evaluation precision.

mod separated;
mod solver;

pub use separated::SeparatedField;
pub use solver::solve_symmetric;

use crate::mesh::{
    assemble_axial_operators, assemble_thickness_operators, AxialMesh, AxialOperators,
    DiscretizationError, ElementOrder, Integration, ThicknessBasis, ThicknessOperators,
};
use crate::model::{EndCondition, LoadCase, Material, PlaneStrainModuli, StripGeometry};
use nalgebra::DVector;
use thiserror::Error;

/// Errors raised by the separated solver.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("linear system is singular or produced non-finite values ({0})")]
    Singular(String),
    #[error("invalid solver setup: {0}")]
    BadSetup(String),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
}

/// Everything the solver needs about one discretized strip: mesh, operator
/// matrices, moduli and the integration flavour for the shear terms.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: AxialMesh,
    pub axial: AxialOperators,
    pub thick: ThicknessOperators,
    pub moduli: PlaneStrainModuli,
    pub geometry: StripGeometry,
    pub integration: Integration,
}

impl Discretization {
    pub fn build(
        geometry: StripGeometry,
        material: Material,
        order: ElementOrder,
        n_interior: usize,
        thickness_degree: usize,
        boundary_layer: bool,
        integration: Integration,
    ) -> Result<Self, DiscretizationError> {
        let mesh = AxialMesh::build(
            geometry.length,
            geometry.thickness,
            n_interior,
            order,
            boundary_layer,
        )?;
        let axial = assemble_axial_operators(&mesh);
        let basis = ThicknessBasis::new(thickness_degree)?;
        let thick = assemble_thickness_operators(basis, geometry.thickness);
        Ok(Self {
            mesh,
            axial,
            thick,
            moduli: material.moduli(),
            geometry,
            integration,
        })
    }

    /// Same discretization with the other shear quadrature.
    pub fn with_integration(&self, integration: Integration) -> Self {
        let mut d = self.clone();
        d.integration = integration;
        d
    }

    /// Nodal interpolation of the face traction `g3`.
    pub fn g3_nodal(&self, load: &LoadCase) -> DVector<f64> {
        self.mesh.interpolate(|x| load.g3_at(x, self.geometry.length))
    }
}

/// How the thickness functions are seeded before the first axial solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// Bending-motivated polynomials: `r1 = x3`, `s3 = x3^2 - t^2/12`
    /// (greedy modes: `r1 = x3`, `r3 = 1`), L2-normalized.
    Polynomial,
    /// Random coefficients from the given seed (robustness studies).
    Seeded(u64),
}

/// Fixed-point controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    /// Energy-norm relative-change stopping threshold.
    pub eta: f64,
    /// Maximum alternating iterations per mode.
    pub max_iters: usize,
    pub initial_guess: InitialGuess,
    /// L2-normalize thickness vectors after each thickness solve.
    pub normalize_thickness: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            max_iters: 100,
            initial_guess: InitialGuess::Polynomial,
            normalize_thickness: true,
        }
    }
}

/// Converged block first approximation.
#[derive(Debug, Clone)]
pub struct BlockMode {
    pub r1: DVector<f64>,
    pub s3: DVector<f64>,
    pub v1: DVector<f64>,
    pub v3: DVector<f64>,
    pub w3: DVector<f64>,
}

/// One greedy rank-one mode.
#[derive(Debug, Clone)]
pub struct GreedyMode {
    pub r1: DVector<f64>,
    pub r3: DVector<f64>,
    pub v1: DVector<f64>,
    pub v3: DVector<f64>,
}

/// Per-mode fixed-point diagnostics.
#[derive(Debug, Clone)]
pub struct FixedPointDiag {
    /// Number of in-plane solves, counting the trivial zero-load one.
    pub iterations: usize,
    pub converged: bool,
    /// Energy-norm relative change per iteration (starts at iteration 2).
    pub rel_changes: Vec<f64>,
    /// Worst relative residual of any linear solve in this fixed point.
    pub max_solve_residual: f64,
}

/// Accumulated separated solution: optional block first approximation plus
/// greedy enrichment modes.
#[derive(Debug, Clone, Default)]
pub struct PgdSolution {
    pub block: Option<BlockMode>,
    pub extras: Vec<GreedyMode>,
    /// One entry per computed mode, block first when present.
    pub diags: Vec<FixedPointDiag>,
}

impl PgdSolution {
    /// Mode count with the block counted as two modes.
    pub fn n_modes(&self) -> usize {
        (if self.block.is_some() { 2 } else { 0 }) + self.extras.len()
    }

    pub fn converged(&self) -> bool {
        self.diags.iter().all(|d| d.converged)
    }

    pub fn total_iterations(&self) -> usize {
        self.diags.iter().map(|d| d.iterations).sum()
    }

    pub fn max_solve_residual(&self) -> f64 {
        self.diags
            .iter()
            .map(|d| d.max_solve_residual)
            .fold(0.0, f64::max)
    }

    /// The solution as a plain separated field (sum of all modes).
    pub fn field(&self) -> SeparatedField {
        let mut f = SeparatedField::default();
        if let Some(b) = &self.block {
            // The constant is the last coefficient of the descending
            // monomial thickness basis.
            let mut one = DVector::zeros(b.s3.len());
            one[b.s3.len() - 1] = 1.0;
            f.push_u1(b.r1.clone(), b.v1.clone());
            f.push_u3(one, b.v3.clone());
            f.push_u3(b.s3.clone(), b.w3.clone());
        }
        for m in &self.extras {
            f.push_u1(m.r1.clone(), m.v1.clone());
            f.push_u3(m.r3.clone(), m.v3.clone());
        }
        f
    }

    /// Transverse displacement at `(x1, x3)`.
    pub fn u3_at(&self, disc: &Discretization, x1: f64, x3: f64) -> f64 {
        self.field()
            .eval_u3(disc, x1, x3)
            .expect("x1 inside the mesh")
    }

    /// Axial displacement at `(x1, x3)`.
    pub fn u1_at(&self, disc: &Discretization, x1: f64, x3: f64) -> f64 {
        self.field()
            .eval_u1(disc, x1, x3)
            .expect("x1 inside the mesh")
    }
}

/// Compute the block first approximation.
pub fn fixed_point_block(
    disc: &Discretization,
    bc: EndCondition,
    load: &LoadCase,
    settings: &SolveSettings,
) -> Result<PgdSolution, SolveError> {
    let (mode, diag) = solver::block_fixed_point(disc, bc, load, settings)?;
    Ok(PgdSolution {
        block: Some(mode),
        extras: Vec::new(),
        diags: vec![diag],
    })
}

/// Append one greedy mode computed against the residual of `solution`.
pub fn greedy_enrich(
    solution: &mut PgdSolution,
    disc: &Discretization,
    bc: EndCondition,
    load: &LoadCase,
    settings: &SolveSettings,
) -> Result<(), SolveError> {
    let (mode, diag) = solver::greedy_fixed_point(disc, bc, load, settings, &solution.field())?;
    solution.extras.push(mode);
    solution.diags.push(diag);
    Ok(())
}

/// Greedy-only solution with `n_modes` rank-one modes.
pub fn solve_greedy(
    disc: &Discretization,
    bc: EndCondition,
    load: &LoadCase,
    n_modes: usize,
    settings: &SolveSettings,
) -> Result<PgdSolution, SolveError> {
    let mut sol = PgdSolution::default();
    for _ in 0..n_modes {
        greedy_enrich(&mut sol, disc, bc, load, settings)?;
    }
    Ok(sol)
}
