//! Thin-strip limit of the converged single-mode deflection.
//!
//! As the slenderness grows, the deflection `w` of the converged single-mode
//! fixed point approaches the solution of a nonlinear fourth-order problem on
//! the unit interval,
//!
//! ```text
//! a w'''' - b (2 mu w'' - mu^2 w) = p,      mu = (int w w'') / (int w^2),
//! ```
//!
//! with the isotropic coefficients `a = (1-nu) / (12 (1+nu) (1-2nu))` and
//! `b = nu^2 / (12 (1-nu^2) (1-2nu))`. For `nu = 0` the equation collapses to
//! the scaled thin-plate equation `w'''' / (12 (1-nu^2)) = p`; for `nu != 0`
//! the two only share solutions of the form `sin(n pi x)`, which is why a
//! single separated mode cannot reproduce the thin-plate limit for general
//! loads. This module makes that gap measurable: it solves the limit problem
//! with Hermite-cubic elements and an outer fixed point on `mu`, so tests can
//! compare the single-mode solver against its own slenderness limit.
//!
//! Everything here lives on the scaled interval `(0, 1)`; comparisons against
//! physical solves must normalize by the matching thin-plate deflection.

use crate::mesh::gauss_legendre;
use crate::model::EndCondition;
use crate::pgd::{solve_symmetric, SolveError};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Maximum number of outer `mu` updates before giving up.
const MAX_OUTER: usize = 200;
/// Relative tolerance on successive `mu` values.
const MU_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LimitOdeError {
    #[error("need at least 4 elements, got {0}")]
    TooCoarse(usize),
    #[error("mu iteration did not settle after {updates} updates; trace {trace:?}")]
    NoConvergence { updates: usize, trace: Vec<f64> },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Coefficients and boundary conditions of the limit problem.
#[derive(Debug, Clone, Copy)]
pub struct LimitOde {
    /// Fourth-order coefficient, `(1-nu) / (12 (1+nu) (1-2nu))`.
    pub a_coeff: f64,
    /// Nonlinear-term coefficient, `nu^2 / (12 (1-nu^2) (1-2nu))`.
    pub b_coeff: f64,
    pub ends: EndCondition,
}

impl LimitOde {
    /// Isotropic coefficients for a Poisson ratio in `(-1, 0.5)`.
    ///
    /// The difference `a - b` telescopes to the thin-plate constant
    /// `1 / (12 (1 - nu^2))` for every admissible `nu`, which the unit tests
    /// pin down; `b` vanishes exactly at `nu = 0`.
    pub fn isotropic(poisson: f64, ends: EndCondition) -> Result<Self, SolveError> {
        if !(poisson > -1.0 && poisson < 0.5) {
            return Err(SolveError::BadSetup(format!(
                "poisson ratio {poisson} outside (-1, 0.5)"
            )));
        }
        let nu = poisson;
        Ok(Self {
            a_coeff: (1.0 - nu) / (12.0 * (1.0 + nu) * (1.0 - 2.0 * nu)),
            b_coeff: nu * nu / (12.0 * (1.0 - nu * nu) * (1.0 - 2.0 * nu)),
            ends,
        })
    }

    /// Solve with `n_elems` uniform Hermite-cubic elements on `(0, 1)`.
    ///
    /// Given `mu`, the linear problem is the symmetric weak form
    /// `a (w'', v'') + 2 b mu (w', v') + b mu^2 (w, v) = (p, v)` (integrating
    /// the middle term by parts kills the boundary contribution because `w`
    /// is pinned at both ends in every case). The outer loop updates
    /// `mu = -(w' , w') / (w, w)`, which equals `(w w'') / (w^2)` after the
    /// same integration by parts, and damps the update by one half whenever
    /// the step direction flips.
    pub fn solve(
        &self,
        load: impl Fn(f64) -> f64,
        n_elems: usize,
    ) -> Result<LimitOdeSolution, LimitOdeError> {
        if n_elems < 4 {
            return Err(LimitOdeError::TooCoarse(n_elems));
        }
        let grid = HermiteGrid::build(n_elems);
        let rhs = grid.load_vector(&load);
        let free = self.free_dofs(&grid);

        let mut mu = 0.0;
        let mut trace = Vec::new();
        let mut last_step = 0.0f64;
        for _ in 0..MAX_OUTER {
            let coeffs = self.linear_solve(&grid, &rhs, &free, mu)?;
            let raw = grid.mu(&coeffs);
            trace.push(raw);
            let step = raw - mu;
            // Halve the step when it reverses direction; the nonlinearity is
            // mild but this keeps the loop monotone on coarse Poisson ratios.
            let next = if step * last_step < 0.0 {
                mu + 0.5 * step
            } else {
                raw
            };
            last_step = next - mu;
            let settled = if next == 0.0 {
                mu == 0.0
            } else {
                (next - mu).abs() <= MU_TOL * next.abs()
            };
            mu = next;
            if settled {
                return Ok(LimitOdeSolution {
                    grid,
                    coeffs,
                    mu,
                    outer_iterations: trace.len(),
                    a_coeff: self.a_coeff,
                    b_coeff: self.b_coeff,
                });
            }
        }
        Err(LimitOdeError::NoConvergence {
            updates: trace.len(),
            trace,
        })
    }

    fn free_dofs(&self, grid: &HermiteGrid) -> Vec<usize> {
        let n = grid.n_dofs();
        let clamped = self.ends == EndCondition::Clamped;
        (0..n)
            .filter(|&i| {
                let end_value = i == 0 || i == n - 2;
                let end_slope = i == 1 || i == n - 1;
                !(end_value || (clamped && end_slope))
            })
            .collect()
    }

    fn linear_solve(
        &self,
        grid: &HermiteGrid,
        rhs: &DVector<f64>,
        free: &[usize],
        mu: f64,
    ) -> Result<DVector<f64>, SolveError> {
        let nf = free.len();
        let mut a = DMatrix::zeros(nf, nf);
        let mut b = DVector::zeros(nf);
        for (i, &gi) in free.iter().enumerate() {
            b[i] = rhs[gi];
            for (j, &gj) in free.iter().enumerate() {
                a[(i, j)] = self.a_coeff * grid.k2[(gi, gj)]
                    + self.b_coeff * (2.0 * mu * grid.k1[(gi, gj)] + mu * mu * grid.m[(gi, gj)]);
            }
        }
        let (x, _) = solve_symmetric(&a, &b)?;
        let mut full = DVector::zeros(grid.n_dofs());
        for (i, &gi) in free.iter().enumerate() {
            full[gi] = x[i];
        }
        Ok(full)
    }
}

/// Converged solution of the limit problem.
#[derive(Debug, Clone)]
pub struct LimitOdeSolution {
    grid: HermiteGrid,
    coeffs: DVector<f64>,
    /// Converged value of the nonlinear ratio; negative for any nonzero `w`.
    pub mu: f64,
    pub outer_iterations: usize,
    a_coeff: f64,
    b_coeff: f64,
}

impl LimitOdeSolution {
    pub fn deflection(&self, x: f64) -> f64 {
        self.grid.eval(&self.coeffs, x, 0)
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.grid.eval(&self.coeffs, x, 1)
    }

    pub fn center_deflection(&self) -> f64 {
        self.deflection(0.5)
    }

    /// Energy of the converged state, `(a (w'')^2 + 2 b mu (w')^2
    /// + b mu^2 w^2) / 2` integrated over the interval.
    pub fn energy(&self) -> f64 {
        let w = &self.coeffs;
        let k2 = w.dot(&(&self.grid.k2 * w));
        let k1 = w.dot(&(&self.grid.k1 * w));
        let m = w.dot(&(&self.grid.m * w));
        0.5 * (self.a_coeff * k2 + self.b_coeff * (2.0 * self.mu * k1 + self.mu * self.mu * m))
    }
}

/// Uniform Hermite-cubic grid on `(0, 1)` with the three constant element
/// matrices assembled once: `k2 = (phi'', phi'')`, `k1 = (phi', phi')`,
/// `m = (phi, phi)`. Degrees of freedom alternate value, slope per node.
#[derive(Debug, Clone)]
struct HermiteGrid {
    n_elems: usize,
    k2: DMatrix<f64>,
    k1: DMatrix<f64>,
    m: DMatrix<f64>,
}

/// Hermite shape values on the reference element `[0, 1]`; `deriv` counts
/// local derivatives (0..=2). The slope dofs carry a factor `h` so that the
/// global unknowns are true slopes.
fn hermite(xi: f64, h: f64, deriv: usize) -> [f64; 4] {
    match deriv {
        0 => [
            1.0 - 3.0 * xi * xi + 2.0 * xi * xi * xi,
            h * (xi - 2.0 * xi * xi + xi * xi * xi),
            3.0 * xi * xi - 2.0 * xi * xi * xi,
            h * (xi * xi * xi - xi * xi),
        ],
        1 => [
            -6.0 * xi + 6.0 * xi * xi,
            h * (1.0 - 4.0 * xi + 3.0 * xi * xi),
            6.0 * xi - 6.0 * xi * xi,
            h * (3.0 * xi * xi - 2.0 * xi),
        ],
        2 => [
            -6.0 + 12.0 * xi,
            h * (-4.0 + 6.0 * xi),
            6.0 - 12.0 * xi,
            h * (6.0 * xi - 2.0),
        ],
        _ => unreachable!("hermite cubics have three nontrivial derivatives"),
    }
}

impl HermiteGrid {
    fn build(n_elems: usize) -> Self {
        let n = 2 * (n_elems + 1);
        let h = 1.0 / n_elems as f64;
        let mut k2 = DMatrix::zeros(n, n);
        let mut k1 = DMatrix::zeros(n, n);
        let mut m = DMatrix::zeros(n, n);
        let quad = gauss_legendre(4);
        for e in 0..n_elems {
            let base = 2 * e;
            for &(p, wgt) in &quad {
                let xi = 0.5 * (p + 1.0);
                let scale = wgt * 0.5 * h;
                let n0 = hermite(xi, h, 0);
                let n1 = hermite(xi, h, 1);
                let n2 = hermite(xi, h, 2);
                for i in 0..4 {
                    for j in 0..4 {
                        m[(base + i, base + j)] += scale * n0[i] * n0[j];
                        k1[(base + i, base + j)] += scale * n1[i] * n1[j] / (h * h);
                        k2[(base + i, base + j)] += scale * n2[i] * n2[j] / (h * h * h * h);
                    }
                }
            }
        }
        Self { n_elems, k2, k1, m }
    }

    fn n_dofs(&self) -> usize {
        2 * (self.n_elems + 1)
    }

    fn load_vector(&self, load: &impl Fn(f64) -> f64) -> DVector<f64> {
        let h = 1.0 / self.n_elems as f64;
        let mut f = DVector::zeros(self.n_dofs());
        let quad = gauss_legendre(5);
        for e in 0..self.n_elems {
            let base = 2 * e;
            let xl = e as f64 * h;
            for &(p, wgt) in &quad {
                let xi = 0.5 * (p + 1.0);
                let x = xl + xi * h;
                let scale = wgt * 0.5 * h * load(x);
                let n0 = hermite(xi, h, 0);
                for i in 0..4 {
                    f[base + i] += scale * n0[i];
                }
            }
        }
        f
    }

    /// Rayleigh-quotient form of the nonlinear ratio: with `w` pinned at both
    /// ends, `int w w'' = -int (w')^2`, so `mu = -(w' , w') / (w, w)`.
    fn mu(&self, coeffs: &DVector<f64>) -> f64 {
        let denom = coeffs.dot(&(&self.m * coeffs));
        if denom == 0.0 {
            return 0.0;
        }
        -coeffs.dot(&(&self.k1 * coeffs)) / denom
    }

    fn eval(&self, coeffs: &DVector<f64>, x: f64, deriv: usize) -> f64 {
        let h = 1.0 / self.n_elems as f64;
        let e = ((x / h).floor() as usize).min(self.n_elems - 1);
        let xi = (x - e as f64 * h) / h;
        let shape = hermite(xi, h, deriv);
        let base = 2 * e;
        let mut v = 0.0;
        for i in 0..4 {
            v += shape[i] * coeffs[base + i];
        }
        v / h.powi(deriv as i32)
    }
}
