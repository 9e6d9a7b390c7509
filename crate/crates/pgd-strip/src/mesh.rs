//! 1D discretizations for the separated solver: the axial Lagrange mesh on
//! `(0, L)` with its operator matrices, and the polynomial thickness basis on
//! `(-t/2, t/2)` with its (analytically integrated) operator matrices.
//!
//! Operator conventions (`N` = basis column vector, `'` = derivative):
//! `k = int N' N'^T`, `m = int N N^T`, `h = int N' N^T`.
//! `m1_ri` is the axial mass assembled with one Gauss point fewer per element;
//! it replaces `m1` in the shear terms under selective reduced integration.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Errors raised while building meshes or operators.
#[derive(Debug, Error, PartialEq)]
pub enum DiscretizationError {
    #[error("need at least one interior element, got {0}")]
    NoElements(usize),
    #[error("boundary-layer mesh needs L > 2t, got L = {length}, t = {thickness}")]
    BoundaryLayerNeedsRoom { length: f64, thickness: f64 },
    #[error("thickness basis degree must lie in 1..=12, got {0}")]
    BadDegree(usize),
    #[error("point {x} lies outside the mesh [0, {length}]")]
    OutOfMesh { x: f64, length: f64 },
}

/// Polynomial order of the axial Lagrange elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Linear,
    Quadratic,
}

impl ElementOrder {
    /// Nodes per element.
    pub fn nodes_per_element(&self) -> usize {
        match self {
            ElementOrder::Linear => 2,
            ElementOrder::Quadratic => 3,
        }
    }

    /// Gauss points of the full rule (exact for the element mass).
    pub fn full_points(&self) -> usize {
        match self {
            ElementOrder::Linear => 2,
            ElementOrder::Quadratic => 3,
        }
    }

    /// Gauss points of the reduced rule (one fewer than full).
    pub fn reduced_points(&self) -> usize {
        self.full_points() - 1
    }
}

/// Quadrature flavour for the shear terms of the separated solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    Full,
    Selective,
}

impl std::fmt::Display for Integration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Integration::Full => f.write_str("full"),
            Integration::Selective => f.write_str("selective"),
        }
    }
}

/// Gauss-Legendre rule on [-1, 1] with `n` points (n in 1..=5).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    match n {
        1 => vec![(0.0, 2.0)],
        2 => {
            let a = 1.0 / 3f64.sqrt();
            vec![(-a, 1.0), (a, 1.0)]
        }
        3 => {
            let a = (3.0 / 5.0f64).sqrt();
            vec![(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        }
        4 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0 / 5.0f64).sqrt()).sqrt();
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0 / 5.0f64).sqrt()).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            vec![(-b, wb), (-a, wa), (a, wa), (b, wb)]
        }
        5 => {
            let a = (5.0 - 2.0 * (10.0 / 7.0f64).sqrt()).sqrt() / 3.0;
            let b = (5.0 + 2.0 * (10.0 / 7.0f64).sqrt()).sqrt() / 3.0;
            let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
            let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
            vec![(-b, wb), (-a, wa), (0.0, 128.0 / 225.0), (a, wa), (b, wb)]
        }
        _ => panic!("gauss_legendre supports 1..=5 points, got {n}"),
    }
}

/// Shape functions and derivatives at local coordinate `xi` in [-1, 1].
fn shape(order: ElementOrder, xi: f64) -> (Vec<f64>, Vec<f64>) {
    match order {
        ElementOrder::Linear => (
            vec![0.5 * (1.0 - xi), 0.5 * (1.0 + xi)],
            vec![-0.5, 0.5],
        ),
        ElementOrder::Quadratic => (
            vec![0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)],
            vec![xi - 0.5, -2.0 * xi, xi + 0.5],
        ),
    }
}

/// Axial finite-element mesh on `(0, L)`.
///
/// Nodes are stored in ascending coordinate order; quadratic elements carry a
/// midside node between consecutive breakpoints.
#[derive(Debug, Clone)]
pub struct AxialMesh {
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
    order: ElementOrder,
    length: f64,
}

impl AxialMesh {
    /// Build a mesh of `n_interior` equal elements, optionally wrapped by the
    /// boundary-layer pattern: at each end one element of size `0.1 t`
    /// followed by one of size `0.9 t`, the interior filling `L - 2t`.
    pub fn build(
        length: f64,
        thickness: f64,
        n_interior: usize,
        order: ElementOrder,
        boundary_layer: bool,
    ) -> Result<Self, DiscretizationError> {
        if n_interior == 0 {
            return Err(DiscretizationError::NoElements(n_interior));
        }
        let mut breakpoints = Vec::with_capacity(n_interior + 5);
        breakpoints.push(0.0);
        if boundary_layer {
            if !(length > 2.0 * thickness) {
                return Err(DiscretizationError::BoundaryLayerNeedsRoom { length, thickness });
            }
            breakpoints.push(0.1 * thickness);
            breakpoints.push(thickness);
            let inner = length - 2.0 * thickness;
            for i in 1..n_interior {
                breakpoints.push(thickness + inner * i as f64 / n_interior as f64);
            }
            breakpoints.push(length - thickness);
            breakpoints.push(length - 0.1 * thickness);
        } else {
            for i in 1..n_interior {
                breakpoints.push(length * i as f64 / n_interior as f64);
            }
        }
        breakpoints.push(length);

        let ne = breakpoints.len() - 1;
        let mut nodes = Vec::new();
        for e in 0..ne {
            nodes.push(breakpoints[e]);
            if order == ElementOrder::Quadratic {
                nodes.push(0.5 * (breakpoints[e] + breakpoints[e + 1]));
            }
        }
        nodes.push(length);

        Ok(Self { breakpoints, nodes, order, length })
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Node coordinates, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Element sizes, left to right.
    pub fn element_sizes(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Global node indices of element `e`, left to right.
    pub fn element_nodes(&self, e: usize) -> Vec<usize> {
        match self.order {
            ElementOrder::Linear => vec![e, e + 1],
            ElementOrder::Quadratic => vec![2 * e, 2 * e + 1, 2 * e + 2],
        }
    }

    /// Indices of the two end nodes `(x = 0, x = L)`.
    pub fn end_nodes(&self) -> (usize, usize) {
        (0, self.n_nodes() - 1)
    }

    /// Nodal interpolation of a function.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.n_nodes(), self.nodes.iter().map(|&x| f(x)))
    }

    /// Evaluate a nodal field at an arbitrary point of `[0, L]`.
    pub fn eval_nodal(&self, dofs: &DVector<f64>, x: f64) -> Result<f64, DiscretizationError> {
        let e = self.locate(x)?;
        let (xl, xr) = (self.breakpoints[e], self.breakpoints[e + 1]);
        let xi = 2.0 * (x - xl) / (xr - xl) - 1.0;
        let (n, _) = shape(self.order, xi);
        let ids = self.element_nodes(e);
        Ok(ids.iter().zip(&n).map(|(&i, &ni)| dofs[i] * ni).sum())
    }

    /// Evaluate the derivative of a nodal field at an arbitrary point.
    pub fn eval_nodal_deriv(&self, dofs: &DVector<f64>, x: f64) -> Result<f64, DiscretizationError> {
        let e = self.locate(x)?;
        let (xl, xr) = (self.breakpoints[e], self.breakpoints[e + 1]);
        let xi = 2.0 * (x - xl) / (xr - xl) - 1.0;
        let (_, d) = shape(self.order, xi);
        let jac = 0.5 * (xr - xl);
        let ids = self.element_nodes(e);
        Ok(ids.iter().zip(&d).map(|(&i, &di)| dofs[i] * di / jac).sum())
    }

    fn locate(&self, x: f64) -> Result<usize, DiscretizationError> {
        if !(0.0..=self.length).contains(&x) {
            return Err(DiscretizationError::OutOfMesh { x, length: self.length });
        }
        // partition_point: first breakpoint > x, minus one; clamp at the last element.
        let i = self.breakpoints.partition_point(|&b| b <= x);
        Ok(i.saturating_sub(1).min(self.n_elements() - 1))
    }
}

/// Assembled axial operator matrices.
#[derive(Debug, Clone)]
pub struct AxialOperators {
    pub k1: DMatrix<f64>,
    pub m1: DMatrix<f64>,
    /// Reduced-integration mass (one Gauss point fewer per element).
    pub m1_ri: DMatrix<f64>,
    pub h1: DMatrix<f64>,
}

impl AxialOperators {
    /// Mass used by the shear pairing: `m1_ri` under selective integration.
    pub fn shear_mass(&self, integration: Integration) -> &DMatrix<f64> {
        match integration {
            Integration::Full => &self.m1,
            Integration::Selective => &self.m1_ri,
        }
    }
}

/// Assemble `k1`, `m1`, `m1_ri`, `h1` on the given mesh.
pub fn assemble_axial_operators(mesh: &AxialMesh) -> AxialOperators {
    let n = mesh.n_nodes();
    let mut k1 = DMatrix::zeros(n, n);
    let mut m1 = DMatrix::zeros(n, n);
    let mut m1_ri = DMatrix::zeros(n, n);
    let mut h1 = DMatrix::zeros(n, n);

    let full = gauss_legendre(mesh.order().full_points());
    let reduced = gauss_legendre(mesh.order().reduced_points());

    for e in 0..mesh.n_elements() {
        let ids = mesh.element_nodes(e);
        let h = mesh.element_sizes()[e];
        let jac = 0.5 * h;
        for &(xi, w) in &full {
            let (nf, df) = shape(mesh.order(), xi);
            for (a, &ia) in ids.iter().enumerate() {
                for (b, &ib) in ids.iter().enumerate() {
                    let dxa = df[a] / jac;
                    let dxb = df[b] / jac;
                    k1[(ia, ib)] += dxa * dxb * w * jac;
                    m1[(ia, ib)] += nf[a] * nf[b] * w * jac;
                    h1[(ia, ib)] += dxa * nf[b] * w * jac;
                }
            }
        }
        for &(xi, w) in &reduced {
            let (nf, _) = shape(mesh.order(), xi);
            for (a, &ia) in ids.iter().enumerate() {
                for (b, &ib) in ids.iter().enumerate() {
                    m1_ri[(ia, ib)] += nf[a] * nf[b] * w * jac;
                }
            }
        }
    }

    AxialOperators { k1, m1, m1_ri, h1 }
}

/// Monomial basis `{x3^d, ..., x3, 1}` on the thickness interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThicknessBasis {
    pub degree: usize,
}

impl ThicknessBasis {
    pub fn new(degree: usize) -> Result<Self, DiscretizationError> {
        if !(1..=12).contains(&degree) {
            return Err(DiscretizationError::BadDegree(degree));
        }
        Ok(Self { degree })
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    /// Monomial power of basis entry `i` (descending: entry 0 is `x3^degree`).
    pub fn power(&self, i: usize) -> usize {
        self.degree - i
    }

    /// Coefficient vector of the single monomial `x3^p`.
    pub fn monomial(&self, p: usize) -> DVector<f64> {
        assert!(p <= self.degree, "monomial power {p} exceeds degree {}", self.degree);
        let mut c = DVector::zeros(self.dim());
        c[self.degree - p] = 1.0;
        c
    }

    pub fn eval(&self, coeffs: &DVector<f64>, x3: f64) -> f64 {
        // Horner over descending powers.
        coeffs.iter().fold(0.0, |acc, &c| acc * x3 + c)
    }

    pub fn eval_deriv(&self, coeffs: &DVector<f64>, x3: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.degree {
            let p = (self.degree - i) as f64;
            acc = acc * x3 + coeffs[i] * p;
        }
        acc
    }

    /// Coefficients of the derivative polynomial, in this same basis (the
    /// leading entry becomes zero).
    pub fn deriv_coeffs(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for i in 0..self.degree {
            out[i + 1] = coeffs[i] * (self.degree - i) as f64;
        }
        out
    }
}

/// Assembled thickness operator matrices over `(-t/2, t/2)`.
#[derive(Debug, Clone)]
pub struct ThicknessOperators {
    pub basis: ThicknessBasis,
    pub thickness: f64,
    pub k3: DMatrix<f64>,
    pub m3: DMatrix<f64>,
    pub h3: DMatrix<f64>,
    /// Trace vector: `f3 = N(t/2) + N(-t/2)`, so `c^T f3 = c(t/2) + c(-t/2)`.
    pub f3: DVector<f64>,
    /// Coefficients of the constant function 1.
    pub r3_const: DVector<f64>,
}

/// `int_{-t/2}^{t/2} x^n dx`, exact.
fn monomial_integral(n: usize, t: f64) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        2.0 * (0.5 * t).powi(n as i32 + 1) / (n as f64 + 1.0)
    }
}

/// Assemble the exact thickness operators for a monomial basis.
pub fn assemble_thickness_operators(
    basis: ThicknessBasis,
    thickness: f64,
) -> ThicknessOperators {
    let d = basis.dim();
    let t = thickness;
    let mut k3 = DMatrix::zeros(d, d);
    let mut m3 = DMatrix::zeros(d, d);
    let mut h3 = DMatrix::zeros(d, d);
    for i in 0..d {
        let pi = basis.power(i);
        for j in 0..d {
            let pj = basis.power(j);
            m3[(i, j)] = monomial_integral(pi + pj, t);
            if pi >= 1 && pj >= 1 {
                k3[(i, j)] = (pi * pj) as f64 * monomial_integral(pi + pj - 2, t);
            }
            if pi >= 1 {
                h3[(i, j)] = pi as f64 * monomial_integral(pi - 1 + pj, t);
            }
        }
    }
    let f3 = DVector::from_iterator(
        d,
        (0..d).map(|i| {
            let p = basis.power(i) as i32;
            (0.5 * t).powi(p) + (-0.5 * t).powi(p)
        }),
    );
    let r3_const = basis.monomial(0);
    ThicknessOperators { basis, thickness, k3, m3, h3, f3, r3_const }
}

impl ThicknessOperators {
    /// L2 norm of a coefficient vector over the thickness interval.
    pub fn l2_norm(&self, coeffs: &DVector<f64>) -> f64 {
        (coeffs.dot(&(&self.m3 * coeffs))).max(0.0).sqrt()
    }
}
