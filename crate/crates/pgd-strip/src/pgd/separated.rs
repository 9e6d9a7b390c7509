//! Separated fields `u1 = sum r_i(x3) v_i(x1)`, `u3 = sum s_j(x3) w_j(x1)` and
//! the plane-strain bilinear form evaluated directly on that structure.
//!
//! Every energy, stopping norm, system block and residual functional of the
//! solver is derived from the same discrete form, so it is consistent
//! everywhere (this is what makes `2 E = W` hold exactly for converged
//! iterates). Under selective integration the reduced mass `m1_ri` replaces
//! `m1` in the one shear pairing that couples two `u1`-type factors; all
//! other pairings are already integrated exactly by the reduced rule, so
//! this matches under-integrating the whole shear term with the reduced
//! rule — which is also how [`Discretization::bilinear`] evaluates it.

use super::Discretization;
use crate::mesh::{gauss_legendre, DiscretizationError, Integration};
use nalgebra::{DMatrix, DVector};

/// Which displacement component a separated term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Component {
    U1,
    U3,
}

/// A displacement field in separated form.
///
/// Each term is a pair `(thickness coefficients, axial nodal values)`.
#[derive(Debug, Clone, Default)]
pub struct SeparatedField {
    pub u1: Vec<(DVector<f64>, DVector<f64>)>,
    pub u3: Vec<(DVector<f64>, DVector<f64>)>,
}

impl SeparatedField {
    pub fn push_u1(&mut self, r: DVector<f64>, v: DVector<f64>) {
        self.u1.push((r, v));
    }

    pub fn push_u3(&mut self, s: DVector<f64>, w: DVector<f64>) {
        self.u3.push((s, w));
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty() && self.u3.is_empty()
    }

    /// Append `other` scaled by `scale` (used to form iterate differences).
    pub fn push_scaled(&mut self, other: &SeparatedField, scale: f64) {
        for (r, v) in &other.u1 {
            self.u1.push((r.clone(), v * scale));
        }
        for (s, w) in &other.u3 {
            self.u3.push((s.clone(), w * scale));
        }
    }

    pub fn eval_u1(
        &self,
        disc: &Discretization,
        x1: f64,
        x3: f64,
    ) -> Result<f64, DiscretizationError> {
        let mut acc = 0.0;
        for (r, v) in &self.u1 {
            acc += disc.thick.basis.eval(r, x3) * disc.mesh.eval_nodal(v, x1)?;
        }
        Ok(acc)
    }

    pub fn eval_u3(
        &self,
        disc: &Discretization,
        x1: f64,
        x3: f64,
    ) -> Result<f64, DiscretizationError> {
        let mut acc = 0.0;
        for (s, w) in &self.u3 {
            acc += disc.thick.basis.eval(s, x3) * disc.mesh.eval_nodal(w, x1)?;
        }
        Ok(acc)
    }
}

fn quad(a: &DVector<f64>, m: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(m * b))
}

impl Discretization {
    /// The plane-strain bilinear form `a(ua, ub)` on separated fields.
    ///
    /// Evaluated by axial quadrature with the strains accumulated pointwise
    /// before any product is formed: at each Gauss point the three strains
    /// are thickness polynomials, built as coefficient vectors and paired
    /// through the exact moment matrix `m3`, and the normal-strain density
    /// uses the completed-square form
    /// `(c11 - c13^2/c33) e11^2 + c33 (e33 + (c13/c33) e11)^2`.
    /// Bending states make `e33 + (c13/c33) e11` and the shear strain
    /// near-zero differences of large separated contributions; forming the
    /// differences at the strain level costs one ulp of the large terms,
    /// whereas expanding them into per-term operator contractions (as the
    /// system blocks below do) cancels between quadratic forms and loses up
    /// to eight digits at extreme slenderness. In exact arithmetic the two
    /// evaluations agree: every pairing is integrated exactly by its rule,
    /// except the `u1`-`u1` shear pairing under selective integration, where
    /// the reduced rule used here reproduces `m1_ri` exactly.
    pub fn bilinear(&self, ua: &SeparatedField, ub: &SeparatedField) -> f64 {
        if ua.is_empty() || ub.is_empty() {
            return 0.0;
        }
        let c = &self.moduli;
        let basis = self.thick.basis;
        let m3 = &self.thick.m3;
        let c11_red = c.c11 - c.c13 * c.c13 / c.c33;
        let ratio = c.c13 / c.c33;

        // Thickness-derivative coefficients of every term, computed once.
        let d_coeffs = |terms: &[(DVector<f64>, DVector<f64>)]| -> Vec<DVector<f64>> {
            terms.iter().map(|(p, _)| basis.deriv_coeffs(p)).collect()
        };
        let (dra, dsa) = (d_coeffs(&ua.u1), d_coeffs(&ua.u3));
        let (drb, dsb) = (d_coeffs(&ub.u1), d_coeffs(&ub.u3));

        // Strains at axial point x, as thickness-basis coefficient vectors:
        // e11 = sum r_i v_i', e33 = sum s_j' w_j, g13 = sum r_i' v_i + s_j w_j'.
        let strains = |f: &SeparatedField, dr: &[DVector<f64>], ds: &[DVector<f64>], x: f64| {
            let mut e11 = DVector::zeros(basis.dim());
            let mut e33 = DVector::zeros(basis.dim());
            let mut g13 = DVector::zeros(basis.dim());
            let at = |v: &DVector<f64>| self.mesh.eval_nodal(v, x).expect("Gauss point inside mesh");
            let dx = |v: &DVector<f64>| {
                self.mesh.eval_nodal_deriv(v, x).expect("Gauss point inside mesh")
            };
            for (k, (r, v)) in f.u1.iter().enumerate() {
                e11.axpy(dx(v), r, 1.0);
                g13.axpy(at(v), &dr[k], 1.0);
            }
            for (k, (s, w)) in f.u3.iter().enumerate() {
                e33.axpy(at(w), &ds[k], 1.0);
                g13.axpy(dx(w), s, 1.0);
            }
            (e11, e33, g13)
        };
        let pair = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(m3 * b));

        let full = gauss_legendre(self.mesh.order().full_points());
        let shear = match self.integration {
            Integration::Full => full.clone(),
            Integration::Selective => gauss_legendre(self.mesh.order().reduced_points()),
        };

        let nodes = self.mesh.nodes();
        let mut acc = 0.0;
        for e in 0..self.mesh.n_elements() {
            let ids = self.mesh.element_nodes(e);
            let (xl, xr) = (nodes[ids[0]], nodes[*ids.last().expect("element has nodes")]);
            let (mid, half) = (0.5 * (xl + xr), 0.5 * (xr - xl));
            for &(xi, wq) in &full {
                let x = mid + half * xi;
                let (e11a, e33a, _) = strains(ua, &dra, &dsa, x);
                let (e11b, e33b, _) = strains(ub, &drb, &dsb, x);
                let da = e33a + &e11a * ratio;
                let db = e33b + &e11b * ratio;
                acc += wq * half * (c11_red * pair(&e11a, &e11b) + c.c33 * pair(&da, &db));
            }
            for &(xi, wq) in &shear {
                let x = mid + half * xi;
                let (_, _, g13a) = strains(ua, &dra, &dsa, x);
                let (_, _, g13b) = strains(ub, &drb, &dsb, x);
                acc += wq * half * c.c55 * pair(&g13a, &g13b);
            }
        }
        acc
    }

    /// Strain energy `E = a(u, u) / 2`.
    pub fn strain_energy(&self, u: &SeparatedField) -> f64 {
        0.5 * self.bilinear(u, u)
    }

    /// Energy norm `sqrt(a(u, u))` (clamped at zero against roundoff).
    pub fn energy_norm(&self, u: &SeparatedField) -> f64 {
        self.bilinear(u, u).max(0.0).sqrt()
    }

    /// External work of the face tractions: both faces carry `+g3 e3`, so
    /// `W(u) = sum_j (s_j^T f3) (g3^T m1 w_j)` with `g3` interpolated nodally.
    pub fn external_work(&self, g3_nodal: &DVector<f64>, u: &SeparatedField) -> f64 {
        let mg = &self.axial.m1 * g3_nodal;
        u.u3
            .iter()
            .map(|(s, w)| s.dot(&self.thick.f3) * w.dot(&mg))
            .sum()
    }

    /// Energy-norm relative change between two iterates,
    /// `||ua - ub||_E / ||ub||_E`.
    ///
    /// A zero previous iterate `ub` is an error: the quantity is meaningless
    /// and always signals a degenerate fixed point upstream.
    pub fn relative_change(
        &self,
        ua: &SeparatedField,
        ub: &SeparatedField,
    ) -> Result<f64, super::SolveError> {
        let denom = self.energy_norm(ub);
        if denom == 0.0 {
            return Err(super::SolveError::BadSetup(
                "relative change against a zero-energy iterate".into(),
            ));
        }
        let mut diff = ua.clone();
        diff.push_scaled(ub, -1.0);
        Ok(self.energy_norm(&diff) / denom)
    }

    // ----- system blocks -------------------------------------------------
    //
    // The axial unknowns of a fixed-point step are a small set of fields,
    // each tagged by its component and its (fixed) thickness factor. The
    // system block coupling two such fields is the bilinear form with the two
    // thickness factors contracted out; the same four cases as `bilinear`.

    pub(crate) fn axial_block(
        &self,
        (ca, ra): (Component, &DVector<f64>),
        (cb, rb): (Component, &DVector<f64>),
    ) -> DMatrix<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let m1s = ax.shear_mass(self.integration);
        match (ca, cb) {
            (Component::U1, Component::U1) => {
                &ax.k1 * (c.c11 * quad(ra, &th.m3, rb)) + m1s * (c.c55 * quad(ra, &th.k3, rb))
            }
            (Component::U1, Component::U3) => {
                &ax.h1 * (c.c13 * quad(rb, &th.h3, ra)) // rb^T h3 ra = ra^T h3^T rb
                    + ax.h1.transpose() * (c.c55 * quad(ra, &th.h3, rb))
            }
            (Component::U3, Component::U1) => {
                ax.h1.transpose() * (c.c13 * quad(ra, &th.h3, rb))
                    + &ax.h1 * (c.c55 * quad(rb, &th.h3, ra))
            }
            (Component::U3, Component::U3) => {
                &ax.m1 * (c.c33 * quad(ra, &th.k3, rb)) + &ax.k1 * (c.c55 * quad(ra, &th.m3, rb))
            }
        }
    }

    pub(crate) fn thickness_block(
        &self,
        (ca, ya): (Component, &DVector<f64>),
        (cb, yb): (Component, &DVector<f64>),
    ) -> DMatrix<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let m1s = ax.shear_mass(self.integration);
        match (ca, cb) {
            (Component::U1, Component::U1) => {
                &th.m3 * (c.c11 * quad(ya, &ax.k1, yb)) + &th.k3 * (c.c55 * quad(ya, m1s, yb))
            }
            (Component::U1, Component::U3) => {
                th.h3.transpose() * (c.c13 * quad(ya, &ax.h1, yb))
                    + &th.h3 * (c.c55 * quad(yb, &ax.h1, ya))
            }
            (Component::U3, Component::U1) => {
                &th.h3 * (c.c13 * quad(yb, &ax.h1, ya))
                    + th.h3.transpose() * (c.c55 * quad(ya, &ax.h1, yb))
            }
            (Component::U3, Component::U3) => {
                &th.k3 * (c.c33 * quad(ya, &ax.m1, yb)) + &th.m3 * (c.c55 * quad(ya, &ax.k1, yb))
            }
        }
    }

    // ----- residual / coupling functionals --------------------------------
    //
    // `a(field, test)` as a load vector over the free axial (or thickness)
    // basis, for a test direction with fixed thickness factor `r` (or fixed
    // axial profile `y`). Used for the greedy residual and for the known
    // mid-surface term of the block thickness step.

    /// Test `u1* = r (x) axial basis`.
    pub(crate) fn coupling_axial_u1(&self, r: &DVector<f64>, field: &SeparatedField) -> DVector<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let m1s = ax.shear_mass(self.integration);
        let n = self.mesh.n_nodes();
        let mut f = DVector::zeros(n);
        for (ri, vi) in &field.u1 {
            f += &ax.k1 * vi * (c.c11 * quad(r, &th.m3, ri));
            f += m1s * vi * (c.c55 * quad(r, &th.k3, ri));
        }
        for (sj, wj) in &field.u3 {
            f += &ax.h1 * wj * (c.c13 * quad(sj, &th.h3, r)); // sj^T h3 r = r^T h3^T sj
            f += ax.h1.transpose() * wj * (c.c55 * quad(r, &th.h3, sj));
        }
        f
    }

    /// Test `u3* = s (x) axial basis`.
    pub(crate) fn coupling_axial_u3(&self, s: &DVector<f64>, field: &SeparatedField) -> DVector<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let n = self.mesh.n_nodes();
        let mut f = DVector::zeros(n);
        for (ri, vi) in &field.u1 {
            f += ax.h1.transpose() * vi * (c.c13 * quad(s, &th.h3, ri));
            f += &ax.h1 * vi * (c.c55 * quad(ri, &th.h3, s));
        }
        for (sj, wj) in &field.u3 {
            f += &ax.m1 * wj * (c.c33 * quad(s, &th.k3, sj));
            f += &ax.k1 * wj * (c.c55 * quad(s, &th.m3, sj));
        }
        f
    }

    /// Test `u1* = thickness basis (x) y`.
    pub(crate) fn coupling_thickness_u1(
        &self,
        y: &DVector<f64>,
        field: &SeparatedField,
    ) -> DVector<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let m1s = ax.shear_mass(self.integration);
        let mut f = DVector::zeros(th.basis.dim());
        for (ri, vi) in &field.u1 {
            f += &th.m3 * ri * (c.c11 * quad(y, &ax.k1, vi));
            f += &th.k3 * ri * (c.c55 * quad(y, m1s, vi));
        }
        for (sj, wj) in &field.u3 {
            f += th.h3.transpose() * sj * (c.c13 * quad(y, &ax.h1, wj));
            f += &th.h3 * sj * (c.c55 * quad(wj, &ax.h1, y));
        }
        f
    }

    /// Test `u3* = thickness basis (x) y`.
    pub(crate) fn coupling_thickness_u3(
        &self,
        y: &DVector<f64>,
        field: &SeparatedField,
    ) -> DVector<f64> {
        let c = &self.moduli;
        let ax = &self.axial;
        let th = &self.thick;
        let mut f = DVector::zeros(th.basis.dim());
        for (ri, vi) in &field.u1 {
            f += &th.h3 * ri * (c.c13 * quad(vi, &ax.h1, y));
            f += th.h3.transpose() * ri * (c.c55 * quad(y, &ax.h1, vi));
        }
        for (sj, wj) in &field.u3 {
            f += &th.k3 * sj * (c.c33 * quad(y, &ax.m1, wj));
            f += &th.m3 * sj * (c.c55 * quad(y, &ax.k1, wj));
        }
        f
    }

    /// External-work functional against a `u3` test with thickness factor `s`:
    /// returns the axial load vector `(s^T f3) m1 g3`.
    pub(crate) fn load_axial_u3(&self, s: &DVector<f64>, g3_nodal: &DVector<f64>) -> DVector<f64> {
        &self.axial.m1 * g3_nodal * s.dot(&self.thick.f3)
    }

    /// External-work functional against a thickness-side `u3` test with axial
    /// profile `y`: returns the thickness load vector `(g3^T m1 y) f3`.
    pub(crate) fn load_thickness_u3(
        &self,
        y: &DVector<f64>,
        g3_nodal: &DVector<f64>,
    ) -> DVector<f64> {
        &self.thick.f3 * (g3_nodal.dot(&(&self.axial.m1 * y)))
    }
}
