//! Two-term thin-strip expansion of the displacement field.
//!
//! For a homogeneous strip the displacement expands, as the thickness goes to
//! zero, into the plate deflection plus a quadratic Poisson corrector through
//! the thickness:
//!
//! ```text
//! u1 = -x3 w'(x1)
//! u3 =  w(x1) + (x3^2 - t^2/12) / 2 * nu/(1-nu) * w''(x1)
//! ```
//!
//! with `w` the thin-plate deflection of the case. The corrector has zero
//! thickness average, is extreme at the faces, and is negligible in
//! displacement but not in energy: it carries the `x3`-linear transverse
//! strain that relaxes the plane-strain constraint. That makes this expansion
//! the natural two-mode target for the separated solver, and its energy a
//! second reference besides the plate energy.

use crate::model::{CaseId, LoadProfile, Material, StripGeometry};
use crate::oracles::kl::KirchhoffLove;
use crate::pgd::{Discretization, SeparatedField, SolveError};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Plate solution plus the quadratic Poisson corrector.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticExpansion {
    kl: KirchhoffLove,
    /// `nu / (1 - nu)`, the plane-strain ratio `C13 / C33`.
    corrector: f64,
    thickness: f64,
    shear_modulus: f64,
}

impl AsymptoticExpansion {
    pub fn new(
        case: CaseId,
        material: &Material,
        geometry: &StripGeometry,
        amplitude: f64,
    ) -> Self {
        let moduli = material.moduli();
        Self {
            kl: KirchhoffLove::new(case, material, geometry, amplitude),
            corrector: moduli.c13 / moduli.c33,
            thickness: geometry.thickness,
            shear_modulus: moduli.c55,
        }
    }

    /// The underlying plate solution.
    pub fn plate(&self) -> &KirchhoffLove {
        &self.kl
    }

    pub fn u1(&self, x1: f64, x3: f64) -> f64 {
        -x3 * self.kl.slope(x1)
    }

    pub fn u3(&self, x1: f64, x3: f64) -> f64 {
        let t = self.thickness;
        self.kl.deflection(x1) + 0.5 * (x3 * x3 - t * t / 12.0) * self.corrector * self.kl.curvature(x1)
    }

    /// Midplane deflection at midspan, `w(L/2) - t^2/24 * nu/(1-nu) * w''(L/2)`.
    pub fn center_deflection(&self) -> f64 {
        self.u3(0.5 * self.kl.length(), 0.0)
    }

    /// Exact strain energy of the expansion field.
    ///
    /// The normal strains are `e11 = -x3 w''` and `e33 = nu/(1-nu) x3 w''`;
    /// their combined modulus telescopes to the plate modulus `E/(1-nu^2)`,
    /// so the first term is exactly the plate energy. The corrector leaves a
    /// parasitic shear `gamma = (x3^2 - t^2/12)/2 * nu/(1-nu) * w'''` whose
    /// square integrates to `t^5/720` through the thickness.
    pub fn strain_energy(&self) -> f64 {
        let t = self.thickness;
        let shear = 0.5
            * self.shear_modulus
            * self.corrector
            * self.corrector
            * (t.powi(5) / 720.0)
            * self.third_derivative_sq_integral();
        self.kl.strain_energy() + shear
    }

    /// `int (w''')^2 dx` for the plate deflection of the case.
    ///
    /// Sinusoidal cases: only the particular sinusoid survives three
    /// derivatives, giving `W^2 (pi/L)^6 L/2` with `W = p0 L^4 / (pi^4 D)`.
    /// Uniform cases: `w''' = p0 (2x - L) / (2D)` for both end conditions,
    /// giving `p0^2 L^3 / (12 D^2)`.
    fn third_derivative_sq_integral(&self) -> f64 {
        let l = self.kl.length();
        let d = self.kl.rigidity();
        let p0 = self.kl.line_load_amplitude();
        match self.kl.case().load_profile() {
            LoadProfile::Sinusoidal => {
                let w_amp = p0 * l.powi(4) / (PI.powi(4) * d);
                w_amp * w_amp * (PI / l).powi(6) * l / 2.0
            }
            LoadProfile::Uniform => p0 * p0 * l.powi(3) / (12.0 * d * d),
        }
    }

    /// The expansion as a separated field on an existing discretization:
    /// one `u1` pair `(-x3) (x) w'` and two `u3` pairs, the midplane
    /// deflection on the constant profile and the curvature on the quadratic
    /// corrector profile. Needs thickness degree >= 2.
    pub fn as_separated(&self, disc: &Discretization) -> Result<SeparatedField, SolveError> {
        let basis = disc.thick.basis;
        if basis.dim() < 3 {
            return Err(SolveError::BadSetup(
                "the quadratic corrector needs thickness degree >= 2".into(),
            ));
        }
        let t = self.thickness;
        let sample = |f: &dyn Fn(f64) -> f64| {
            DVector::from_iterator(disc.mesh.n_nodes(), disc.mesh.nodes().iter().map(|&x| f(x)))
        };
        let mut field = SeparatedField::default();
        field.push_u1(-basis.monomial(1), sample(&|x| self.kl.slope(x)));
        field.push_u3(basis.monomial(0), sample(&|x| self.kl.deflection(x)));
        let profile = (basis.monomial(2) - basis.monomial(0) * (t * t / 12.0))
            * (0.5 * self.corrector);
        field.push_u3(profile, sample(&|x| self.kl.curvature(x)));
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{gauss_legendre, ElementOrder, Integration};

    fn strip(slenderness: f64) -> StripGeometry {
        StripGeometry::from_slenderness(1.0, slenderness).unwrap()
    }

    #[test]
    fn zero_poisson_kills_the_corrector() {
        let mat = Material::new(1.0e9, 0.0).unwrap();
        let geo = strip(20.0);
        let asym = AsymptoticExpansion::new(CaseId::CcUp, &mat, &geo, 1.0);
        for &x1 in &[0.1, 0.37, 0.5, 0.93] {
            for &z in &[-0.5, -0.1, 0.0, 0.4] {
                let x3 = z * geo.thickness;
                assert_eq!(asym.u3(x1, x3), asym.plate().deflection(x1));
                assert_eq!(asym.u1(x1, x3), -x3 * asym.plate().slope(x1));
            }
        }
        assert_eq!(asym.strain_energy(), asym.plate().strain_energy());
    }

    #[test]
    fn corrector_is_extreme_and_equal_at_both_faces() {
        let mat = Material::new(1.0e9, 0.3).unwrap();
        let geo = strip(15.0);
        let asym = AsymptoticExpansion::new(CaseId::SsSp, &mat, &geo, 1.0);
        let t = geo.thickness;
        let corr = 0.3 / 0.7;
        for &x1 in &[0.2, 0.5, 0.77] {
            let w = asym.plate().deflection(x1);
            let face = corr * t * t / 12.0 * asym.plate().curvature(x1);
            let top = asym.u3(x1, 0.5 * t) - w;
            let bottom = asym.u3(x1, -0.5 * t) - w;
            assert!((top - face).abs() <= 1e-15 * w.abs().max(face.abs()));
            assert!((top - bottom).abs() <= 1e-15 * face.abs());
            // Interior magnitude never exceeds the face value.
            for &z in &[-0.4, -0.2, 0.1, 0.3] {
                let inner = asym.u3(x1, z * t) - w;
                assert!(inner.abs() <= face.abs() + 1e-18);
            }
        }
    }

    #[test]
    fn corrector_has_zero_thickness_average() {
        let mat = Material::new(2.0e9, 0.25).unwrap();
        let geo = strip(12.0);
        let asym = AsymptoticExpansion::new(CaseId::SsUp, &mat, &geo, 3.0);
        let t = geo.thickness;
        for &x1 in &[0.15, 0.5, 0.9] {
            let mean: f64 = gauss_legendre(3)
                .iter()
                .map(|&(p, w)| 0.5 * w * asym.u3(x1, 0.5 * t * p))
                .sum();
            let plate = asym.plate().deflection(x1);
            assert!(
                (mean - plate).abs() <= 1e-14 * plate.abs(),
                "thickness average {mean} vs plate {plate}"
            );
        }
    }

    #[test]
    fn center_deflection_matches_the_two_term_formula() {
        let mat = Material::new(1.0e9, 0.3).unwrap();
        let geo = strip(10.0);
        let asym = AsymptoticExpansion::new(CaseId::CcUp, &mat, &geo, 1.0);
        let t = geo.thickness;
        let by_hand = asym.plate().center_deflection()
            - t * t / 24.0 * (0.3 / 0.7) * asym.plate().curvature(0.5 * geo.length);
        assert!((asym.center_deflection() - by_hand).abs() <= 1e-15 * by_hand.abs());
        // Sagging midspan has negative curvature, so the corrector deepens
        // the midplane deflection relative to the plate value.
        assert!(asym.center_deflection() > asym.plate().center_deflection());
    }

    /// The separated representation must reproduce the closures exactly at
    /// the mesh nodes (nodal sampling) and to interpolation accuracy inside
    /// elements; its full-integration energy must approach the closed-form
    /// energy under mesh refinement.
    #[test]
    fn separated_representation_agrees_with_the_closures() {
        let mat = Material::new(1.0e9, 0.3).unwrap();
        let geo = strip(25.0);
        let case = CaseId::CcUp;
        let asym = AsymptoticExpansion::new(case, &mat, &geo, 1.0);
        let energy_gap = |n_elems: usize| {
            let disc = Discretization::build(
                geo,
                mat,
                ElementOrder::Quadratic,
                n_elems,
                4,
                false,
                Integration::Full,
            )
            .unwrap();
            let field = asym.as_separated(&disc).unwrap();
            let scale = asym.plate().center_deflection();
            for &x1 in disc.mesh.nodes().iter().take(7) {
                for &z in &[-0.5, 0.0, 0.25] {
                    let x3 = z * geo.thickness;
                    let u3 = field.eval_u3(&disc, x1, x3).unwrap();
                    assert!((u3 - asym.u3(x1, x3)).abs() <= 1e-12 * scale);
                    let u1 = field.eval_u1(&disc, x1, x3).unwrap();
                    assert!(
                        (u1 - asym.u1(x1, x3)).abs() <= 1e-12 * scale * geo.thickness
                    );
                }
            }
            let mid = 0.5 * (disc.mesh.nodes()[0] + disc.mesh.nodes()[1]);
            assert!(
                (field.eval_u3(&disc, mid, 0.0).unwrap() - asym.u3(mid, 0.0)).abs()
                    <= 1e-4 * scale
            );
            (disc.strain_energy(&field) - asym.strain_energy()).abs() / asym.strain_energy()
        };
        let coarse = energy_gap(32);
        let fine = energy_gap(64);
        assert!(coarse > 1e-15, "quartic plate shape is not in the P2 space");
        // Nodal interpolation of a smooth shape superconverges in energy
        // (measured order 4); require at least order 3 plus a hard ceiling.
        assert!(
            fine <= coarse / 8.0 && fine <= 5e-5,
            "energy gap {coarse} -> {fine}"
        );
    }

    #[test]
    fn separated_representation_needs_a_quadratic_profile() {
        let mat = Material::new(1.0e9, 0.3).unwrap();
        let geo = strip(25.0);
        let disc = Discretization::build(
            geo,
            mat,
            ElementOrder::Linear,
            8,
            1,
            false,
            Integration::Full,
        )
        .unwrap();
        let asym = AsymptoticExpansion::new(CaseId::SsSp, &mat, &geo, 1.0);
        assert!(matches!(
            asym.as_separated(&disc),
            Err(SolveError::BadSetup(_))
        ));
    }
}
