//! Problem definition: material, plane-strain moduli, strip geometry, loads
//! and the four canonical bending cases.
//!
//! The structure under study is a 2D plane-strain strip occupying
//! `(0, L) x (-t/2, t/2)`, loaded by a transverse surface traction `g3` applied
//! on both faces `x3 = +/- t/2` (so the resultant line load is `p = 2 g3`) and a
//! zero body force. Both ends carry the same kinematic condition (clamped or
//! simply supported).

use thiserror::Error;

/// Errors raised while validating problem data.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("young modulus must be positive, got {0}")]
    NonPositiveYoung(f64),
    #[error("poisson ratio must lie in (-1, 0.5) for plane strain, got {0}")]
    PoissonOutOfRange(f64),
    #[error("strip length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("strip thickness must be positive and smaller than the length, got t = {thickness}, L = {length}")]
    BadThickness { thickness: f64, length: f64 },
    #[error("slenderness must be > 1, got {0}")]
    BadSlenderness(f64),
    #[error("unknown case id {0:?} (expected SS-SP, SS-UP, CC-SP or CC-UP)")]
    UnknownCase(String),
}

/// Isotropic elastic material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
}

impl Material {
    pub fn new(young: f64, poisson: f64) -> Result<Self, ModelError> {
        if !(young > 0.0) || !young.is_finite() {
            return Err(ModelError::NonPositiveYoung(young));
        }
        // nu = 0.5 is the incompressible limit: 1 - 2 nu appears in denominators.
        if !(poisson > -1.0 && poisson < 0.5) || !poisson.is_finite() {
            return Err(ModelError::PoissonOutOfRange(poisson));
        }
        Ok(Self { young, poisson })
    }

    /// Plane-strain elastic moduli of this material.
    pub fn moduli(&self) -> PlaneStrainModuli {
        PlaneStrainModuli::new(self.young, self.poisson)
    }
}

/// Plane-strain moduli in Voigt notation for the (11, 33, 13) components.
///
/// For an isotropic material:
/// `c11 = c33 = E (1 - nu) / ((1 + nu)(1 - 2 nu))`,
/// `c13 = E nu / ((1 + nu)(1 - 2 nu))`,
/// `c55 = E / (2 (1 + nu))` (the shear modulus).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneStrainModuli {
    pub c11: f64,
    pub c13: f64,
    pub c33: f64,
    pub c55: f64,
}

impl PlaneStrainModuli {
    pub fn new(young: f64, poisson: f64) -> Self {
        let e = young;
        let nu = poisson;
        let k = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
        Self {
            c11: k * (1.0 - nu),
            c13: k * nu,
            c33: k * (1.0 - nu),
            c55: e / (2.0 * (1.0 + nu)),
        }
    }

    /// 3x3 Voigt matrix ordered (eps11, eps33, 2 eps13).
    pub fn voigt(&self) -> [[f64; 3]; 3] {
        [
            [self.c11, self.c13, 0.0],
            [self.c13, self.c33, 0.0],
            [0.0, 0.0, self.c55],
        ]
    }
}

/// Strip geometry: span `length` along x1, `thickness` along x3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGeometry {
    pub length: f64,
    pub thickness: f64,
}

impl StripGeometry {
    pub fn new(length: f64, thickness: f64) -> Result<Self, ModelError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(ModelError::NonPositiveLength(length));
        }
        if !(thickness > 0.0 && thickness < length) || !thickness.is_finite() {
            return Err(ModelError::BadThickness { thickness, length });
        }
        Ok(Self { length, thickness })
    }

    /// Build from span and slenderness `L/t`.
    pub fn from_slenderness(length: f64, slenderness: f64) -> Result<Self, ModelError> {
        if !(slenderness > 1.0) || !slenderness.is_finite() {
            return Err(ModelError::BadSlenderness(slenderness));
        }
        Self::new(length, length / slenderness)
    }

    pub fn slenderness(&self) -> f64 {
        self.length / self.thickness
    }
}

/// Kinematic condition applied at both ends of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    /// End sections fully fixed (both displacement components, all of the
    /// thickness).
    Clamped,
    /// Transverse displacement blocked over the whole end section, axial
    /// displacement free ("soft" simple support).
    SimplySupported,
}

/// Shape of the face traction `g3(x1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadProfile {
    /// `g3(x1) = A sin(pi x1 / L)` (one half-wave).
    Sinusoidal,
    /// `g3(x1) = A`.
    Uniform,
}

/// Face traction applied on both faces along +x3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadCase {
    pub profile: LoadProfile,
    pub amplitude: f64,
}

impl LoadCase {
    pub fn new(profile: LoadProfile, amplitude: f64) -> Self {
        Self { profile, amplitude }
    }

    /// Traction value `g3(x1)` on each face.
    pub fn g3_at(&self, x1: f64, length: f64) -> f64 {
        match self.profile {
            LoadProfile::Sinusoidal => {
                self.amplitude * (std::f64::consts::PI * x1 / length).sin()
            }
            LoadProfile::Uniform => self.amplitude,
        }
    }

    /// Resultant line load `p(x1) = 2 g3(x1)` (both faces loaded).
    pub fn line_load_at(&self, x1: f64, length: f64) -> f64 {
        2.0 * self.g3_at(x1, length)
    }
}

/// The four canonical cases: end condition x load profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// Simply supported, sinusoidal pressure.
    SsSp,
    /// Simply supported, uniform pressure.
    SsUp,
    /// Clamped, sinusoidal pressure.
    CcSp,
    /// Clamped, uniform pressure.
    CcUp,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::SsSp, CaseId::SsUp, CaseId::CcSp, CaseId::CcUp];

    pub fn end_condition(&self) -> EndCondition {
        match self {
            CaseId::SsSp | CaseId::SsUp => EndCondition::SimplySupported,
            CaseId::CcSp | CaseId::CcUp => EndCondition::Clamped,
        }
    }

    pub fn load_profile(&self) -> LoadProfile {
        match self {
            CaseId::SsSp | CaseId::CcSp => LoadProfile::Sinusoidal,
            CaseId::SsUp | CaseId::CcUp => LoadProfile::Uniform,
        }
    }

    pub fn load(&self, amplitude: f64) -> LoadCase {
        LoadCase::new(self.load_profile(), amplitude)
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseId::SsSp => "SS-SP",
            CaseId::SsUp => "SS-UP",
            CaseId::CcSp => "CC-SP",
            CaseId::CcUp => "CC-UP",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CaseId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SS-SP" => Ok(CaseId::SsSp),
            "SS-UP" => Ok(CaseId::SsUp),
            "CC-SP" => Ok(CaseId::CcSp),
            "CC-UP" => Ok(CaseId::CcUp),
            other => Err(ModelError::UnknownCase(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_modulus_matches_hand_value() {
        // E = 1 GPa, nu = 0.3 -> c55 = E / 2.6.
        let m = Material::new(1.0e9, 0.3).unwrap().moduli();
        assert!((m.c55 - 1.0e9 / 2.6).abs() < 1e-3);
    }

    #[test]
    fn plane_strain_moduli_hand_values() {
        let m = Material::new(1.0e9, 0.3).unwrap().moduli();
        let k = 1.0e9 / (1.3 * 0.4);
        assert!((m.c11 - 0.7 * k).abs() < 1e-3);
        assert!((m.c13 - 0.3 * k).abs() < 1e-3);
        assert!((m.c33 - m.c11).abs() == 0.0);
    }

    #[test]
    fn voigt_matrix_is_symmetric_positive_definite() {
        for &nu in &[-0.4, 0.0, 0.2, 0.45] {
            let c = Material::new(2.0e9, nu).unwrap().moduli().voigt();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(c[i][j], c[j][i]);
                }
            }
            // Leading principal minors of the symmetric Voigt matrix.
            let d1 = c[0][0];
            let d2 = c[0][0] * c[1][1] - c[0][1] * c[0][1];
            let d3 = d2 * c[2][2];
            assert!(d1 > 0.0 && d2 > 0.0 && d3 > 0.0, "nu = {nu}");
        }
    }

    #[test]
    fn rejects_invalid_material() {
        assert!(Material::new(-1.0, 0.3).is_err());
        assert!(Material::new(0.0, 0.3).is_err());
        assert!(Material::new(1.0, 0.5).is_err());
        assert!(Material::new(1.0, -1.0).is_err());
        assert!(Material::new(f64::NAN, 0.3).is_err());
    }

    #[test]
    fn geometry_from_slenderness() {
        let g = StripGeometry::from_slenderness(2.0, 100.0).unwrap();
        assert_eq!(g.thickness, 0.02);
        assert_eq!(g.slenderness(), 100.0);
        assert!(StripGeometry::from_slenderness(1.0, 0.5).is_err());
        assert!(StripGeometry::new(1.0, 1.5).is_err());
    }

    #[test]
    fn load_profiles_evaluate() {
        let l = LoadCase::new(LoadProfile::Sinusoidal, 3.0);
        assert!((l.g3_at(0.5, 1.0) - 3.0).abs() < 1e-14);
        assert!(l.g3_at(0.0, 1.0).abs() < 1e-14);
        assert_eq!(l.line_load_at(0.5, 1.0), 2.0 * l.g3_at(0.5, 1.0));
        let u = LoadCase::new(LoadProfile::Uniform, 3.0);
        assert_eq!(u.g3_at(0.123, 1.0), 3.0);
    }

    #[test]
    fn case_catalog_round_trips() {
        for c in CaseId::ALL {
            let s = c.to_string();
            assert_eq!(s.parse::<CaseId>().unwrap(), c);
        }
        assert_eq!(CaseId::SsSp.end_condition(), EndCondition::SimplySupported);
        assert_eq!(CaseId::CcUp.load_profile(), LoadProfile::Uniform);
        assert!("SS-XX".parse::<CaseId>().is_err());
    }
}
