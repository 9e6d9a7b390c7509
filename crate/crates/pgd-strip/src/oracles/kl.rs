//! Kirchhoff-Love (thin plate, cylindrical bending) closed forms for the four
//! case combinations. These are the normalizers for the locking study and the
//! large-slenderness references for the sweep studies.
//!
//! Plane-strain bending of a unit-width strip reduces to the beam equation
//! `D w'''' = p(x)` with `D = E t^3 / (12 (1 - nu^2))` and the line load
//! `p = 2 g3` (both faces carry the traction). The unit tests check every
//! closed form against a finite-difference solve of the same ODE.

use crate::model::{CaseId, Material, StripGeometry};
use std::f64::consts::PI;

/// Flexural rigidity per unit width, `E t^3 / (12 (1 - nu^2))`.
pub fn flexural_rigidity(material: &Material, geometry: &StripGeometry) -> f64 {
    let t = geometry.thickness;
    material.young * t * t * t / (12.0 * (1.0 - material.poisson * material.poisson))
}

/// Closed-form thin-plate solution of one case.
///
/// `amplitude` is the traction amplitude on each face, so the line load is
/// `p0 = 2 * amplitude` (times the sinusoidal shape where applicable).
#[derive(Debug, Clone, Copy)]
pub struct KirchhoffLove {
    case: CaseId,
    length: f64,
    flex: f64,
    p0: f64,
}

impl KirchhoffLove {
    pub fn new(
        case: CaseId,
        material: &Material,
        geometry: &StripGeometry,
        amplitude: f64,
    ) -> Self {
        Self {
            case,
            length: geometry.length,
            flex: flexural_rigidity(material, geometry),
            p0: 2.0 * amplitude,
        }
    }

    /// Same closed forms with the rigidity and the line-load amplitude given
    /// directly. Used for scaled problems (for example on the unit interval
    /// with `D = 1 / (12 (1 - nu^2))`) where no physical strip exists.
    pub fn with_rigidity(case: CaseId, length: f64, rigidity: f64, line_load: f64) -> Self {
        Self {
            case,
            length,
            flex: rigidity,
            p0: line_load,
        }
    }

    pub fn case(&self) -> CaseId {
        self.case
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn rigidity(&self) -> f64 {
        self.flex
    }

    /// Line-load amplitude `p0` (twice the per-face traction amplitude).
    pub fn line_load_amplitude(&self) -> f64 {
        self.p0
    }

    /// Slope of the linear-in-x part of the CC-SP solution,
    /// `w = w_particular - beta x + (beta / L) x^2`.
    fn beta(&self) -> f64 {
        self.p0 * self.length.powi(3) / (PI.powi(3) * self.flex)
    }

    /// Deflection `w(x)`.
    pub fn deflection(&self, x: f64) -> f64 {
        let l = self.length;
        let d = self.flex;
        let p = self.p0;
        match self.case {
            CaseId::SsSp => p * l.powi(4) / (PI.powi(4) * d) * (PI * x / l).sin(),
            CaseId::SsUp => p * x * (l.powi(3) - 2.0 * l * x * x + x.powi(3)) / (24.0 * d),
            CaseId::CcSp => {
                let b = self.beta();
                p * l.powi(4) / (PI.powi(4) * d) * (PI * x / l).sin() - b * x + b / l * x * x
            }
            CaseId::CcUp => p * x * x * (l - x) * (l - x) / (24.0 * d),
        }
    }

    /// Slope `w'(x)`.
    pub fn slope(&self, x: f64) -> f64 {
        let l = self.length;
        let d = self.flex;
        let p = self.p0;
        match self.case {
            CaseId::SsSp => p * l.powi(3) / (PI.powi(3) * d) * (PI * x / l).cos(),
            CaseId::SsUp => p * (l.powi(3) - 6.0 * l * x * x + 4.0 * x.powi(3)) / (24.0 * d),
            CaseId::CcSp => {
                let b = self.beta();
                p * l.powi(3) / (PI.powi(3) * d) * (PI * x / l).cos() - b + 2.0 * b * x / l
            }
            CaseId::CcUp => {
                p * (2.0 * x * l * l - 6.0 * l * x * x + 4.0 * x.powi(3)) / (24.0 * d)
            }
        }
    }

    /// Curvature `w''(x)`.
    pub fn curvature(&self, x: f64) -> f64 {
        let l = self.length;
        let d = self.flex;
        let p = self.p0;
        match self.case {
            CaseId::SsSp => -p * l * l / (PI * PI * d) * (PI * x / l).sin(),
            CaseId::SsUp => p * (x * x - l * x) / (2.0 * d),
            CaseId::CcSp => {
                -p * l * l / (PI * PI * d) * (PI * x / l).sin() + 2.0 * self.beta() / l
            }
            CaseId::CcUp => p * (l * l - 6.0 * l * x + 6.0 * x * x) / (12.0 * d),
        }
    }

    /// Deflection at midspan.
    pub fn center_deflection(&self) -> f64 {
        let l = self.length;
        let d = self.flex;
        let p = self.p0;
        match self.case {
            CaseId::SsSp => p * l.powi(4) / (PI.powi(4) * d),
            CaseId::SsUp => 5.0 * p * l.powi(4) / (384.0 * d),
            CaseId::CcSp => p * l.powi(4) / d * (1.0 / PI.powi(4) - 1.0 / (4.0 * PI.powi(3))),
            CaseId::CcUp => p * l.powi(4) / (384.0 * d),
        }
    }

    /// Strain energy per unit width, `E = (D/2) int w''^2 dx`.
    pub fn strain_energy(&self) -> f64 {
        let l = self.length;
        let d = self.flex;
        let p = self.p0;
        match self.case {
            CaseId::SsSp => p * p * l.powi(5) / (4.0 * PI.powi(4) * d),
            CaseId::SsUp => p * p * l.powi(5) / (240.0 * d),
            CaseId::CcSp => {
                p * p * l.powi(5) / (2.0 * PI.powi(4) * d) * (0.5 - 4.0 / (PI * PI))
            }
            CaseId::CcUp => p * p * l.powi(5) / (1440.0 * d),
        }
    }
}

/// Convenience: midspan deflection for a case.
pub fn center_deflection(
    case: CaseId,
    material: &Material,
    geometry: &StripGeometry,
    amplitude: f64,
) -> f64 {
    KirchhoffLove::new(case, material, geometry, amplitude).center_deflection()
}

/// Convenience: strain energy for a case.
pub fn strain_energy(
    case: CaseId,
    material: &Material,
    geometry: &StripGeometry,
    amplitude: f64,
) -> f64 {
    KirchhoffLove::new(case, material, geometry, amplitude).strain_energy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EndCondition;
    use nalgebra::{DMatrix, DVector};

    /// Finite-difference solve of `D w'''' = p` with the classic five-point
    /// stencil and ghost points for the boundary conditions. Second-order
    /// accurate; n = 256 gives ~1e-5 relative accuracy, plenty to confirm
    /// the closed forms.
    fn fd_beam(case: CaseId, flex: f64, p0: f64, l: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let h = l / n as f64;
        let p = |x: f64| match case.load_profile() {
            crate::model::LoadProfile::Sinusoidal => p0 * (PI * x / l).sin(),
            crate::model::LoadProfile::Uniform => p0,
        };
        // Unknowns w_1 .. w_{n-1}; w_0 = w_n = 0.
        let m = n - 1;
        let mut a = DMatrix::zeros(m, m);
        let mut b = DVector::zeros(m);
        // Ghost values: SS gives w_{-1} = -w_1 (zero curvature), clamped
        // gives w_{-1} = w_1 (zero slope); same at the right end.
        let ghost_sign = match case.end_condition() {
            EndCondition::SimplySupported => -1.0,
            EndCondition::Clamped => 1.0,
        };
        for i in 1..n {
            let row = i - 1;
            let mut add = |j: isize, c: f64| {
                if j == 0 || j == n as isize {
                    // w = 0 there
                } else if j == -1 {
                    a[(row, 0)] += c * ghost_sign;
                } else if j == n as isize + 1 {
                    a[(row, m - 1)] += c * ghost_sign;
                } else {
                    a[(row, j as usize - 1)] += c;
                }
            };
            add(i as isize - 2, 1.0);
            add(i as isize - 1, -4.0);
            add(i as isize, 6.0);
            add(i as isize + 1, -4.0);
            add(i as isize + 2, 1.0);
            b[row] = p(i as f64 * h) * h.powi(4) / flex;
        }
        let w_inner = a.lu().solve(&b).expect("FD system is nonsingular");
        let mut xs = Vec::with_capacity(n + 1);
        let mut ws = Vec::with_capacity(n + 1);
        for i in 0..=n {
            xs.push(i as f64 * h);
            ws.push(if i == 0 || i == n {
                0.0
            } else {
                w_inner[i - 1]
            });
        }
        (xs, ws)
    }

    #[test]
    fn closed_forms_match_a_finite_difference_beam_solve() {
        let material = Material::new(70.0e9, 0.33).unwrap();
        let geometry = StripGeometry::new(2.0, 0.04).unwrap();
        let amplitude = 500.0;
        let flex = flexural_rigidity(&material, &geometry);
        for case in CaseId::ALL {
            let kl = KirchhoffLove::new(case, &material, &geometry, amplitude);
            let w_scale = kl.center_deflection().abs();
            // Normalized max deviation from the closed form at one resolution.
            let deviation = |n: usize| -> f64 {
                let (xs, ws) = fd_beam(case, flex, 2.0 * amplitude, geometry.length, n);
                xs.iter()
                    .zip(&ws)
                    .map(|(x, w_fd)| (kl.deflection(*x) - w_fd).abs() / w_scale)
                    .fold(0.0, f64::max)
            };
            let coarse = deviation(128);
            let fine = deviation(512);
            assert!(coarse <= 1e-3, "{case}: coarse FD deviation {coarse}");
            // Quartering the step must shrink the gap ~16x if the closed form
            // is the h -> 0 limit of the FD scheme; allow a generous factor.
            assert!(
                fine <= coarse / 8.0,
                "{case}: FD does not converge to the closed form ({coarse} -> {fine})"
            );

            let n = 512;
            let (xs, ws) = fd_beam(case, flex, 2.0 * amplitude, geometry.length, n);
            let mid = ws[n / 2];
            assert!(
                (kl.center_deflection() - mid).abs() <= 1e-4 * w_scale,
                "{case}: center {} vs FD {mid}",
                kl.center_deflection()
            );
            // Energy by the work identity E = 1/2 int p w (trapezoid is fine
            // at this resolution).
            let h = geometry.length / n as f64;
            let p = |x: f64| match case.load_profile() {
                crate::model::LoadProfile::Sinusoidal => {
                    2.0 * amplitude * (PI * x / geometry.length).sin()
                }
                crate::model::LoadProfile::Uniform => 2.0 * amplitude,
            };
            let mut work = 0.0;
            for (x, w_fd) in xs.iter().zip(&ws) {
                let weight = if *x == 0.0 || *x == geometry.length {
                    0.5
                } else {
                    1.0
                };
                work += weight * p(*x) * w_fd * h;
            }
            assert!(
                (kl.strain_energy() - 0.5 * work).abs() <= 2e-4 * kl.strain_energy().abs(),
                "{case}: E {} vs FD work/2 {}",
                kl.strain_energy(),
                0.5 * work
            );
        }
    }

    #[test]
    fn derivatives_are_consistent_with_the_deflection() {
        let material = Material::new(1.0e9, 0.3).unwrap();
        let geometry = StripGeometry::new(1.0, 0.01).unwrap();
        for case in CaseId::ALL {
            let kl = KirchhoffLove::new(case, &material, &geometry, 1.0);
            let h = 1e-5;
            // Additive scale: the slope crosses zero at midspan.
            let w_over_l = kl.center_deflection().abs() / geometry.length;
            for &x in &[0.2, 0.5, 0.77] {
                let slope_fd = (kl.deflection(x + h) - kl.deflection(x - h)) / (2.0 * h);
                assert!(
                    (kl.slope(x) - slope_fd).abs() <= 1e-6 * (kl.slope(x).abs() + w_over_l),
                    "{case}: slope at {x}"
                );
                let curv_fd = (kl.slope(x + h) - kl.slope(x - h)) / (2.0 * h);
                assert!(
                    (kl.curvature(x) - curv_fd).abs()
                        <= 1e-6 * (kl.curvature(x).abs() + w_over_l / geometry.length),
                    "{case}: curvature at {x}"
                );
            }
        }
    }

    #[test]
    fn boundary_conditions_hold() {
        let material = Material::new(1.0e9, 0.3).unwrap();
        let geometry = StripGeometry::new(1.0, 0.01).unwrap();
        let scale = |kl: &KirchhoffLove| kl.center_deflection().abs();
        for case in CaseId::ALL {
            let kl = KirchhoffLove::new(case, &material, &geometry, 1.0);
            let tol = 1e-12 * scale(&kl);
            assert!(kl.deflection(0.0).abs() <= tol, "{case}: w(0)");
            assert!(kl.deflection(1.0).abs() <= tol, "{case}: w(L)");
            match case.end_condition() {
                EndCondition::Clamped => {
                    assert!(kl.slope(0.0).abs() <= 1e-10 * scale(&kl), "{case}: w'(0)");
                    assert!(kl.slope(1.0).abs() <= 1e-10 * scale(&kl), "{case}: w'(L)");
                }
                EndCondition::SimplySupported => {
                    assert!(
                        kl.curvature(0.0).abs() <= 1e-10 * scale(&kl),
                        "{case}: w''(0)"
                    );
                    assert!(
                        kl.curvature(1.0).abs() <= 1e-10 * scale(&kl),
                        "{case}: w''(L)"
                    );
                }
            }
        }
    }

    #[test]
    fn hand_checked_center_values() {
        let material = Material::new(1.0e9, 0.3).unwrap();
        let geometry = StripGeometry::new(1.0, 0.1).unwrap();
        let d = flexural_rigidity(&material, &geometry);
        assert!((d - 1.0e9 * 1e-3 / (12.0 * 0.91)).abs() < 1e-6 * d);
        // Uniform load: the classic 5/384 vs 1/384 pair.
        let ss = center_deflection(CaseId::SsUp, &material, &geometry, 0.5);
        let cc = center_deflection(CaseId::CcUp, &material, &geometry, 0.5);
        assert!((ss / cc - 5.0).abs() < 1e-12);
    }
}
