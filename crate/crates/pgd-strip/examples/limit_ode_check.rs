//! Cross-check of the first mode against the slenderness-limit ODE.
//!
//! As `t/L -> 0` the first-mode fixed point converges to a fourth-order
//! boundary-value problem whose nonlinearity is a single scalar `mu`
//! (the energy ratio coupling the thickness profile to the axial solve).
//! The ODE is solved independently on Hermite elements; its dimensionless
//! deflection and energy are scaled back with `p0 L^4 / (E t^3)` and
//! `p0^2 L^5 / (E t^3)`. A slender single-mode solve must agree. Run with:
//!
//! ```text
//! cargo run --release --example limit_ode_check
//! ```

use pgd_strip::model::LoadProfile;
use pgd_strip::oracles::limit_ode::LimitOde;
use pgd_strip::{
    solve_greedy, CaseId, Discretization, ElementOrder, Integration, Material, SolveSettings,
    StripGeometry,
};

fn main() {
    let material = Material::new(1.0e9, 0.3).unwrap();
    let settings = SolveSettings::default();
    let slenderness = 10_000.0;

    println!("First mode vs limit ODE at L/t = {slenderness}:");
    println!(
        "{:>7} {:>14} {:>14} {:>10} {:>9} {:>6}",
        "case", "w (mode 1)", "w (ODE)", "rel diff", "mu", "outer"
    );
    for case in CaseId::ALL {
        let load = case.load(1.0);
        let geometry = StripGeometry::from_slenderness(1.0, slenderness).unwrap();
        let disc = Discretization::build(
            geometry,
            material,
            ElementOrder::Quadratic,
            64,
            4,
            true,
            Integration::Selective,
        )
        .unwrap();
        let sol = solve_greedy(&disc, case.end_condition(), &load, 1, &settings).unwrap();
        let w_mode = sol.u3_at(&disc, 0.5 * geometry.length, 0.0);

        let ode = LimitOde::isotropic(material.poisson, case.end_condition()).unwrap();
        let shape = move |x: f64| match case.load_profile() {
            LoadProfile::Sinusoidal => (std::f64::consts::PI * x).sin(),
            LoadProfile::Uniform => 1.0,
        };
        let ode_sol = ode.solve(shape, 256).unwrap();
        // Dimensionless -> physical: line load p0 = 2 A (both faces loaded).
        let p0 = 2.0 * load.amplitude;
        let w_scale =
            p0 * geometry.length.powi(4) / (material.young * geometry.thickness.powi(3));
        let w_ode = ode_sol.center_deflection() * w_scale;

        println!(
            "{:>7} {:>14.6e} {:>14.6e} {:>10.1e} {:>9.5} {:>6}",
            case,
            w_mode,
            w_ode,
            (w_mode - w_ode).abs() / w_ode.abs(),
            ode_sol.mu,
            ode_sol.outer_iterations
        );
    }
    println!();
    println!("`outer` counts the scalar fixed-point updates of mu inside the ODE solver.");
}
