//! Block, greedy and asymptotic approximations against a fine 2D solve.
//!
//! At moderate slenderness none of the closed forms is exact, so the fair
//! yardstick is a fine plane-strain finite-element solution on a graded 2D
//! mesh. The block first approximation (two coupled modes) beats a greedy
//! solver given the same or more modes; the two-term asymptotic expansion is
//! good at high slenderness but degrades as the strip gets thick. Run with:
//!
//! ```text
//! cargo run --release --example compare_methods
//! ```

use pgd_strip::oracles::{asymptotic::AsymptoticExpansion, fine2d};
use pgd_strip::{
    fixed_point_block, solve_greedy, CaseId, Discretization, ElementOrder, Integration,
    Material, SolveSettings, StripGeometry,
};

fn main() {
    let material = Material::new(1.0e9, 0.3).unwrap();
    let case = CaseId::CcUp;
    let load = case.load(1.0);
    let settings = SolveSettings::default();

    println!("Midspan deflection error vs fine 2D reference ({case}):");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "L/t", "block (2)", "greedy (2)", "greedy (5)", "asymptotic"
    );
    for s in [5.0, 10.0, 20.0, 50.0, 100.0] {
        let geometry = StripGeometry::from_slenderness(1.0, s).unwrap();
        let reference =
            fine2d::converged_reference(case, &material, &geometry, load.amplitude, 1e-3, 2)
                .unwrap();
        let w_ref = reference.center_deflection;
        let err = |w: f64| (w - w_ref).abs() / w_ref.abs();

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
        let mid = 0.5 * geometry.length;

        let block = fixed_point_block(&disc, case.end_condition(), &load, &settings).unwrap();
        let greedy2 = solve_greedy(&disc, case.end_condition(), &load, 2, &settings).unwrap();
        let greedy5 = solve_greedy(&disc, case.end_condition(), &load, 5, &settings).unwrap();
        let asym = AsymptoticExpansion::new(case, &material, &geometry, load.amplitude);

        println!(
            "{:>8} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            s,
            err(block.u3_at(&disc, mid, 0.0)),
            err(greedy2.u3_at(&disc, mid, 0.0)),
            err(greedy5.u3_at(&disc, mid, 0.0)),
            err(asym.center_deflection()),
        );
    }
    println!();
    println!("block (2)  : coupled first approximation, counts as two modes");
    println!("greedy (k) : k rank-one modes, classical alternating fixed point");
    println!("asymptotic : thin-plate solution plus its thickness corrector");
}
