//! Greedy rank-one enrichment on top of the block first approximation.
//!
//! After the block fixes the leading bending behaviour, further rank-one
//! modes are added one at a time, each minimizing the energy functional
//! `J(u) = a(u,u)/2 - W(u)` over the remaining residual. `J` decreases
//! monotonically by construction; the midspan deflection error against the
//! fine 2D reference shows what each extra mode actually buys. Run with:
//!
//! ```text
//! cargo run --release --example greedy_after_block
//! ```

use pgd_strip::oracles::fine2d;
use pgd_strip::{
    fixed_point_block, greedy_enrich, CaseId, Discretization, ElementOrder, Integration,
    Material, SolveSettings, StripGeometry,
};

fn main() {
    let material = Material::new(1.0e9, 0.3).unwrap();
    let case = CaseId::CcUp;
    let load = case.load(1.0);
    let geometry = StripGeometry::from_slenderness(1.0, 20.0).unwrap();
    let settings = SolveSettings::default();

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

    println!("Computing the fine 2D reference (CC-UP, L/t = 20)...");
    let reference = fine2d::converged_reference(case, &material, &geometry, 1.0, 1e-3, 2).unwrap();
    println!(
        "  w_ref = {:.6e}  ({} dofs)",
        reference.center_deflection,
        reference.n_dofs()
    );
    println!();

    let g3 = disc.g3_nodal(&load);
    let mut sol = fixed_point_block(&disc, case.end_condition(), &load, &settings).unwrap();
    println!("{:>7} {:>14} {:>12} {:>7}", "modes", "J(u)", "defl err", "iters");
    for step in 0..=4 {
        if step > 0 {
            greedy_enrich(&mut sol, &disc, case.end_condition(), &load, &settings).unwrap();
        }
        let field = sol.field();
        let j = disc.strain_energy(&field) - disc.external_work(&g3, &field);
        let err = (sol.u3_at(&disc, 0.5 * geometry.length, 0.0) - reference.center_deflection)
            .abs()
            / reference.center_deflection.abs();
        println!(
            "{:>7} {:>14.8e} {:>12.3e} {:>7}",
            sol.n_modes(),
            j,
            err,
            sol.diags.last().unwrap().iterations
        );
    }
    println!();
    println!("The block already sits near the reference; enrichment modes refine");
    println!("the residual energy but move the midspan deflection very little.");
}
