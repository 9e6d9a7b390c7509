//! Shear locking of the first mode on linear axial elements.
//!
//! For the simply supported strip under a sinusoidal pressure the first mode
//! converges to the thin-plate solution as the strip gets more slender, but
//! only if the shear term is under-integrated. With full integration the
//! central deflection collapses to zero. Run with:
//!
//! ```text
//! cargo run --release --example locking_table
//! ```

use pgd_strip::oracles::kl;
use pgd_strip::{
    solve_greedy, CaseId, Discretization, ElementOrder, EndCondition, Integration, Material,
    SolveSettings, StripGeometry,
};

fn main() {
    let material = Material::new(1.0e9, 0.3).unwrap();
    let case = CaseId::SsSp;
    let load = case.load(1.0);
    let slendernesses = [4.0, 10.0, 40.0, 100.0, 400.0, 1000.0, 4000.0, 10000.0];

    println!("Normalized central deflection, first mode, 64 linear elements (SS-SP):");
    println!("{:>12} {:>12} {:>12}", "L/t", "full", "selective");
    for &s in &slendernesses {
        let geometry = StripGeometry::from_slenderness(1.0, s).unwrap();
        let w_kl = kl::center_deflection(case, &material, &geometry, load.amplitude);
        let mut row = Vec::new();
        for integration in [Integration::Full, Integration::Selective] {
            let disc = Discretization::build(
                geometry,
                material,
                ElementOrder::Linear,
                64,
                4,
                false,
                integration,
            )
            .unwrap();
            let sol = solve_greedy(
                &disc,
                EndCondition::SimplySupported,
                &load,
                1,
                &SolveSettings::default(),
            )
            .unwrap();
            row.push(sol.u3_at(&disc, 0.5 * geometry.length, 0.0) / w_kl);
        }
        println!("{:>12} {:>12.4} {:>12.4}", s, row[0], row[1]);
    }
}
