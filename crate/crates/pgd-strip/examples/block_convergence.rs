//! Convergence of the block first approximation to the thin-plate limit.
//!
//! The block solves the rotation-like axial field, the mid-surface deflection
//! and its thickness corrector together in one fixed point. Against the
//! Kirchhoff-Love closed form its midspan deflection error decays like
//! `(t/L)^2` until the discretization floor, and every converged solve
//! balances twice the strain energy against the external work. Run with:
//!
//! ```text
//! cargo run --release --example block_convergence
//! ```

use pgd_strip::metrics::deflection_errors;
use pgd_strip::oracles::kl;
use pgd_strip::{
    fixed_point_block, CaseId, Discretization, ElementOrder, Integration, Material,
    SolveSettings, StripGeometry,
};

fn main() {
    let material = Material::new(1.0e9, 0.3).unwrap();
    let case = CaseId::CcUp;
    let load = case.load(1.0);
    let settings = SolveSettings::default();

    println!("Block first approximation vs thin-plate closed form ({case}):");
    println!(
        "{:>8} {:>13} {:>13} {:>11} {:>6}",
        "L/t", "err (full)", "err (no corr)", "|2E/W - 1|", "iters"
    );
    for s in [5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0] {
        let geometry = StripGeometry::from_slenderness(1.0, s).unwrap();
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
        let sol = fixed_point_block(&disc, case.end_condition(), &load, &settings).unwrap();

        let w_kl = kl::center_deflection(case, &material, &geometry, load.amplitude);
        let (err1, err2) = deflection_errors(&sol, &disc, w_kl).unwrap();

        let field = sol.field();
        let g3 = disc.g3_nodal(&load);
        let balance = 2.0 * disc.strain_energy(&field) / disc.external_work(&g3, &field) - 1.0;

        println!(
            "{:>8} {:>13.3e} {:>13.3e} {:>11.1e} {:>6}",
            s,
            err2,
            err1,
            balance.abs(),
            sol.total_iterations()
        );
    }
    println!();
    println!("err (full)    : |u3(L/2, 0) - w_KL| / |w_KL|, all block terms");
    println!("err (no corr) : same with the thickness corrector s3*w3 excluded");
}
