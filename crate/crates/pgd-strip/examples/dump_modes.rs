//! Inspect the block mode shapes of a clamped strip.
//!
//! Solves the block first approximation for CC-UP at L/t = 20 and prints the
//! axial functions at the mesh nodes and the thickness functions on a sample
//! grid — the same format the `pgd-strip dump-modes` study writes to file.
//! The rotation-like profile `r1` is close to linear in `x3`, and the
//! deflection corrector `s3` close to quadratic; both are exactly what
//! thin-plate kinematics would prescribe. Run with:
//!
//! ```text
//! cargo run --release --example dump_modes
//! ```

use pgd_strip::cli::{mode_dump_text, ExperimentConfig, Study};
use pgd_strip::metrics::kinematics_diagnostics;
use pgd_strip::{
    fixed_point_block, Discretization, ElementOrder, Integration, Material, SolveSettings,
    StripGeometry,
};

fn main() {
    let cfg = ExperimentConfig::for_study(Study::DumpModes);
    print!("{}", mode_dump_text(&cfg).unwrap());

    // How close are these shapes to thin-plate kinematics?
    let case = cfg.cases[0];
    let geometry = StripGeometry::from_slenderness(cfg.length, cfg.slenderness[0]).unwrap();
    let disc = Discretization::build(
        geometry,
        Material::new(cfg.young, cfg.poisson).unwrap(),
        ElementOrder::Quadratic,
        cfg.n_elements,
        cfg.thickness_degree,
        cfg.boundary_layer,
        Integration::Selective,
    )
    .unwrap();
    let sol = fixed_point_block(
        &disc,
        case.end_condition(),
        &case.load(cfg.amplitude),
        &SolveSettings::default(),
    )
    .unwrap();
    let diag = kinematics_diagnostics(&sol, &disc).unwrap();
    eprintln!();
    eprintln!("r1 deviation from a linear profile : {:.3e}", diag.r1_linearity_residual);
    eprintln!("shear constraint residual          : {:.3e}", diag.shear_constraint_residual);
}
