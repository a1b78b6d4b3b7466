//! The dispersionless limit: linear phase speeds of the Saint-Venant system
//! measured from simulations of small sine waves, compared with the exact
//! dispersion relation.
//!
//! Run with `cargo run --release --example saint_venant`.

use std::f64::consts::PI;

use internal_gn::integrator::StepControl;
use internal_gn::saint_venant::{linear_phase_speed, measure_phase_speed};
use internal_gn::{Grid, PhysParams};

fn main() -> internal_gn::Result<()> {
    let grid = Grid::new(64, 4.0)?;
    let control = StepControl::with_tolerances(1e-12, 1e-22);
    println!("{:>9} {:>5} {:>18} {:>18} {:>9}", "1/Bo", "mode", "predicted", "measured", "rel err");
    for inv_bond in [5e-4, 0.0] {
        let p = PhysParams { mu: 0.0, inv_bond, ..PhysParams::default() };
        for mode in [1, 2, 4, 8] {
            let k = grid.wavenumber(mode);
            let c = linear_phase_speed(&p, k);
            let measured = measure_phase_speed(&p, &grid, mode, 1e-7, 0.5 * PI / (k * c), &control)?;
            println!(
                "{inv_bond:>9.1e} {mode:>5} {c:>18.15} {measured:>18.15} {:>9.1e}",
                (measured - c).abs() / c
            );
        }
    }
    Ok(())
}
