//! Admissibility reports for the built-in multipliers and for a tabulated
//! one that dips and recovers, which breaks sub-additivity and monotonicity.
//!
//! Run with `cargo run --example admissibility`.

use internal_gn::multipliers::check_admissibility;
use internal_gn::{Layer, MultiplierSpec, MultiplierTable, PhysParams};

fn main() -> internal_gn::Result<()> {
    let p = PhysParams::default();
    let table = MultiplierTable::from_csv_str("xi,F\n0,1\n1,1\n2,0.2\n3,0.9\n100,0.9\n")?;
    let specs = [
        MultiplierSpec::Identity,
        MultiplierSpec::regularized_natural(p.delta)?,
        MultiplierSpec::improved(p.delta)?,
        MultiplierSpec::custom(table),
    ];
    for spec in &specs {
        let report = check_admissibility(spec, Layer::Upper, p.mu, 100.0, 100)?;
        println!("== {spec} ==\n{report}\n");
    }
    Ok(())
}
