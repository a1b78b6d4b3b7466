//! Drift of the four conserved quantities over `0 <= t <= 2` for the three
//! models, with and without surface tension. The same table is written by
//! `internal-gn --preset table1`.
//!
//! Run with `cargo run --release --example conservation_table`.

use internal_gn::presets::{compare_multipliers, Preset};
use internal_gn::run::RunStatus;

fn main() -> internal_gn::Result<()> {
    let base = Preset::Table1.config();
    println!("{:>9} {:<12} {:>11} {:>11} {:>11} {:>11}", "1/Bo", "model", "dZ", "dV", "dI", "dH");
    for inv_bond in [base.params.inv_bond, 0.0] {
        let mut cfg = base.clone();
        cfg.params.inv_bond = inv_bond;
        for e in compare_multipliers(&cfg, None, false)? {
            let d = e.summary.drift();
            let note = match e.summary.status {
                RunStatus::Completed => "",
                RunStatus::BlowUp { .. } => " (stopped early)",
            };
            println!(
                "{inv_bond:>9.1e} {:<12} {:>11.2e} {:>11.2e} {:>11.2e} {:>11.2e}{note}",
                e.multiplier.tag(),
                d[0],
                d[1],
                d[2],
                d[3]
            );
        }
    }
    Ok(())
}
