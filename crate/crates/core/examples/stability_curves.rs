//! Instability thresholds of the original, regularized and improved models
//! next to those of the full Euler system.
//!
//! Run with `cargo run --example stability_curves`.

use internal_gn::config::ExperimentConfig;
use internal_gn::presets::stability_curves;

fn main() -> internal_gn::Result<()> {
    let cfg = ExperimentConfig::default();
    let curves = stability_curves(&cfg)?;

    print!("{:>8}", "k");
    for c in &curves {
        print!("{:>16}", c.label);
    }
    println!();
    let rows = curves[0].k.len();
    for i in (0..rows).step_by(rows / 12) {
        print!("{:>8.3}", curves[0].k[i]);
        for c in &curves {
            print!("{:>16.6e}", c.threshold[i]);
        }
        println!();
    }

    println!();
    for c in &curves {
        match c.minimum() {
            Some((k, t)) => println!("{:<14} most unstable at k = {k:.3}, threshold {t:.6}", c.label),
            None => println!("{:<14} stable for every shear", c.label),
        }
    }
    Ok(())
}
