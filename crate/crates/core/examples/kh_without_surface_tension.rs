//! Without surface tension the original model is ill-posed: short waves on
//! the interface grow without bound and the run is stopped once they reach
//! the top of the resolved spectrum. The regularized and improved models
//! stay smooth on the same flow.
//!
//! Run with `cargo run --release --example kh_without_surface_tension`.

use internal_gn::config::ExperimentConfig;
use internal_gn::presets::{compare_multipliers, describe};

fn main() -> internal_gn::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.params.inv_bond = 0.0;
    let entries = compare_multipliers(&cfg, None, false)?;
    for line in describe(&entries) {
        println!("{line}");
    }
    for e in &entries {
        println!(
            "{:<12} largest high-band content {:.3e}",
            e.multiplier.tag(),
            e.summary.max_high_band()
        );
    }
    Ok(())
}
