//! Evolution of a Gaussian interface depression with the regularized model
//! and surface tension.
//!
//! `cargo run --release --example gaussian_interface [out_dir]` prints the
//! conserved quantities along the way. With a directory argument the full
//! run directory (snapshots, spectra, diagnostics and manifest) is written
//! there.

use std::path::PathBuf;

use internal_gn::config::ExperimentConfig;
use internal_gn::run::run_experiment;

fn main() -> internal_gn::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let cfg = ExperimentConfig {
        snapshot_times: vec![0.5, 1.0, 1.5],
        ..ExperimentConfig::default()
    };
    let s = run_experiment(&cfg, out.as_deref(), false)?;

    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>10}", "t", "Z", "V", "I", "H", "high band");
    let every = (s.diagnostics.len() / 10).max(1);
    for r in s.diagnostics.iter().step_by(every).chain(std::iter::once(s.last())) {
        println!(
            "{:>6.3} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.10} {:>10.2e}",
            r.t, r.z, r.v, r.i, r.h, r.high_band
        );
    }
    let d = s.drift();
    println!("\n{:?} at t = {}", s.status, s.t_final);
    println!("drift: dZ {:.1e}, dV {:.1e}, dI {:.1e}, dH {:.1e}", d[0], d[1], d[2], d[3]);
    println!("{} accepted steps, {} linear solves", s.stats.accepted, s.cg.solves);
    if let Some(dir) = out {
        println!("run directory: {}", dir.display());
    }
    Ok(())
}
