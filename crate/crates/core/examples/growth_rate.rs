//! Linear Kelvin-Helmholtz growth: a uniform shear twice as strong as the
//! threshold of one Fourier mode, seeded with that mode's growing
//! eigenvector, amplifies it at the rate predicted by the dispersion
//! relation.
//!
//! Run with `cargo run --release --example growth_rate`.

use internal_gn::config::{ExperimentConfig, InitialCondition};
use internal_gn::run::{run_experiment, shear_coefficients};
use internal_gn::stability::Dispersion;

fn main() -> internal_gn::Result<()> {
    let mut cfg = ExperimentConfig {
        grid_n: 128,
        initial_condition: InitialCondition::Shear,
        perturb_amplitude: 1e-8,
        blowup_band_ratio: 0.0,
        ..ExperimentConfig::default()
    };
    let grid = cfg.grid()?;
    let spec = cfg.multiplier_spec()?;
    println!("{:>5} {:>8} {:>12} {:>12} {:>9}", "mode", "k", "predicted", "measured", "rel err");
    for mode in [4, 8, 16] {
        let k = grid.wavenumber(mode);
        let threshold = Dispersion::Model(spec.clone()).threshold(k, &cfg.params);
        cfg.perturb_mode = mode;
        cfg.shear_wbar = (2.0 * threshold).sqrt() / cfg.params.epsilon;
        let c = shear_coefficients(&cfg, k)?;
        let predicted = k * (-c.a * c.b).sqrt();
        cfg.t_end = 1.0 / predicted;

        let s = run_experiment(&cfg, None, false)?;
        let before = grid.forward(s.snapshots[0].zeta.values())[mode].norm();
        let after = grid.forward(&s.final_state[..grid.n()])[mode].norm();
        let measured = (after / before).ln() / s.t_final;
        println!(
            "{mode:>5} {k:>8.4} {predicted:>12.6} {measured:>12.6} {:>9.1e}",
            (measured - predicted).abs() / predicted
        );
    }
    Ok(())
}
