use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use internal_gn::config::{ExperimentConfig, MultiplierChoice, ModelKind};
use internal_gn::multipliers::check_admissibility;
use internal_gn::presets::{self, Preset};
use internal_gn::run::{run_experiment, RunStatus, RunSummary};
use internal_gn::{Error, Layer};

const EXIT_BLOW_UP: u8 = 3;
const EXIT_USAGE: u8 = 2;
const EXIT_FAILURE: u8 = 1;

/// Two-layer Green-Naghdi simulations and Kelvin-Helmholtz stability
/// analysis.
///
/// Without a subcommand, `--preset` runs a whole reproduction recipe.
/// With one, the preset only supplies the base configuration.
#[derive(Parser, Debug)]
#[command(name = "internal-gn", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace existing results in the output directory.
    #[arg(long, global = true)]
    force: bool,
    /// Multiplier override: id, reg, imp or custom:<path>.
    #[arg(long, global = true)]
    multiplier: Option<MultiplierChoice>,
    /// fig1, fig2, fig3, fig4 or table1.
    #[arg(long, global = true)]
    preset: Option<Preset>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Run the configured Green-Naghdi (or Saint-Venant) experiment.
    Simulate,
    /// Write the instability threshold curves as `stability.csv`.
    Stability,
    /// Check the configured multiplier against the admissibility conditions.
    Admissibility,
    /// Run the configured experiment with the Saint-Venant system.
    Sv,
    /// Run the original, regularized and improved models side by side and
    /// tabulate the drift of the conserved quantities.
    DiagCompare,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Validation { .. } | Error::Domain(_) | Error::Exists { .. } => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_FAILURE),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Error> {
    let Some(command) = cli.command else {
        let Some(preset) = cli.preset else {
            return Err(Error::Domain("nothing to do: give a subcommand or --preset (see --help)".into()));
        };
        if cli.config.is_some() || cli.multiplier.is_some() {
            return Err(Error::Domain("a preset recipe takes no --config or --multiplier".into()));
        }
        let out = cli.out.clone().unwrap_or_else(|| PathBuf::from(preset.name()));
        for line in presets::run_preset(preset, &out, cli.force)? {
            println!("{line}");
        }
        return Ok(ExitCode::SUCCESS);
    };

    let mut cfg = match (&cli.config, cli.preset) {
        (Some(_), Some(_)) => return Err(Error::Domain("give either --config or --preset, not both".into())),
        (Some(path), None) => ExperimentConfig::from_path(path)?,
        (None, Some(preset)) => preset.config(),
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(m) = &cli.multiplier {
        cfg.multiplier = m.clone();
    }
    cfg.validate()?;
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("run"));

    match command {
        Command::Simulate => simulate(&cfg, &out, cli.force),
        Command::Sv => {
            cfg.model = ModelKind::SaintVenant;
            simulate(&cfg, &out, cli.force)
        }
        Command::Stability => {
            let path = fresh_file(&out, "stability.csv", cli.force)?;
            let curves = presets::stability_curves(&cfg)?;
            presets::write_stability_csv(&path, &curves)?;
            for c in &curves {
                match c.minimum() {
                    Some((k, t)) => println!("{:<12} minimum threshold {t:.6} at k = {k:.4}", c.label),
                    None => println!("{:<12} unconditionally stable", c.label),
                }
            }
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Admissibility => {
            let spec = cfg.multiplier_spec()?;
            let mut text = String::new();
            for layer in [Layer::Upper, Layer::Lower] {
                let report = check_admissibility(&spec, layer, cfg.params.mu, cfg.k_max, 100)?;
                text.push_str(&format!("{spec} multiplier, {layer:?} layer\n{report}\n"));
            }
            print!("{text}");
            if cli.out.is_some() {
                let path = fresh_file(&out, "admissibility.txt", cli.force)?;
                fs::write(&path, &text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DiagCompare => {
            let path = fresh_file(&out, "drift.csv", cli.force)?;
            let entries = presets::compare_multipliers(&cfg, Some(&out), cli.force)?;
            presets::write_drift_csv(&path, &[(cfg.params.inv_bond, &entries)])?;
            for line in presets::describe(&entries) {
                println!("{line}");
            }
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(cfg: &ExperimentConfig, out: &Path, force: bool) -> Result<ExitCode, Error> {
    let summary = run_experiment(cfg, Some(out), force)?;
    report(&summary, out);
    Ok(match summary.status {
        RunStatus::Completed => ExitCode::SUCCESS,
        RunStatus::BlowUp { .. } => ExitCode::from(EXIT_BLOW_UP),
    })
}

fn report(s: &RunSummary, out: &Path) {
    match &s.status {
        RunStatus::Completed => println!("completed at t = {}", s.t_final),
        RunStatus::BlowUp { reason } => println!("Kelvin-Helmholtz blow-up: {reason}"),
    }
    let d = s.drift();
    println!(
        "steps {} accepted, {} rejected; {} linear solves; wall time {:.2} s",
        s.stats.accepted, s.stats.rejected, s.cg.solves, s.wall_time_s
    );
    println!("drift dZ = {:+.3e}  dV = {:+.3e}  dI = {:+.3e}  dH = {:+.3e}", d[0], d[1], d[2], d[3]);
    println!("results in {}", out.display());
}

fn fresh_file(dir: &Path, name: &str, force: bool) -> Result<PathBuf, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_owned(), source: e })?;
    let path = dir.join(name);
    if path.exists() && !force {
        return Err(Error::Exists { path });
    }
    Ok(path)
}
