//! Ready-made experiments: multiplier comparisons, stability tables and the
//! named reproduction recipes.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::config::{ExperimentConfig, MultiplierChoice};
use crate::error::{Error, Result};
use crate::io::write_csv;
use crate::run::{run_experiment, RunStatus, RunSummary};
use crate::stability::{linspace, threshold_curve, Dispersion, StabilityCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Instability threshold curves of the three models and of Euler.
    Fig1,
    /// Gaussian interface with surface tension, to `t = 2`.
    Fig2,
    /// The same flow, to `t = 3`.
    Fig3,
    /// Gaussian interface without surface tension, to `t = 2`.
    Fig4,
    /// Conserved-quantity drifts at `t = 2`, with and without surface tension.
    Table1,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Table1];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Table1 => "table1",
        }
    }

    /// The configuration behind the preset (for `Table1`, the run with
    /// surface tension).
    pub fn config(self) -> ExperimentConfig {
        // the recipes reproduce the flows at the stated times, so they
        // integrate through the loss of resolution instead of stopping
        let mut cfg = ExperimentConfig {
            blowup_band_ratio: 0.0,
            ..ExperimentConfig::default()
        };
        match self {
            Preset::Fig1 | Preset::Fig2 | Preset::Table1 => {}
            Preset::Fig3 => cfg.t_end = 3.0,
            Preset::Fig4 => cfg.params.inv_bond = 0.0,
        }
        cfg
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown preset `{s}` (expected fig1, fig2, fig3, fig4 or table1)")))
    }
}

/// Threshold curves of the original, regularized and improved models and
/// of the Euler system on the configured wavenumber grid, followed by the
/// configured multiplier's curve when it is a custom table.
pub fn stability_curves(cfg: &ExperimentConfig) -> Result<Vec<StabilityCurve>> {
    cfg.validate()?;
    let ks = linspace(cfg.k_min, cfg.k_max, cfg.k_count);
    let mut out = Vec::with_capacity(4);
    for choice in [MultiplierChoice::Identity, MultiplierChoice::Regularized, MultiplierChoice::Improved] {
        let spec = cfg.spec_for(&choice)?;
        out.push(threshold_curve(&ks, &cfg.params, &Dispersion::Model(spec)));
    }
    out.push(threshold_curve(&ks, &cfg.params, &Dispersion::Euler));
    if let MultiplierChoice::Custom(_) = cfg.multiplier {
        out.push(threshold_curve(&ks, &cfg.params, &Dispersion::Model(cfg.multiplier_spec()?)));
    }
    Ok(out)
}

pub const STABILITY_HEADER: [&str; 5] = [
    "k",
    "threshold_original",
    "threshold_regularized",
    "threshold_improved",
    "threshold_euler",
];

/// Writes curves sharing one wavenumber grid as a CSV table with columns
/// `k, threshold_<label>...`.
pub fn write_stability_csv(path: &Path, curves: &[StabilityCurve]) -> Result<()> {
    let Some(first) = curves.first() else {
        return Err(Error::Domain("no curves to write".into()));
    };
    if curves.iter().any(|c| c.k != first.k) {
        return Err(Error::GridMismatch);
    }
    let rows: Vec<Vec<f64>> = (0..first.k.len())
        .map(|i| std::iter::once(first.k[i]).chain(curves.iter().map(|c| c.threshold[i])).collect())
        .collect();
    let names: Vec<String> = std::iter::once("k".to_owned())
        .chain(curves.iter().map(|c| format!("threshold_{}", c.label)))
        .collect();
    let header: Vec<&str> = names.iter().map(String::as_str).collect();
    write_csv(path, &header, &rows)
}

/// One run of a multiplier comparison.
#[derive(Debug)]
pub struct ComparisonEntry {
    pub multiplier: MultiplierChoice,
    pub summary: RunSummary,
}

/// Runs `cfg` once per built-in multiplier, into `out/<tag>` when given.
pub fn compare_multipliers(cfg: &ExperimentConfig, out: Option<&Path>, force: bool) -> Result<Vec<ComparisonEntry>> {
    let mut entries = Vec::with_capacity(3);
    for choice in [MultiplierChoice::Identity, MultiplierChoice::Regularized, MultiplierChoice::Improved] {
        let run_cfg = ExperimentConfig {
            multiplier: choice.clone(),
            ..cfg.clone()
        };
        let dir = out.map(|o| o.join(choice.tag()));
        let summary = run_experiment(&run_cfg, dir.as_deref(), force)?;
        entries.push(ComparisonEntry {
            multiplier: choice,
            summary,
        });
    }
    Ok(entries)
}

pub const DRIFT_HEADER: [&str; 8] = ["inv_bond", "multiplier", "completed", "t_final", "dZ", "dV", "dI", "dH"];

/// Writes `(inv_bond, entries)` groups as one drift table. The multiplier
/// column holds 0, 1, 2 for original, regularized, improved.
pub fn write_drift_csv(path: &Path, groups: &[(f64, &[ComparisonEntry])]) -> Result<()> {
    let mut rows = Vec::new();
    for (inv_bond, entries) in groups {
        for e in entries.iter() {
            let index = match e.multiplier {
                MultiplierChoice::Identity => 0.0,
                MultiplierChoice::Regularized => 1.0,
                MultiplierChoice::Improved => 2.0,
                MultiplierChoice::Custom(_) => 3.0,
            };
            let d = e.summary.drift();
            let completed = if matches!(e.summary.status, RunStatus::Completed) { 1.0 } else { 0.0 };
            rows.push(vec![*inv_bond, index, completed, e.summary.t_final, d[0], d[1], d[2], d[3]]);
        }
    }
    write_csv(path, &DRIFT_HEADER, &rows)
}

/// Human-readable lines of a comparison.
pub fn describe(entries: &[ComparisonEntry]) -> Vec<String> {
    entries
        .iter()
        .map(|e| {
            let d = e.summary.drift();
            let status = match &e.summary.status {
                RunStatus::Completed => "completed".to_owned(),
                RunStatus::BlowUp { reason } => format!("blow-up ({reason})"),
            };
            format!(
                "{:<12} t = {:<8.4} dZ = {:+.3e}  dV = {:+.3e}  dI = {:+.3e}  dH = {:+.3e}  high band = {:.3e}  {status}",
                e.multiplier.tag(),
                e.summary.t_final,
                d[0],
                d[1],
                d[2],
                d[3],
                e.summary.last().high_band,
            )
        })
        .collect()
}

/// Runs a preset into `out` and returns a printable summary.
pub fn run_preset(preset: Preset, out: &Path, force: bool) -> Result<Vec<String>> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let cfg = preset.config();
    match preset {
        Preset::Fig1 => {
            let path = out.join("stability.csv");
            if path.exists() && !force {
                return Err(Error::Exists { path });
            }
            let curves = stability_curves(&cfg)?;
            write_stability_csv(&path, &curves)?;
            Ok(curves
                .iter()
                .map(|c| match c.minimum() {
                    Some((k, t)) => format!("{:<12} minimum threshold {t:.6} at k = {k:.4}", c.label),
                    None => format!("{:<12} unconditionally stable", c.label),
                })
                .chain(std::iter::once(format!("wrote {}", path.display())))
                .collect())
        }
        Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => {
            let entries = compare_multipliers(&cfg, Some(out), force)?;
            Ok(describe(&entries))
        }
        Preset::Table1 => {
            let with = compare_multipliers(&cfg, Some(&out.join("with_surface_tension")), force)?;
            let mut without_cfg = cfg.clone();
            without_cfg.params.inv_bond = 0.0;
            let without = compare_multipliers(&without_cfg, Some(&out.join("without_surface_tension")), force)?;
            let path = out.join("table1.csv");
            write_drift_csv(&path, &[(cfg.params.inv_bond, &with), (0.0, &without)])?;
            let mut lines = vec![format!("with surface tension (inv_bond = {})", cfg.params.inv_bond)];
            lines.extend(describe(&with));
            lines.push("without surface tension".into());
            lines.extend(describe(&without));
            lines.push(format!("wrote {}", path.display()));
            Ok(lines)
        }
    }
}
