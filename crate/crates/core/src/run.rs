//! Running a configured experiment: initial data, time stepping,
//! diagnostics and (optionally) a run directory on disk.

use std::path::Path;
use std::time::Instant;

use crate::config::{ExperimentConfig, InitialCondition, ModelKind};
use crate::diagnostics::{self, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::gn::{CgStats, GnModel, SolverOptions};
use crate::integrator::{integrate, Control, IntegratorStats, OdeSystem, Status, StepControl};
use crate::io::{ManifestInfo, RunDir};
use crate::multipliers::MultiplierSpec;
use crate::params::PhysParams;
use crate::saint_venant::SvModel;
use crate::spectral::{Field, Grid};
use crate::stability::{model_coeffs, Coefficients};

/// Either evolution system, behind one interface.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Dynamics {
    GreenNaghdi(GnModel),
    SaintVenant(SvModel),
}

impl Dynamics {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        Ok(match cfg.model {
            ModelKind::GreenNaghdi => Dynamics::GreenNaghdi(GnModel::new(
                cfg.params,
                grid,
                cfg.multiplier_spec()?,
                SolverOptions {
                    cg_tol: cfg.cg_tol,
                    cg_max_iter: cfg.cg_max_iter,
                    dealias: cfg.dealias,
                },
            )?),
            ModelKind::SaintVenant => Dynamics::SaintVenant(SvModel::new(cfg.params, grid, cfg.dealias)?),
        })
    }

    pub fn grid(&self) -> &Grid {
        match self {
            Dynamics::GreenNaghdi(m) => m.grid(),
            Dynamics::SaintVenant(m) => m.grid(),
        }
    }

    pub fn params(&self) -> &PhysParams {
        match self {
            Dynamics::GreenNaghdi(m) => m.params(),
            Dynamics::SaintVenant(m) => m.params(),
        }
    }

    fn split(&self, y: &[f64]) -> Result<(Field, Field)> {
        let n = self.grid().n();
        Ok((
            Field::new(self.grid(), y[..n].to_vec())?,
            Field::new(self.grid(), y[n..].to_vec())?,
        ))
    }

    /// The flux `w` of the state `(zeta, v)` (or `(zeta, vbar)`).
    pub fn flux(&mut self, y: &[f64]) -> Result<Field> {
        let (zeta, v) = self.split(y)?;
        match self {
            Dynamics::GreenNaghdi(m) => m.solve(&zeta, &v),
            Dynamics::SaintVenant(m) => {
                let p = *m.params();
                zeta.zip_map(&v, |z, v| crate::saint_venant::depth_function(&p, p.epsilon * z) * v)
            }
        }
    }

    pub fn diagnostics(&mut self, t: f64, y: &[f64], k_band: f64) -> Result<DiagnosticsRow> {
        let (zeta, v) = self.split(y)?;
        match self {
            Dynamics::GreenNaghdi(m) => diagnostics::evaluate(m, t, &zeta, &v, k_band),
            Dynamics::SaintVenant(m) => m.diagnostics(t, &zeta, &v, k_band),
        }
    }

    pub fn cg_stats(&self) -> CgStats {
        match self {
            Dynamics::GreenNaghdi(m) => m.cg_stats(),
            Dynamics::SaintVenant(_) => CgStats::default(),
        }
    }
}

impl OdeSystem for Dynamics {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        match self {
            Dynamics::GreenNaghdi(m) => OdeSystem::rhs(m, t, y, dy),
            Dynamics::SaintVenant(m) => OdeSystem::rhs(m, t, y, dy),
        }
    }
}

/// Linear coefficients of the constant-shear state used by the `shear`
/// initial condition: the configured multipliers for Green-Naghdi, the
/// `mu = 0` limit for Saint-Venant.
pub fn shear_coefficients(cfg: &ExperimentConfig, k: f64) -> Result<Coefficients> {
    Ok(match cfg.model {
        ModelKind::GreenNaghdi => model_coeffs(k, &cfg.params, &cfg.multiplier_spec()?, cfg.shear_wbar),
        ModelKind::SaintVenant => {
            let p = PhysParams { mu: 0.0, ..cfg.params };
            model_coeffs(k, &p, &MultiplierSpec::Identity, cfg.shear_wbar)
        }
    })
}

/// Initial `(zeta, v)` concatenated.
///
/// The shear state is `zeta = A cos(k0 x)` on top of the constant shear
/// `v = (gamma + delta) wbar`, with the `v` perturbation chosen along the
/// growing eigenvector when mode `k0` is unstable (and the right-going
/// neutral one otherwise).
pub fn initial_state(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let grid = cfg.grid()?;
    let n = grid.n();
    let x = grid.nodes();
    let mut y = vec![0.0; 2 * n];
    match cfg.initial_condition {
        InitialCondition::Rest => {}
        InitialCondition::Gaussian => {
            for j in 0..n {
                y[j] = cfg.ic_amplitude * (-cfg.ic_width * x[j] * x[j]).exp();
            }
        }
        InitialCondition::Shear => {
            let k = grid.wavenumber(cfg.perturb_mode);
            let c = shear_coefficients(cfg, k)?;
            let ab = c.a * c.b;
            let base = cfg.params.gamma_plus_delta() * cfg.shear_wbar;
            let a = cfg.perturb_amplitude;
            for j in 0..n {
                let (s, co) = (k * x[j]).sin_cos();
                y[j] = a * co;
                y[n + j] = base
                    + if ab < 0.0 {
                        -(-ab).sqrt() / c.b * a * s
                    } else {
                        ab.sqrt() / c.b * a * co
                    };
            }
        }
    }
    Ok(y)
}

/// How a run ended.
#[derive(Debug)]
pub enum RunStatus {
    Completed,
    /// The solution broke down (step-size collapse, loss of positive depth,
    /// failed solve or non-finite values): the expected fate of a
    /// Kelvin-Helmholtz unstable flow.
    BlowUp { reason: String },
}

impl RunStatus {
    pub fn is_blow_up(&self) -> bool {
        matches!(self, RunStatus::BlowUp { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub zeta: Field,
    pub w: Field,
}

#[derive(Debug)]
pub struct RunSummary {
    pub status: RunStatus,
    pub t_final: f64,
    pub stats: IntegratorStats,
    pub cg: CgStats,
    pub wall_time_s: f64,
    /// Every recorded diagnostics row, starting at `t = 0`.
    pub diagnostics: Vec<DiagnosticsRow>,
    /// Snapshots at `0`, each requested time, `t_end`, and the last healthy
    /// state of a blown-up run.
    pub snapshots: Vec<Snapshot>,
    /// Final `(zeta, v)`.
    pub final_state: Vec<f64>,
}

impl RunSummary {
    pub fn first(&self) -> &DiagnosticsRow {
        &self.diagnostics[0]
    }

    pub fn last(&self) -> &DiagnosticsRow {
        self.diagnostics.last().expect("at least the initial row")
    }

    /// `last - first` for `Z, V, I, H`.
    pub fn drift(&self) -> [f64; 4] {
        let (a, b) = (self.first(), self.last());
        [b.z - a.z, b.v - a.v, b.i - a.i, b.h - a.h]
    }

    pub fn max_high_band(&self) -> f64 {
        self.diagnostics.iter().map(|r| r.high_band).fold(0.0, f64::max)
    }
}

/// Runs `cfg`. With `out`, writes a run directory there (refusing to
/// replace a finished run unless `force`).
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>, force: bool) -> Result<RunSummary> {
    run_with_initial(cfg, initial_state(cfg)?, out, force)
}

/// As [`run_experiment`], from a given initial `(zeta, v)`.
pub fn run_with_initial(
    cfg: &ExperimentConfig,
    y0: Vec<f64>,
    out: Option<&Path>,
    force: bool,
) -> Result<RunSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let mut dynamics = Dynamics::from_config(cfg)?;
    let n = dynamics.grid().n();
    if y0.len() != 2 * n {
        return Err(Error::GridMismatch);
    }
    let mut probe = dynamics.clone();
    let k_band = cfg.k_band_or_default();
    let mut writer = match out {
        Some(dir) => Some(RunDir::create(dir, &cfg.serialize(), force)?),
        None => None,
    };

    let mut diagnostics = vec![probe.diagnostics(0.0, &y0, k_band)?];
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        zeta: Field::new(dynamics.grid(), y0[..n].to_vec())?,
        w: probe.flux(&y0)?,
    }];
    if let Some(wr) = writer.as_mut() {
        wr.append_diagnostics(&diagnostics[0])?;
        wr.snapshot(0.0, &snapshots[0].zeta, &snapshots[0].w, cfg.spectra)?;
    }

    let mut stops = cfg.snapshot_times.clone();
    if stops.last() != Some(&cfg.t_end) {
        stops.push(cfg.t_end);
    }
    let control = StepControl::with_tolerances(cfg.rel_tol, cfg.abs_tol);
    let mut failure: Option<Error> = None;
    let mut breakdown: Option<String> = None;

    let outcome = integrate(&mut dynamics, 0.0, y0, cfg.t_end, &stops, &control, |step| {
        let mut lost = None;
        if cfg.blowup_band_ratio > 0.0 {
            let ratio = Field::new(probe.grid(), step.y[..n].to_vec())
                .map(|z| diagnostics::band_ratio(&z, k_band))
                .unwrap_or(f64::INFINITY);
            if !(ratio <= cfg.blowup_band_ratio) {
                lost = Some(format!(
                    "interface no longer resolved at t = {:.6} (high-band ratio {ratio:.3e} above {:.3e})",
                    step.t, cfg.blowup_band_ratio
                ));
            }
        }
        let record = lost.is_some() || step.stop.is_some() || step.stats.accepted % cfg.diag_stride == 0;
        if !record {
            return Control::Continue;
        }
        let result = (|| -> Result<()> {
            let row = probe.diagnostics(step.t, step.y, k_band)?;
            if !row.is_finite() {
                return Err(Error::Corruption { what: "diagnostics", index: 0 });
            }
            if let Some(wr) = writer.as_mut() {
                wr.append_diagnostics(&row)?;
            }
            diagnostics.push(row);
            if step.stop.is_some() {
                let snap = Snapshot {
                    t: step.t,
                    zeta: Field::new(probe.grid(), step.y[..n].to_vec())?,
                    w: probe.flux(step.y)?,
                };
                if let Some(wr) = writer.as_mut() {
                    wr.snapshot(snap.t, &snap.zeta, &snap.w, cfg.spectra)?;
                }
                snapshots.push(snap);
            }
            Ok(())
        })();
        match result {
            Ok(()) if lost.is_some() => {
                breakdown = lost.take();
                Control::Cancel
            }
            Ok(()) => Control::Continue,
            Err(e) if e.is_breakdown() => {
                breakdown = Some(e.to_string());
                Control::Cancel
            }
            Err(e) => {
                failure = Some(e);
                Control::Cancel
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let status = match outcome.status {
        Status::Completed => RunStatus::Completed,
        Status::Cancelled => RunStatus::BlowUp {
            reason: breakdown.unwrap_or_else(|| "cancelled".into()),
        },
        Status::StepUnderflow { dt, cause } => RunStatus::BlowUp {
            reason: match cause {
                Some(e) => format!("step size collapsed to {dt:.3e} at t = {:.6} ({e})", outcome.t),
                None => format!("step size collapsed to {dt:.3e} at t = {:.6}", outcome.t),
            },
        },
        Status::StepLimit => RunStatus::BlowUp {
            reason: "step limit reached".into(),
        },
        Status::RhsFailed(e) if e.is_breakdown() => RunStatus::BlowUp { reason: e.to_string() },
        Status::RhsFailed(e) => return Err(e),
    };

    if status.is_blow_up() {
        // keep the last healthy state for inspection
        let last_t = outcome.t;
        if snapshots.last().map(|s| s.t) != Some(last_t) {
            if let Ok(w) = probe.flux(&outcome.y) {
                let snap = Snapshot {
                    t: last_t,
                    zeta: Field::new(probe.grid(), outcome.y[..n].to_vec())?,
                    w,
                };
                if let Some(wr) = writer.as_mut() {
                    wr.snapshot(snap.t, &snap.zeta, &snap.w, cfg.spectra)?;
                }
                snapshots.push(snap);
            }
        }
    }

    let cg = dynamics.cg_stats();
    let wall_time_s = start.elapsed().as_secs_f64();
    if let Some(wr) = writer {
        wr.finish(&ManifestInfo {
            status: match &status {
                RunStatus::Completed => "completed".into(),
                RunStatus::BlowUp { reason } => format!("blow-up: {reason}"),
            },
            t_final: outcome.t,
            wall_time_s,
            accepted_steps: outcome.stats.accepted,
            rejected_steps: outcome.stats.rejected,
            rhs_evals: outcome.stats.rhs_evals,
            cg_solves: cg.solves,
            cg_iterations: cg.iterations,
        })?;
    }
    Ok(RunSummary {
        status,
        t_final: outcome.t,
        stats: outcome.stats,
        cg,
        wall_time_s,
        diagnostics,
        snapshots,
        final_state: outcome.y,
    })
}
