//! Adaptive Dormand-Prince 5(4) time stepping.

use crate::error::{Error, Result};

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Adapts a closure to [`OdeSystem`].
pub struct FnSystem<F>(pub F);

impl<F> OdeSystem for FnSystem<F>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (self.0)(t, y, dy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub safety: f64,
    pub min_factor: f64,
    pub max_factor: f64,
    /// Proposed steps below this size end the integration.
    pub min_dt: f64,
    /// First trial step; chosen automatically when `None`.
    pub initial_dt: Option<f64>,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            safety: 0.9,
            min_factor: 0.2,
            max_factor: 5.0,
            min_dt: 1e-14,
            initial_dt: None,
            max_steps: 10_000_000,
        }
    }
}

impl StepControl {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        StepControl {
            rel_tol,
            abs_tol,
            ..StepControl::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |field, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{v} must be positive")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("min_dt", self.min_dt)?;
        if !(self.min_factor > 0.0 && self.min_factor < 1.0 && self.max_factor > 1.0) {
            return Err(Error::validation("step factors", "need 0 < min < 1 < max"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub last_dt: f64,
    pub min_dt: f64,
}

/// What the observer sees after every accepted step.
#[derive(Debug)]
pub struct StepInfo<'a> {
    pub t: f64,
    pub y: &'a [f64],
    pub stats: &'a IntegratorStats,
    /// Index into the requested stop times when the step landed on one.
    pub stop: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Cancel,
}

#[derive(Debug)]
pub enum Status {
    Completed,
    Cancelled,
    /// The step size collapsed. `cause` is the breakdown error raised by the
    /// right-hand side on the last rejected trial, if any.
    StepUnderflow { dt: f64, cause: Option<Error> },
    StepLimit,
    /// The right-hand side failed for a reason other than breakdown.
    RhsFailed(Error),
}

/// Final state of an integration. `t` and `y` are the last accepted state.
#[derive(Debug)]
pub struct Outcome {
    pub t: f64,
    pub y: Vec<f64>,
    pub stats: IntegratorStats,
    pub status: Status,
}

impl Outcome {
    pub fn completed(&self) -> bool {
        matches!(self.status, Status::Completed)
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rms(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

/// Integrates from `(t0, y0)` to `t_end`. Steps are shortened to land
/// exactly on each of `stops` (increasing, inside `(t0, t_end]`). The
/// observer runs after every accepted step and may cancel.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &mut S,
    t0: f64,
    y0: Vec<f64>,
    t_end: f64,
    stops: &[f64],
    control: &StepControl,
    mut observer: impl FnMut(&StepInfo) -> Control,
) -> Result<Outcome> {
    control.validate()?;
    if !(t0.is_finite() && t_end.is_finite() && t_end >= t0) {
        return Err(Error::Domain(format!("bad time span [{t0}, {t_end}]")));
    }
    if stops.windows(2).any(|w| w[1] <= w[0]) || stops.iter().any(|&s| s <= t0 || s > t_end) {
        return Err(Error::Domain("stop times must increase within (t0, t_end]".into()));
    }
    let n = y0.len();
    let mut stats = IntegratorStats {
        min_dt: f64::INFINITY,
        ..IntegratorStats::default()
    };
    let mut t = t0;
    let mut y = y0;
    let finish = |t, y, stats, status| Ok(Outcome { t, y, stats, status });
    if t_end == t0 {
        return finish(t, y, stats, Status::Completed);
    }

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    if let Err(e) = sys.rhs(t, &y, &mut k[0]) {
        return finish(t, y, stats, Status::RhsFailed(e));
    }
    stats.rhs_evals += 1;

    let scale = |a: f64, b: f64| control.abs_tol + control.rel_tol * a.abs().max(b.abs());
    let mut dt = match control.initial_dt {
        Some(h) => h,
        None => {
            let d0 = rms(y.iter().map(|&v| v / scale(v, v)), n);
            let d1 = rms(k[0].iter().zip(&y).map(|(&f, &v)| f / scale(v, v)), n);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let h0 = h0.min(t_end - t0);
            let y1: Vec<f64> = (0..n).map(|i| y[i] + h0 * k[0][i]).collect();
            let mut f1 = vec![0.0; n];
            match sys.rhs(t + h0, &y1, &mut f1) {
                Ok(()) => {
                    stats.rhs_evals += 1;
                    let d2 = rms((0..n).map(|i| (f1[i] - k[0][i]) / scale(y[i], y[i])), n) / h0;
                    let m = d1.max(d2);
                    let h1 = if m <= 1e-15 {
                        (h0 * 1e-3).max(1e-6)
                    } else {
                        (0.01 / m).powf(0.2)
                    };
                    (100.0 * h0).min(h1)
                }
                Err(_) => h0 * 1e-3,
            }
        }
    };

    let mut next_stop = 0;
    let mut y_new = vec![0.0; n];
    let mut stage = vec![0.0; n];
    let mut last_rejected = false;
    let mut breakdown: Option<Error> = None;

    loop {
        if stats.accepted + stats.rejected >= control.max_steps {
            return finish(t, y, stats, Status::StepLimit);
        }
        if dt < control.min_dt || t + dt == t {
            return finish(t, y, stats, Status::StepUnderflow { dt, cause: breakdown });
        }
        let target = stops.get(next_stop).copied().unwrap_or(t_end);
        let (h, lands) = if t + dt >= target || target - (t + dt) < 1e-12 * dt {
            (target - t, true)
        } else {
            (dt, false)
        };

        let mut failed = None;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += a * k[j][i];
                }
                stage[i] = y[i] + h * acc;
            }
            if let Err(e) = sys.rhs(t + C[s] * h, &stage, &mut k[s]) {
                failed = Some(e);
                break;
            }
            stats.rhs_evals += 1;
        }
        if let Some(e) = failed {
            if !e.is_breakdown() {
                return finish(t, y, stats, Status::RhsFailed(e));
            }
            breakdown = Some(e);
            stats.rejected += 1;
            last_rejected = true;
            dt = h * control.min_factor;
            continue;
        }
        // the seventh stage is evaluated at the fifth-order solution
        y_new.copy_from_slice(&stage);
        let err = rms(
            (0..n).map(|i| {
                let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum();
                h * e / scale(y[i], y_new[i])
            }),
            n,
        );
        let err = if err.is_finite() { err } else { f64::INFINITY };

        if err <= 1.0 {
            t = if lands { target } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            stats.accepted += 1;
            stats.last_dt = h;
            stats.min_dt = stats.min_dt.min(h);
            breakdown = None;
            let stop = (lands && next_stop < stops.len()).then_some(next_stop);
            if stop.is_some() {
                next_stop += 1;
            }
            let info = StepInfo {
                t,
                y: &y,
                stats: &stats,
                stop,
            };
            if observer(&info) == Control::Cancel {
                return finish(t, y, stats, Status::Cancelled);
            }
            if lands && target == t_end && next_stop >= stops.len() {
                return finish(t, y, stats, Status::Completed);
            }
            let mut factor = if err == 0.0 {
                control.max_factor
            } else {
                (control.safety * err.powf(-0.2)).clamp(control.min_factor, control.max_factor)
            };
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            // a step shortened to hit a stop says little about the natural size
            dt = if lands { dt.max(h * factor) } else { h * factor };
        } else {
            stats.rejected += 1;
            last_rejected = true;
            let factor = if err.is_finite() {
                (control.safety * err.powf(-0.2)).clamp(control.min_factor, 1.0)
            } else {
                control.min_factor
            };
            dt = h * factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Rhs = fn(f64, &[f64], &mut [f64]) -> Result<()>;

    fn exp_system() -> FnSystem<Rhs> {
        FnSystem(|_t, y, dy| {
            dy[0] = y[0];
            Ok(())
        })
    }

    #[test]
    fn exponential_growth() {
        let mut sys = exp_system();
        let out = integrate(&mut sys, 0.0, vec![1.0], 1.0, &[], &StepControl::default(), |_| {
            Control::Continue
        })
        .unwrap();
        assert!(out.completed());
        assert_eq!(out.t, 1.0);
        assert!((out.y[0] - 1f64.exp()).abs() <= 1e-8);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let mut sys = FnSystem(|_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        });
        let t_end = 200.0 * std::f64::consts::PI;
        let out = integrate(&mut sys, 0.0, vec![1.0, 0.0], t_end, &[], &StepControl::default(), |_| {
            Control::Continue
        })
        .unwrap();
        let e = out.y[0] * out.y[0] + out.y[1] * out.y[1];
        assert!((e - 1.0).abs() <= 1e-6, "{e}");
        assert!((out.y[0] - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn lands_on_stops_and_reports_them() {
        let mut sys = exp_system();
        let stops = [0.1, 0.25, 0.5, 1.0];
        let mut seen = vec![];
        let out = integrate(&mut sys, 0.0, vec![1.0], 1.0, &stops, &StepControl::default(), |s| {
            if let Some(i) = s.stop {
                seen.push((i, s.t, s.y[0]));
            }
            Control::Continue
        })
        .unwrap();
        assert!(out.completed());
        assert_eq!(seen.len(), 4);
        for (i, t, y) in seen {
            assert_eq!(t, stops[i]);
            assert!((y - t.exp()).abs() <= 1e-8);
        }
    }

    #[test]
    fn cancellation() {
        let mut sys = exp_system();
        let out = integrate(&mut sys, 0.0, vec![1.0], 1.0, &[], &StepControl::default(), |s| {
            if s.stats.accepted == 3 {
                Control::Cancel
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(matches!(out.status, Status::Cancelled));
        assert_eq!(out.stats.accepted, 3);
        assert!(out.t < 1.0);
    }

    #[test]
    fn finite_time_blow_up_underflows() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let mut sys = FnSystem(|_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
            Ok(())
        });
        let out = integrate(&mut sys, 0.0, vec![1.0], 2.0, &[], &StepControl::default(), |_| {
            Control::Continue
        })
        .unwrap();
        assert!(matches!(out.status, Status::StepUnderflow { .. }), "{:?}", out.status);
        assert!(out.t < 1.0 && out.t > 0.999);
        assert!(out.y[0].is_finite());
    }

    #[test]
    fn breakdown_in_trial_stage_is_retried() {
        // the right-hand side refuses states above 2; the solution reaches 1.5
        let mut sys = FnSystem(|_t: f64, y: &[f64], dy: &mut [f64]| {
            if y[0] > 2.0 {
                return Err(Error::Corruption { what: "test", index: 0 });
            }
            dy[0] = 1.0 - y[0];
            Ok(())
        });
        let control = StepControl {
            initial_dt: Some(50.0),
            ..StepControl::default()
        };
        let out = integrate(&mut sys, 0.0, vec![3.0 / 2.0], 5.0, &[], &control, |_| Control::Continue).unwrap();
        assert!(out.completed());
        assert!(out.stats.rejected > 0);
    }

    #[test]
    fn usage_errors_propagate() {
        let mut sys = FnSystem(|_t: f64, _y: &[f64], _dy: &mut [f64]| {
            Err(Error::Domain("nope".into()))
        });
        let out = integrate(&mut sys, 0.0, vec![1.0], 1.0, &[], &StepControl::default(), |_| {
            Control::Continue
        })
        .unwrap();
        assert!(matches!(out.status, Status::RhsFailed(Error::Domain(_))));
        assert!(integrate(&mut exp_system(), 0.0, vec![1.0], 1.0, &[2.0], &StepControl::default(), |_| Control::Continue).is_err());
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let mut errs = vec![];
        for rtol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
            let mut sys = exp_system();
            let out = integrate(
                &mut sys,
                0.0,
                vec![1.0],
                1.0,
                &[],
                &StepControl::with_tolerances(rtol, 1e-12),
                |_| Control::Continue,
            )
            .unwrap();
            errs.push((out.y[0] - 1f64.exp()).abs());
        }
        assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    }
}
