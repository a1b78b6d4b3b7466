//! The shallow-water (`mu = 0`) limit with surface tension, written in the
//! variables `(zeta, vbar)`:
//!
//! ```text
//! zeta_t + (H(eps zeta) vbar)_x = 0,
//! vbar_t + (gamma+delta) zeta_x + eps/2 (H'(eps zeta) vbar^2)_x = (gamma+delta) Bo^-1 zeta_xxx,
//! ```
//!
//! with `H(X) = (1 - X)(1/delta + X) / ((1 - X) + gamma (1/delta + X))`.

use crate::diagnostics::{self, DiagnosticsRow};
use crate::error::{Error, Layer, Result};
use crate::gn::MIN_DEPTH;
use crate::integrator::{integrate, Control, OdeSystem, StepControl};
use crate::params::PhysParams;
use crate::spectral::{check_finite, Field, Grid};

/// `H(X) = h1 h2 / (h1 + gamma h2)` with `h1 = 1 - X`, `h2 = 1/delta + X`.
pub fn depth_function(p: &PhysParams, x: f64) -> f64 {
    let (h1, h2) = (1.0 - x, p.lower_depth() + x);
    h1 * h2 / (h1 + p.gamma * h2)
}

/// `H'(X) = (h1^2 - gamma h2^2) / (h1 + gamma h2)^2`.
pub fn depth_function_prime(p: &PhysParams, x: f64) -> f64 {
    let (h1, h2) = (1.0 - x, p.lower_depth() + x);
    let s = h1 + p.gamma * h2;
    (h1 * h1 - p.gamma * h2 * h2) / (s * s)
}

/// `H''(X) = -2 gamma (h1 + h2)^2 / (h1 + gamma h2)^3`.
pub fn depth_function_second(p: &PhysParams, x: f64) -> f64 {
    let (h1, h2) = (1.0 - x, p.lower_depth() + x);
    let s = h1 + p.gamma * h2;
    -2.0 * p.gamma * (h1 + h2).powi(2) / (s * s * s)
}

/// Linear phase speed `sqrt(H(0) (gamma+delta) (1 + Bo^-1 k^2))`.
pub fn linear_phase_speed(p: &PhysParams, k: f64) -> f64 {
    (depth_function(p, 0.0) * p.gamma_plus_delta() * (1.0 + p.inv_bond * k * k)).sqrt()
}

#[derive(Clone, Debug)]
pub struct SvModel {
    params: PhysParams,
    grid: Grid,
    d_plain: Vec<f64>,
}

impl SvModel {
    pub fn new(params: PhysParams, grid: Grid, dealias: bool) -> Result<Self> {
        params.validate()?;
        let mut d_plain = grid.derivative_symbol();
        if dealias {
            for (d, m) in d_plain.iter_mut().zip(grid.two_thirds_mask().values()) {
                *d *= m;
            }
        }
        Ok(SvModel {
            params,
            grid,
            d_plain,
        })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn ddx(&self, u: &[f64]) -> Vec<f64> {
        self.grid.apply_imag_symbol(u, &self.grid.derivative_symbol())
    }

    fn check_depths(&self, zeta: &[f64]) -> Result<()> {
        let eps = self.params.epsilon;
        for (j, &z) in zeta.iter().enumerate() {
            let (h1, h2) = (1.0 - eps * z, self.params.lower_depth() + eps * z);
            if !(h1 > MIN_DEPTH) {
                return Err(Error::Cavitation { layer: Layer::Upper, min_depth: h1, x: self.grid.node(j) });
            }
            if !(h2 > MIN_DEPTH) {
                return Err(Error::Cavitation { layer: Layer::Lower, min_depth: h2, x: self.grid.node(j) });
            }
        }
        Ok(())
    }

    pub(crate) fn rhs_raw(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let p = &self.params;
        let n = self.grid.n();
        check_finite("state", y)?;
        let (zeta, vbar) = y.split_at(n);
        self.check_depths(zeta)?;
        let gd = p.gamma_plus_delta();
        let eps = p.epsilon;
        let flux: Vec<f64> = (0..n)
            .map(|i| {
                let (h1, h2) = (1.0 - eps * zeta[i], p.lower_depth() + eps * zeta[i]);
                vbar[i] * h1 * h2 / (h1 + p.gamma * h2)
            })
            .collect();
        let mut g: Vec<f64> = (0..n)
            .map(|i| gd * zeta[i] + 0.5 * eps * depth_function_prime(p, eps * zeta[i]) * vbar[i] * vbar[i])
            .collect();
        if p.inv_bond != 0.0 {
            let zxx = self.ddx(&self.ddx(zeta));
            for i in 0..n {
                g[i] -= gd * p.inv_bond * zxx[i];
            }
        }
        let fx = self.grid.apply_imag_symbol(&flux, &self.d_plain);
        let gx = self.grid.apply_imag_symbol(&g, &self.d_plain);
        let (dz, dv) = dy.split_at_mut(n);
        for i in 0..n {
            dz[i] = -fx[i];
            dv[i] = -gx[i];
        }
        check_finite("right-hand side", dy)
    }

    pub fn rhs(&self, zeta: &Field, vbar: &Field) -> Result<(Field, Field)> {
        if zeta.grid() != &self.grid || vbar.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n();
        let mut y = zeta.values().to_vec();
        y.extend_from_slice(vbar.values());
        let mut dy = vec![0.0; 2 * n];
        self.rhs_raw(&y, &mut dy)?;
        let dv = dy.split_off(n);
        Ok((Field::new(&self.grid, dy)?, Field::new(&self.grid, dv)?))
    }

    /// `min_x (gamma+delta) + eps^2/2 H''(eps zeta) vbar^2`.
    pub fn hyperbolicity_margin(&self, zeta: &Field, vbar: &Field) -> Result<f64> {
        let p = &self.params;
        let m = zeta.zip_map(vbar, |z, v| {
            p.gamma_plus_delta() + 0.5 * p.epsilon * p.epsilon * depth_function_second(p, p.epsilon * z) * v * v
        })?;
        Ok(m.values().iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// The diagnostics row, with `w = H(eps zeta) vbar` and the energy
    /// `int (gamma+delta) zeta^2 + capillary + H vbar^2`.
    pub fn diagnostics(&self, t: f64, zeta: &Field, vbar: &Field, k_band: f64) -> Result<DiagnosticsRow> {
        let p = &self.params;
        self.check_depths(zeta.values())?;
        let w = zeta.zip_map(vbar, |z, v| depth_function(p, p.epsilon * z) * v)?;
        let gd = p.gamma_plus_delta();
        let zx = self.ddx(zeta.values());
        let density: Vec<f64> = (0..self.grid.n())
            .map(|i| {
                let (z, v) = (zeta.values()[i], vbar.values()[i]);
                gd * z * z + gd * p.inv_bond * zx[i] * zx[i] + w.values()[i] * v
            })
            .collect();
        Ok(DiagnosticsRow {
            t,
            z: diagnostics::mass(zeta),
            v: diagnostics::mass(vbar),
            i: diagnostics::impulse(zeta, vbar)?,
            h: self.grid.integral(&density),
            m: diagnostics::momentum(p, &w),
            c: diagnostics::centroid(zeta, &w, t)?,
            hyp_margin: self.hyperbolicity_margin(zeta, vbar)?,
            high_band: diagnostics::band_max(zeta, k_band),
        })
    }
}

impl OdeSystem for SvModel {
    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.rhs_raw(y, dy)
    }
}

/// Seeds the right-going linear mode `zeta = amplitude cos(k x)` on grid
/// mode `mode`, runs to `t_end`, and returns the phase speed read off the
/// rotation of `zeta_hat(k)`. `t_end` must keep the rotation below `pi`.
pub fn measure_phase_speed(
    params: &PhysParams,
    grid: &Grid,
    mode: usize,
    amplitude: f64,
    t_end: f64,
    control: &StepControl,
) -> Result<f64> {
    if mode == 0 || mode >= grid.n() / 2 {
        return Err(Error::Domain(format!("mode {mode} outside (0, n/2)")));
    }
    let k = grid.wavenumber(mode);
    let c = linear_phase_speed(params, k);
    let h0 = depth_function(params, 0.0);
    let zeta: Vec<f64> = grid.nodes().iter().map(|x| amplitude * (k * x).cos()).collect();
    let vbar: Vec<f64> = zeta.iter().map(|z| c / h0 * z).collect();
    let before = grid.forward(&zeta)[mode];
    let mut y = zeta;
    y.extend(vbar);
    let mut model = SvModel::new(*params, grid.clone(), false)?;
    let out = integrate(&mut model, 0.0, y, t_end, &[], control, |_| Control::Continue)?;
    if !out.completed() {
        return Err(Error::Domain(format!("phase-speed run stopped early: {:?}", out.status)));
    }
    let after = grid.forward(&out.y[..grid.n()])[mode];
    Ok(-(after / before).arg() / (k * t_end))
}
