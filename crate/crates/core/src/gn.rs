//! The nonlocal operator of the modified Green-Naghdi system, its inversion,
//! and the Hamiltonian right-hand side.
//!
//! Unknowns are the interface deviation `zeta` and the shear momentum `v`.
//! The shear velocity `w` solves `A[zeta] w = v`, where
//!
//! ```text
//! A w = (h1 + gamma h2) / (h1 h2) w + mu (Q2[h2](w/h2) + gamma Q1[h1](w/h1)),
//! Q_i[h] u = -1/3 h^-1 D_i (h^3 D_i u),   D_i = d/dx F_i(sqrt(mu) D),
//! ```
//!
//! with `h1 = 1 - eps zeta` and `h2 = 1/delta + eps zeta`. The evolution is
//! `zeta_t = -w_x`, `v_t = -(dH/dzeta)_x`.

use crate::error::{Error, Layer, Result};
use crate::integrator::OdeSystem;
use crate::multipliers::MultiplierSpec;
use crate::params::PhysParams;
use crate::spectral::{check_finite, Field, Grid};

/// Depths at or below this value are reported as cavitation.
pub const MIN_DEPTH: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual at which conjugate gradient stops.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Apply the two-thirds mask to the right-hand side.
    pub dealias: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cg_tol: 1e-12,
            cg_max_iter: 200,
            dealias: false,
        }
    }
}

/// Running counters of the linear solves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CgStats {
    pub solves: usize,
    pub iterations: usize,
    pub max_iterations: usize,
}

/// Symbol of the inverse operator on a flat interface with depths
/// `(h1, h2)`: `1 / ((h1 + gamma h2)/(h1 h2) + mu/3 (h2 D2^2 + gamma h1 D1^2))`.
fn flat_inverse(p: &PhysParams, h1: f64, h2: f64, d_upper: &[f64], d_lower: &[f64]) -> Vec<f64> {
    let base = (h1 + p.gamma * h2) / (h1 * h2);
    d_upper
        .iter()
        .zip(d_lower)
        .map(|(a, b)| 1.0 / (base + p.mu / 3.0 * (h2 * b * b + p.gamma * h1 * a * a)))
        .collect()
}

/// Preconditioned conjugate gradient for a symmetric positive definite
/// operator. `x` holds the initial guess on entry and the solution on exit.
/// Returns the iteration count.
pub fn conjugate_gradient(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    mut precondition: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut history = Vec::new();
    let mut res = dot(&r, &r).sqrt() / b_norm;
    history.push(res);
    if res <= tol {
        return Ok(0);
    }
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Solver {
                iterations: it,
                residual: res,
                history,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = dot(&r, &r).sqrt() / b_norm;
        if res <= tol {
            // the recurrence can drift from b - A x; confirm with the true
            // residual and restart from it when they disagree
            apply(x, &mut r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            res = dot(&r, &r).sqrt() / b_norm;
            history.push(res);
            if res <= tol {
                return Ok(it);
            }
            precondition(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        history.push(res);
        if !res.is_finite() {
            break;
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver {
        iterations: max_iter,
        residual: res,
        history,
    })
}

/// The Green-Naghdi operator and right-hand side for one parameter set,
/// grid and multiplier pair.
#[derive(Clone, Debug)]
pub struct GnModel {
    params: PhysParams,
    grid: Grid,
    multiplier: MultiplierSpec,
    options: SolverOptions,
    d_upper: Vec<f64>,
    d_lower: Vec<f64>,
    d_plain: Vec<f64>,
    /// Exact inverse of the operator on the flat interface with depths
    /// `precond_depths`, refreshed to the mean depths of each solve.
    precond: Vec<f64>,
    precond_depths: (f64, f64),
    mask: Option<Vec<f64>>,
    warm: Vec<f64>,
    stats: CgStats,
}

impl GnModel {
    pub fn new(
        params: PhysParams,
        grid: Grid,
        multiplier: MultiplierSpec,
        options: SolverOptions,
    ) -> Result<Self> {
        params.validate()?;
        if !(options.cg_tol > 0.0) {
            return Err(Error::validation("cg_tol", "must be positive"));
        }
        if options.cg_max_iter == 0 {
            return Err(Error::validation("cg_max_iter", "must be positive"));
        }
        let d_plain = grid.derivative_symbol();
        let layer_symbol = |layer| -> Result<Vec<f64>> {
            let mut s = Vec::with_capacity(grid.modes());
            for (m, &k) in d_plain.iter().enumerate() {
                let f = multiplier.eval(layer, grid.wavenumber(m), params.mu);
                if !f.is_finite() {
                    return Err(Error::Domain(format!("multiplier not finite at k = {k}")));
                }
                s.push(k * f);
            }
            Ok(s)
        };
        let d_upper = layer_symbol(Layer::Upper)?;
        let d_lower = layer_symbol(Layer::Lower)?;
        let precond = flat_inverse(&params, 1.0, params.lower_depth(), &d_upper, &d_lower);
        let mask = options
            .dealias
            .then(|| grid.two_thirds_mask().values().to_vec());
        Ok(GnModel {
            params,
            warm: vec![0.0; grid.n()],
            grid,
            multiplier,
            options,
            d_upper,
            d_lower,
            d_plain,
            precond,
            precond_depths: (1.0, params.lower_depth()),
            mask,
            stats: CgStats::default(),
        })
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn multiplier(&self) -> &MultiplierSpec {
        &self.multiplier
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn cg_stats(&self) -> CgStats {
        self.stats
    }

    /// Layer depths `(h1, h2)`, failing with [`Error::Cavitation`] where
    /// either drops to [`MIN_DEPTH`].
    pub fn depths(&self, zeta: &Field) -> Result<(Field, Field)> {
        self.check_grid(zeta)?;
        let (h1, h2) = self.depths_raw(zeta.values())?;
        Ok((Field::from_raw(&self.grid, h1), Field::from_raw(&self.grid, h2)))
    }

    /// `A[zeta] w`.
    pub fn apply_a(&self, zeta: &Field, w: &Field) -> Result<Field> {
        self.check_grid(zeta)?;
        self.check_grid(w)?;
        let (h1, h2) = self.depths_raw(zeta.values())?;
        let mut out = vec![0.0; self.grid.n()];
        self.apply_a_raw(&h1, &h2, w.values(), &mut out);
        Ok(Field::from_raw(&self.grid, out))
    }

    /// Solves `A[zeta] w = v`.
    pub fn solve(&mut self, zeta: &Field, v: &Field) -> Result<Field> {
        self.check_grid(zeta)?;
        self.check_grid(v)?;
        let (h1, h2) = self.depths_raw(zeta.values())?;
        let w = self.solve_raw(&h1, &h2, v.values())?;
        Ok(Field::from_raw(&self.grid, w))
    }

    /// Variational derivative `dH/dzeta` at fixed `v`, together with `w`.
    pub fn hamiltonian_gradient(&mut self, zeta: &Field, v: &Field) -> Result<(Field, Field)> {
        self.check_grid(zeta)?;
        self.check_grid(v)?;
        let (h1, h2) = self.depths_raw(zeta.values())?;
        let w = self.solve_raw(&h1, &h2, v.values())?;
        let g = self.gradient_raw(zeta.values(), &h1, &h2, &w);
        Ok((
            Field::from_raw(&self.grid, g),
            Field::from_raw(&self.grid, w),
        ))
    }

    /// `(zeta_t, v_t)`.
    pub fn rhs(&mut self, zeta: &Field, v: &Field) -> Result<(Field, Field)> {
        self.check_grid(zeta)?;
        self.check_grid(v)?;
        let n = self.grid.n();
        let mut y = Vec::with_capacity(2 * n);
        y.extend_from_slice(zeta.values());
        y.extend_from_slice(v.values());
        let mut dy = vec![0.0; 2 * n];
        self.rhs_raw(&y, &mut dy)?;
        let dv = dy.split_off(n);
        Ok((Field::from_raw(&self.grid, dy), Field::from_raw(&self.grid, dv)))
    }

    /// Capillary contribution to `v_t`:
    /// `(gamma + delta) Bo^-1 d^2/dx^2 (zeta_x / sqrt(1 + mu eps^2 zeta_x^2))`.
    pub fn surface_tension_term(&self, zeta: &Field) -> Result<Field> {
        self.check_grid(zeta)?;
        let c = self.curvature_flux(zeta.values());
        let d = self.ddx(&self.ddx(&c));
        let s = self.params.gamma_plus_delta() * self.params.inv_bond;
        Ok(Field::from_raw(&self.grid, d.into_iter().map(|x| s * x).collect()))
    }

    /// Right-hand side on the concatenated state `(zeta, v)`.
    pub(crate) fn rhs_raw(&mut self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.grid.n();
        check_finite("state", y)?;
        let (zeta, v) = y.split_at(n);
        let (h1, h2) = self.depths_raw(zeta)?;
        let w = self.solve_raw(&h1, &h2, v)?;
        let g = self.gradient_raw(zeta, &h1, &h2, &w);
        let (dz, dv) = dy.split_at_mut(n);
        let (wx, gx) = match &self.mask {
            Some(mask) => {
                let sym: Vec<f64> = self.d_plain.iter().zip(mask).map(|(a, b)| a * b).collect();
                (
                    self.grid.apply_imag_symbol(&w, &sym),
                    self.grid.apply_imag_symbol(&g, &sym),
                )
            }
            None => (self.ddx(&w), self.ddx(&g)),
        };
        for i in 0..n {
            dz[i] = -wx[i];
            dv[i] = -gx[i];
        }
        check_finite("right-hand side", dy)
    }

    pub(crate) fn depths_raw(&self, zeta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let eps = self.params.epsilon;
        let h2_rest = self.params.lower_depth();
        let mut h1 = Vec::with_capacity(zeta.len());
        let mut h2 = Vec::with_capacity(zeta.len());
        for (j, &z) in zeta.iter().enumerate() {
            let a = 1.0 - eps * z;
            let b = h2_rest + eps * z;
            if !(a > MIN_DEPTH && b > MIN_DEPTH) {
                let (layer, min_depth) = if !(a > MIN_DEPTH) {
                    (Layer::Upper, a)
                } else {
                    (Layer::Lower, b)
                };
                return Err(Error::Cavitation {
                    layer,
                    min_depth,
                    x: self.grid.node(j),
                });
            }
            h1.push(a);
            h2.push(b);
        }
        Ok((h1, h2))
    }

    fn check_grid(&self, f: &Field) -> Result<()> {
        if f.grid() == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn ddx(&self, u: &[f64]) -> Vec<f64> {
        self.grid.apply_imag_symbol(u, &self.d_plain)
    }

    fn layer_d(&self, layer: Layer, u: &[f64]) -> Vec<f64> {
        let s = match layer {
            Layer::Upper => &self.d_upper,
            Layer::Lower => &self.d_lower,
        };
        self.grid.apply_imag_symbol(u, s)
    }

    /// `D_i u` and `h^-1 D_i (h^3 D_i u)`.
    fn layer_terms(&self, layer: Layer, h: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let du = self.layer_d(layer, u);
        let flux: Vec<f64> = h.iter().zip(&du).map(|(h, d)| h * h * h * d).collect();
        let mut inner = self.layer_d(layer, &flux);
        for (x, h) in inner.iter_mut().zip(h) {
            *x /= h;
        }
        (du, inner)
    }

    pub(crate) fn apply_a_raw(&self, h1: &[f64], h2: &[f64], w: &[f64], out: &mut [f64]) {
        let gamma = self.params.gamma;
        for i in 0..w.len() {
            out[i] = (h1[i] + gamma * h2[i]) / (h1[i] * h2[i]) * w[i];
        }
        let mu = self.params.mu;
        if mu == 0.0 {
            return;
        }
        let u2: Vec<f64> = w.iter().zip(h2).map(|(w, h)| w / h).collect();
        let (_, q2) = self.layer_terms(Layer::Lower, h2, &u2);
        for i in 0..w.len() {
            out[i] -= mu / 3.0 * q2[i];
        }
        if gamma != 0.0 {
            let u1: Vec<f64> = w.iter().zip(h1).map(|(w, h)| w / h).collect();
            let (_, q1) = self.layer_terms(Layer::Upper, h1, &u1);
            for i in 0..w.len() {
                out[i] -= gamma * mu / 3.0 * q1[i];
            }
        }
    }

    pub(crate) fn solve_raw(&mut self, h1: &[f64], h2: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let gamma = self.params.gamma;
        if self.params.mu == 0.0 {
            return Ok((0..v.len())
                .map(|i| v[i] * h1[i] * h2[i] / (h1[i] + gamma * h2[i]))
                .collect());
        }
        let n = v.len() as f64;
        let depths = (h1.iter().sum::<f64>() / n, h2.iter().sum::<f64>() / n);
        if depths != self.precond_depths {
            self.precond = flat_inverse(&self.params, depths.0, depths.1, &self.d_upper, &self.d_lower);
            self.precond_depths = depths;
        }
        let mut x = self.warm.clone();
        let this = &*self;
        let iterations = conjugate_gradient(
            |p, out| this.apply_a_raw(h1, h2, p, out),
            |r, z| z.copy_from_slice(&this.grid.apply_real_symbol(r, &this.precond)),
            v,
            &mut x,
            self.options.cg_tol,
            self.options.cg_max_iter,
        )?;
        self.stats.solves += 1;
        self.stats.iterations += iterations;
        self.stats.max_iterations = self.stats.max_iterations.max(iterations);
        self.warm.copy_from_slice(&x);
        Ok(x)
    }

    fn curvature_flux(&self, zeta: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let s = p.mu * p.epsilon * p.epsilon;
        self.ddx(zeta)
            .into_iter()
            .map(|zx| zx / (1.0 + s * zx * zx).sqrt())
            .collect()
    }

    /// `dH/dzeta` at fixed `v`, given the depths and `w`.
    pub(crate) fn gradient_raw(&self, zeta: &[f64], h1: &[f64], h2: &[f64], w: &[f64]) -> Vec<f64> {
        let p = &self.params;
        let gd = p.gamma_plus_delta();
        let n = zeta.len();
        let mut g: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b) = (h1[i] * h1[i], h2[i] * h2[i]);
                gd * zeta[i] + 0.5 * p.epsilon * (a - p.gamma * b) / (a * b) * w[i] * w[i]
            })
            .collect();
        if p.inv_bond != 0.0 {
            let cap = self.ddx(&self.curvature_flux(zeta));
            for i in 0..n {
                g[i] -= gd * p.inv_bond * cap[i];
            }
        }
        if p.mu != 0.0 {
            let me = p.mu * p.epsilon;
            let r2 = self.r_term(Layer::Lower, h2, w);
            for i in 0..n {
                g[i] -= me * r2[i];
            }
            if p.gamma != 0.0 {
                let r1 = self.r_term(Layer::Upper, h1, w);
                for i in 0..n {
                    g[i] += me * p.gamma * r1[i];
                }
            }
        }
        g
    }

    /// `int (gamma+delta) zeta^2 + 2 (gamma+delta) Bo^-1 zeta_x^2 / (sqrt(1 + mu eps^2 zeta_x^2) + 1)`.
    pub(crate) fn potential_raw(&self, zeta: &[f64]) -> f64 {
        let p = &self.params;
        let gd = p.gamma_plus_delta();
        let mut density: Vec<f64> = zeta.iter().map(|z| gd * z * z).collect();
        if p.inv_bond != 0.0 {
            let s = p.mu * p.epsilon * p.epsilon;
            for (d, zx) in density.iter_mut().zip(self.ddx(zeta)) {
                *d += 2.0 * gd * p.inv_bond * zx * zx / ((1.0 + s * zx * zx).sqrt() + 1.0);
            }
        }
        self.grid.integral(&density)
    }

    /// `int gamma h1 u1^2 + h2 u2^2 + mu gamma/3 h1 (h1 D1 u1)^2 + mu/3 h2 (h2 D2 u2)^2`
    /// with `u1 = -w/h1`, `u2 = w/h2`; equal to `<w, A w>`.
    pub(crate) fn kinetic_raw(&self, h1: &[f64], h2: &[f64], w: &[f64]) -> f64 {
        let p = &self.params;
        let n = w.len();
        let u1: Vec<f64> = (0..n).map(|i| -w[i] / h1[i]).collect();
        let u2: Vec<f64> = (0..n).map(|i| w[i] / h2[i]).collect();
        let mut density: Vec<f64> = (0..n)
            .map(|i| p.gamma * h1[i] * u1[i] * u1[i] + h2[i] * u2[i] * u2[i])
            .collect();
        if p.mu != 0.0 {
            let d1 = self.layer_d(Layer::Upper, &u1);
            let d2 = self.layer_d(Layer::Lower, &u2);
            for i in 0..n {
                let (a, b) = (h1[i] * d1[i], h2[i] * d2[i]);
                density[i] += p.mu / 3.0 * (p.gamma * h1[i] * a * a + h2[i] * b * b);
            }
        }
        self.grid.integral(&density)
    }

    /// `R_i[h, w/h] = 1/2 (h D_i u)^2 + 1/3 h^-1 u D_i(h^3 D_i u)` with `u = w/h`.
    fn r_term(&self, layer: Layer, h: &[f64], w: &[f64]) -> Vec<f64> {
        let u: Vec<f64> = w.iter().zip(h).map(|(w, h)| w / h).collect();
        let (du, inner) = self.layer_terms(layer, h, &u);
        (0..h.len())
            .map(|i| {
                let hd = h[i] * du[i];
                0.5 * hd * hd + u[i] * inner[i] / 3.0
            })
            .collect()
    }
}

impl OdeSystem for GnModel {
    fn rhs(&mut self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.rhs_raw(y, dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(mult: MultiplierSpec, n: usize) -> GnModel {
        let grid = Grid::new(n, 4.0).unwrap();
        GnModel::new(PhysParams::default(), grid, mult, SolverOptions::default()).unwrap()
    }

    #[test]
    fn cg_solves_small_spd_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let b = [1.0, 2.0, 3.0];
        let mut x = [0.0; 3];
        let it = conjugate_gradient(
            |p, out| {
                for i in 0..3 {
                    out[i] = (0..3).map(|j| a[i][j] * p[j]).sum();
                }
            },
            |r, z| z.copy_from_slice(r),
            &b,
            &mut x,
            1e-14,
            10,
        )
        .unwrap();
        assert!(it <= 3);
        // Cramer's rule, det = 18
        let exact = [4.0 / 18.0, 2.0 / 18.0, 26.0 / 18.0];
        for i in 0..3 {
            assert!((x[i] - exact[i]).abs() < 1e-14, "{x:?}");
        }
    }

    #[test]
    fn cg_reports_failure_with_history() {
        let mut x = [0.0; 2];
        let err = conjugate_gradient(
            |p, out| {
                out[0] = p[0];
                out[1] = -p[1];
            },
            |r, z| z.copy_from_slice(r),
            &[0.0, 1.0],
            &mut x,
            1e-12,
            5,
        )
        .unwrap_err();
        match err {
            Error::Solver { history, .. } => assert!(!history.is_empty()),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn flat_interface_inversion_matches_fourier_oracle() {
        for mult in [
            MultiplierSpec::Identity,
            MultiplierSpec::regularized_natural(0.5).unwrap(),
            MultiplierSpec::improved(0.5).unwrap(),
        ] {
            let mut m = model(mult.clone(), 64);
            let grid = m.grid().clone();
            let zeta = Field::zeros(&grid);
            let v = Field::from_fn(&grid, |x| (-(x * x)).exp() + 0.3 * (2.0 * x).sin());
            let w = m.solve(&zeta, &v).unwrap();
            let p = PhysParams::default();
            let oracle = grid.apply_real_symbol(v.values(), &{
                (0..grid.modes())
                    .map(|j| {
                        let k = if j == grid.n() / 2 { 0.0 } else { grid.wavenumber(j) };
                        let f1 = mult.eval(Layer::Upper, k, p.mu);
                        let f2 = mult.eval(Layer::Lower, k, p.mu);
                        1.0 / (p.gamma + p.delta
                            + p.mu / 3.0 * k * k * (f2 * f2 / p.delta + p.gamma * f1 * f1))
                    })
                    .collect::<Vec<_>>()
            });
            let err = w
                .values()
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-13, "{mult}: {err}");
        }
    }

    #[test]
    fn cavitation_is_detected() {
        let m = model(MultiplierSpec::Identity, 16);
        let grid = m.grid().clone();
        let zeta = Field::from_fn(&grid, |x| if x.abs() < 0.1 { 2.0 } else { 0.0 });
        match m.depths(&zeta) {
            Err(Error::Cavitation { layer, x, .. }) => {
                assert_eq!(layer, Layer::Upper);
                assert_eq!(x, 0.0);
            }
            other => panic!("{other:?}"),
        }
        let deep = Field::constant(&grid, -4.0);
        assert!(matches!(
            m.depths(&deep),
            Err(Error::Cavitation { layer: Layer::Lower, .. })
        ));
    }

    #[test]
    fn rest_state_is_stationary() {
        let mut m = model(MultiplierSpec::improved(0.5).unwrap(), 64);
        let z = Field::zeros(m.grid());
        let (dz, dv) = m.rhs(&z, &z).unwrap();
        assert_eq!(dz.max_abs(), 0.0);
        assert_eq!(dv.max_abs(), 0.0);
    }

    #[test]
    fn small_slope_surface_tension_is_linear() {
        let m = model(MultiplierSpec::Identity, 128);
        let grid = m.grid().clone();
        let a = 1e-6;
        let k = grid.wavenumber(3);
        let zeta = Field::from_fn(&grid, |x| a * (k * x).cos());
        let t = m.surface_tension_term(&zeta).unwrap();
        let p = PhysParams::default();
        let scale = p.gamma_plus_delta() * p.inv_bond;
        for (j, &val) in t.values().iter().enumerate() {
            let exact = scale * a * k.powi(3) * (k * grid.node(j)).sin();
            assert!((val - exact).abs() <= 1e-10 * scale * a * k.powi(3), "{val} {exact}");
        }
    }
}
