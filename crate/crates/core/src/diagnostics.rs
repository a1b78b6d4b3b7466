//! Conserved and monitored quantities of a Green-Naghdi state.

use crate::error::{Error, Result};
use crate::gn::GnModel;
use crate::params::PhysParams;
use crate::spectral::Field;

/// One line of `diag.csv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    /// Excess of mass `int zeta`.
    pub z: f64,
    /// `int v`.
    pub v: f64,
    /// Horizontal impulse `int zeta v`.
    pub i: f64,
    /// Total energy.
    pub h: f64,
    /// Horizontal momentum `int (1 - gamma) w`, not conserved in general.
    pub m: f64,
    /// `int zeta x - t w`.
    pub c: f64,
    pub hyp_margin: f64,
    pub high_band: f64,
}

impl DiagnosticsRow {
    pub const HEADER: &'static str = "t,Z,V,I,H,M,C,hyp_margin,high_band";

    pub fn to_csv(&self) -> String {
        [
            self.t,
            self.z,
            self.v,
            self.i,
            self.h,
            self.m,
            self.c,
            self.hyp_margin,
            self.high_band,
        ]
        .iter()
        .map(|x| format!("{x:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.z, self.v, self.i, self.h, self.m, self.c, self.hyp_margin, self.high_band]
            .iter()
            .all(|x| x.is_finite())
    }
}

pub fn mass(zeta: &Field) -> f64 {
    zeta.grid().integral(zeta.values())
}

/// `int A[zeta] w`, which equals `int v`.
pub fn velocity_mass(model: &GnModel, zeta: &Field, w: &Field) -> Result<f64> {
    let v = model.apply_a(zeta, w)?;
    Ok(mass(&v))
}

pub fn impulse(zeta: &Field, v: &Field) -> Result<f64> {
    crate::spectral::inner(zeta, v)
}

/// Total energy
/// `int (gamma+delta) zeta^2 + capillary + gamma h1 u1^2 + h2 u2^2 + dispersive terms`,
/// zero at rest.
pub fn energy(model: &GnModel, zeta: &Field, w: &Field) -> Result<f64> {
    let (h1, h2) = model.depths(zeta)?;
    if w.grid() != zeta.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(model.potential_raw(zeta.values()) + model.kinetic_raw(h1.values(), h2.values(), w.values()))
}

/// The Hamiltonian `H(zeta, v)` whose variational derivatives drive the
/// evolution. It is evaluated in the form
/// `1/2 (potential) + <v, w> - 1/2 <w, A w>`, which is stationary in `w`,
/// so the error of the iterative solve only enters quadratically.
pub fn hamiltonian(model: &mut GnModel, zeta: &Field, v: &Field) -> Result<f64> {
    let w = model.solve(zeta, v)?;
    let (h1, h2) = model.depths(zeta)?;
    let vw = crate::spectral::inner(v, &w)?;
    let kin = model.kinetic_raw(h1.values(), h2.values(), w.values());
    Ok(0.5 * model.potential_raw(zeta.values()) + vw - 0.5 * kin)
}

pub fn momentum(params: &PhysParams, w: &Field) -> f64 {
    (1.0 - params.gamma) * mass(w)
}

pub fn centroid(zeta: &Field, w: &Field, t: f64) -> Result<f64> {
    let grid = zeta.grid();
    if w.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let density: Vec<f64> = zeta
        .values()
        .iter()
        .zip(w.values())
        .enumerate()
        .map(|(j, (z, w))| z * grid.node(j) - t * w)
        .collect();
    Ok(grid.integral(&density))
}

/// `min_x (gamma+delta) - eps^2 (h2^-3 + gamma h1^-3) w^2`; negative values
/// leave the region where the system is known to be hyperbolic.
pub fn hyperbolicity_margin(params: &PhysParams, zeta: &Field, w: &Field) -> Result<f64> {
    let eps = params.epsilon;
    let margin = zeta.zip_map(w, |z, w| {
        let h1 = 1.0 - eps * z;
        let h2 = params.lower_depth() + eps * z;
        params.gamma_plus_delta()
            - eps * eps * (h2.powi(-3) + params.gamma * h1.powi(-3)) * w * w
    })?;
    Ok(margin.values().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Wavenumbers and `|zeta_hat(k)|` for `k >= 0`, normalized so that a unit
/// sine has amplitude `1/2`.
pub fn amplitude_spectrum(zeta: &Field) -> Vec<(f64, f64)> {
    let grid = zeta.grid();
    grid.forward(zeta.values())
        .iter()
        .enumerate()
        .map(|(m, c)| (grid.wavenumber(m), c.norm()))
        .collect()
}

/// Largest `|zeta_hat(k)|` over `|k| >= k_band`.
pub fn band_max(zeta: &Field, k_band: f64) -> f64 {
    amplitude_spectrum(zeta)
        .into_iter()
        .filter(|(k, _)| *k >= k_band)
        .map(|(_, a)| a)
        .fold(0.0, f64::max)
}

/// `band_max(zeta, k_band) / max_k |zeta_hat(k)|`, zero for a flat
/// interface.
pub fn band_ratio(zeta: &Field, k_band: f64) -> f64 {
    let spectrum = amplitude_spectrum(zeta);
    let peak = spectrum.iter().map(|(_, a)| *a).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let band = spectrum.iter().filter(|(k, _)| *k >= k_band).map(|(_, a)| *a).fold(0.0, f64::max);
    band / peak
}

/// Every diagnostic of the state `(zeta, v)` at time `t`.
pub fn evaluate(
    model: &mut GnModel,
    t: f64,
    zeta: &Field,
    v: &Field,
    k_band: f64,
) -> Result<DiagnosticsRow> {
    let w = model.solve(zeta, v)?;
    Ok(DiagnosticsRow {
        t,
        z: mass(zeta),
        v: mass(v),
        i: impulse(zeta, v)?,
        h: energy(model, zeta, &w)?,
        m: momentum(model.params(), &w),
        c: centroid(zeta, &w, t)?,
        hyp_margin: hyperbolicity_margin(model.params(), zeta, &w)?,
        high_band: band_max(zeta, k_band),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gn::SolverOptions;
    use crate::multipliers::MultiplierSpec;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    fn model(p: PhysParams, mult: MultiplierSpec) -> GnModel {
        GnModel::new(p, Grid::new(128, 4.0).unwrap(), mult, SolverOptions::default()).unwrap()
    }

    #[test]
    fn gaussian_mass() {
        let g = Grid::new(256, 4.0).unwrap();
        let z = Field::from_fn(&g, |x| -(-4.0 * x * x).exp());
        assert!((mass(&z) + PI.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(mass(&Field::zeros(&g)), 0.0);
    }

    #[test]
    fn impulse_of_matching_sines() {
        let g = Grid::new(64, 4.0).unwrap();
        let k = g.wavenumber(2);
        let s = Field::from_fn(&g, |x| (k * x).sin());
        assert!((impulse(&s, &s).unwrap() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn flat_velocity_mass_is_mean_flux() {
        let m = model(PhysParams::default(), MultiplierSpec::improved(0.5).unwrap());
        let g = m.grid().clone();
        let zeta = Field::zeros(&g);
        let w = Field::from_fn(&g, |x| 0.3 + (-(x * x)).exp());
        let expected = PhysParams::default().gamma_plus_delta() * mass(&w);
        assert!((velocity_mass(&m, &zeta, &w).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rest_energy_vanishes() {
        let mut m = model(PhysParams::default(), MultiplierSpec::Identity);
        let z = Field::zeros(m.grid());
        assert_eq!(energy(&m, &z, &z).unwrap(), 0.0);
        assert_eq!(hamiltonian(&mut m, &z, &z).unwrap(), 0.0);
    }

    #[test]
    fn flat_shallow_energy_single_mode() {
        let p = PhysParams {
            mu: 0.0,
            inv_bond: 0.0,
            ..PhysParams::default()
        };
        let m = model(p, MultiplierSpec::Identity);
        let g = m.grid().clone();
        let k = g.wavenumber(3);
        let w = Field::from_fn(&g, |x| 0.2 * (k * x).cos());
        let z = Field::zeros(&g);
        // flat weights: gamma / h1 + 1 / h2 = gamma + delta, and int cos^2 = L/2
        let expected = (p.gamma + p.delta) * 0.04 * 4.0;
        assert!((energy(&m, &z, &w).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn energy_matches_quadratic_form() {
        let mut m = model(PhysParams::default(), MultiplierSpec::regularized_natural(0.5).unwrap());
        let g = m.grid().clone();
        let zeta = Field::from_fn(&g, |x| 0.5 * (-(x * x)).exp());
        let v = Field::from_fn(&g, |x| 0.4 * (0.8 * x).sin() * (-(x * x) / 4.0).exp());
        let w = m.solve(&zeta, &v).unwrap();
        let aw = m.apply_a(&zeta, &w).unwrap();
        let quad = crate::spectral::inner(&w, &aw).unwrap();
        let (h1, h2) = m.depths(&zeta).unwrap();
        let kin = m.kinetic_raw(h1.values(), h2.values(), w.values());
        assert!((kin - quad).abs() <= 1e-12 * quad.abs());
        let e = energy(&m, &zeta, &w).unwrap();
        let h = hamiltonian(&mut m, &zeta, &v).unwrap();
        assert!((e - 2.0 * h).abs() <= 1e-10 * e.abs());
        // energy is even in w
        let minus = w.map(|x| -x);
        assert_eq!(energy(&m, &zeta, &minus).unwrap(), e);
    }

    #[test]
    fn invariants_under_grid_translation() {
        let mut m = model(PhysParams::default(), MultiplierSpec::improved(0.5).unwrap());
        let g = m.grid().clone();
        let zeta = Field::from_fn(&g, |x| 0.4 * (-(x * x)).exp());
        let v = Field::from_fn(&g, |x| 0.2 * (-(x - 0.5) * (x - 0.5)).exp());
        let a = evaluate(&mut m, 0.0, &zeta, &v, 10.0).unwrap();
        let b = evaluate(&mut m, 0.0, &zeta.roll(17), &v.roll(17), 10.0).unwrap();
        for (x, y) in [(a.z, b.z), (a.v, b.v), (a.i, b.i), (a.h, b.h)] {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn momentum_and_centroid() {
        let p = PhysParams {
            gamma: 0.0,
            ..PhysParams::default()
        };
        let g = Grid::new(64, 4.0).unwrap();
        let w = Field::constant(&g, 0.5);
        assert!((momentum(&p, &w) - 4.0).abs() < 1e-14);
        let one = PhysParams { gamma: 0.999_999_999_999_999_9, ..p };
        assert!(momentum(&one, &w).abs() < 1e-14);
        let even = Field::from_fn(&g, |x| (-4.0 * x * x).exp());
        let zero = Field::zeros(&g);
        // the node at -L/2 has no mirror partner; the Gaussian is negligible there
        assert!(centroid(&even, &zero, 0.0).unwrap().abs() < 1e-12);
        assert!((centroid(&zero, &w, 2.0).unwrap() + 8.0).abs() < 1e-13);
    }

    #[test]
    fn band_max_normalization() {
        let g = Grid::new(128, 4.0).unwrap();
        let k0 = g.wavenumber(40);
        let z = Field::from_fn(&g, |x| 1e-6 * (k0 * x).sin());
        assert!((band_max(&z, k0) - 5e-7).abs() < 1e-20);
        let low = Field::from_fn(&g, |x| (g.wavenumber(2) * x).cos());
        assert!(band_max(&low, g.nyquist() / 2.0) < 1e-15);
    }

    #[test]
    fn margin_at_rest_is_restoring_coefficient() {
        let p = PhysParams::default();
        let g = Grid::new(16, 4.0).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(hyperbolicity_margin(&p, &z, &z).unwrap(), p.gamma_plus_delta());
        let w = Field::constant(&g, 1.0);
        let expected = p.gamma_plus_delta() - 0.25 * (0.125 + 0.95);
        assert!((hyperbolicity_margin(&p, &z, &w).unwrap() - expected).abs() < 1e-15);
    }
}

#[cfg(test)]
mod gradient_tests {
    use super::*;
    use crate::gn::SolverOptions;
    use crate::multipliers::MultiplierSpec;
    use crate::spectral::Grid;

    #[test]
    fn zeta_gradient_matches_finite_differences() {
        for mult in [
            MultiplierSpec::Identity,
            MultiplierSpec::regularized_natural(0.5).unwrap(),
            MultiplierSpec::improved(0.5).unwrap(),
        ] {
            let grid = Grid::new(128, 4.0).unwrap();
            let mut m = GnModel::new(PhysParams::default(), grid.clone(), mult.clone(), SolverOptions::default()).unwrap();
            let zeta = Field::from_fn(&grid, |x| 0.6 * (-(x * x)).exp() - 0.1 * (0.785 * x).sin());
            let v = Field::from_fn(&grid, |x| 0.5 * (-(x - 0.3) * (x - 0.3)).exp());
            let eta = Field::from_fn(&grid, |x| (-(x + 0.5) * (x + 0.5) * 2.0).exp());
            let (g, _) = m.hamiltonian_gradient(&zeta, &v).unwrap();
            let exact = crate::spectral::inner(&g, &eta).unwrap();
            let mut errs = vec![];
            for h in [1e-2, 1e-3] {
                let zp = zeta.zip_map(&eta, |a, b| a + h * b).unwrap();
                let zm = zeta.zip_map(&eta, |a, b| a - h * b).unwrap();
                let fd = (hamiltonian(&mut m, &zp, &v).unwrap() - hamiltonian(&mut m, &zm, &v).unwrap()) / (2.0 * h);
                errs.push((fd - exact).abs());
            }
            let order = (errs[0] / errs[1]).log10();
            assert!((1.8..=2.2).contains(&order), "{mult}: {errs:?} exact {exact}");
        }
    }
}
