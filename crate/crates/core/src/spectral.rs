//! Periodic collocation grid, real-to-complex transforms and Fourier-diagonal
//! operators.
//!
//! Transforms are normalized so that `forward` returns the coefficients
//! `c_m = (1/n) sum_j f_j exp(-2 pi i j m / n)` for the `n/2 + 1`
//! nonnegative frequencies; a unit-amplitude sine mode therefore has
//! `|c_m| = 1/2`. Every operator here is diagonal with a real even symbol
//! (or `i k` times one), so real fields stay real by construction.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

/// Uniform periodic grid on `[-half_length, half_length)`.
///
/// Cloning is cheap: the FFT plans are shared. Plans are immutable and
/// scratch space is allocated per call, so a grid can be used from any
/// number of threads at once.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    half_length: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_length == other.half_length
    }
}

impl Grid {
    /// `n` must be a power of two no smaller than 8.
    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::validation(
                "grid_n",
                format!("{n} is not a power of two >= 8"),
            ));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::validation(
                "domain_half_length",
                format!("{half_length} is not a positive length"),
            ));
        }
        let mut planner = RealFftPlanner::<f64>::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Grid {
            n,
            half_length,
            plans: Arc::new(plans),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Number of stored (nonnegative-frequency) modes, `n/2 + 1`.
    pub fn modes(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Wavenumber spacing `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    /// Wavenumber of stored mode `m` (`0 <= m <= n/2`).
    pub fn wavenumber(&self, m: usize) -> f64 {
        m as f64 * self.dk()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.modes()).map(|m| self.wavenumber(m)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        self.wavenumber(self.n / 2)
    }

    /// Normalized forward transform of `n` real samples.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.n, "sample count does not match grid");
        let mut input = values.to_vec();
        let mut out = self.plans.forward.make_output_vec();
        self.plans
            .forward
            .process(&mut input, &mut out)
            .expect("buffer sizes come from the plan");
        let scale = 1.0 / self.n as f64;
        for c in &mut out {
            *c *= scale;
        }
        out
    }

    /// Inverse of [`Grid::forward`]. The imaginary parts of the zero and
    /// Nyquist coefficients are discarded.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.modes(), "mode count does not match grid");
        spectrum[0].im = 0.0;
        spectrum[self.n / 2].im = 0.0;
        let mut out = self.plans.inverse.make_output_vec();
        self.plans
            .inverse
            .process(&mut spectrum, &mut out)
            .expect("buffer sizes come from the plan");
        out
    }

    /// Multiplies the spectrum of `values` by a real symbol given at the
    /// stored modes.
    pub fn apply_real_symbol(&self, values: &[f64], symbol: &[f64]) -> Vec<f64> {
        debug_assert_eq!(symbol.len(), self.modes());
        let mut spec = self.forward(values);
        for (c, s) in spec.iter_mut().zip(symbol) {
            *c *= *s;
        }
        self.inverse(spec)
    }

    /// Applies `i * symbol(k)` in Fourier space; `symbol` is odd in `k`
    /// (e.g. `k F(k)` for the operator `d/dx F(D)`). The Nyquist entry must
    /// be zero for the result to be a real operator.
    pub fn apply_imag_symbol(&self, values: &[f64], symbol: &[f64]) -> Vec<f64> {
        debug_assert_eq!(symbol.len(), self.modes());
        let mut spec = self.forward(values);
        for (c, s) in spec.iter_mut().zip(symbol) {
            *c = Complex64::new(-c.im * s, c.re * s);
        }
        self.inverse(spec)
    }

    /// Symbol of `d/dx` divided by `i`: `k` at each stored mode, with the
    /// Nyquist mode zeroed.
    pub fn derivative_symbol(&self) -> Vec<f64> {
        let mut k = self.wavenumbers();
        k[self.n / 2] = 0.0;
        k
    }

    /// Spectral derivative on raw samples.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        self.apply_imag_symbol(values, &self.derivative_symbol())
    }

    /// Quadrature `(L/n) sum_j f_j g_j`.
    pub fn quadrature(&self, f: &[f64], g: &[f64]) -> f64 {
        self.dx() * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn integral(&self, f: &[f64]) -> f64 {
        self.dx() * f.iter().sum::<f64>()
    }

    /// Two-thirds dealiasing mask: keeps modes with `|m| <= n/3`.
    pub fn two_thirds_mask(&self) -> Symbol {
        let cutoff = self.n / 3;
        Symbol {
            values: (0..self.modes())
                .map(|m| if m <= cutoff { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

/// A real, even Fourier symbol tabulated on a grid's wavenumber ladder.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    values: Vec<f64>,
}

impl Symbol {
    /// Tabulates `f` on the ladder. `f` must be even (`f(k) == f(-k)`
    /// exactly) and finite at every ladder wavenumber.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.modes());
        for m in 0..grid.modes() {
            let k = grid.wavenumber(m);
            let (pos, neg) = (f(k), f(-k));
            if !pos.is_finite() {
                return Err(Error::Domain(format!("symbol is not finite at k = {k}")));
            }
            if pos != neg {
                return Err(Error::Domain(format!(
                    "symbol is not even at k = {k}: {pos} vs {neg}"
                )));
            }
            values.push(pos);
        }
        Ok(Symbol { values })
    }

    pub fn identity(grid: &Grid) -> Self {
        Symbol {
            values: vec![1.0; grid.modes()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Real samples of a function on a [`Grid`].
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    /// Wraps samples, rejecting wrong lengths and non-finite values.
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch);
        }
        check_finite("field", &values)?;
        Ok(Field {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![c; grid.n()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Returns a copy shifted by `cells` grid cells (periodically).
    pub fn roll(&self, cells: usize) -> Field {
        let mut values = self.values.clone();
        values.rotate_right(cells % self.grid.n());
        Field {
            grid: self.grid.clone(),
            values,
        }
    }

    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Field {
        debug_assert_eq!(values.len(), grid.n());
        Field {
            grid: grid.clone(),
            values,
        }
    }
}

pub(crate) fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::Corruption { what, index }),
        None => Ok(()),
    }
}

/// `s(D) f`: multiplies the transform of `f` by `s(k)` at every mode,
/// Nyquist included.
pub fn apply_symbol(f: &Field, s: &Symbol) -> Result<Field> {
    check_finite("field", &f.values)?;
    if s.values.len() != f.grid.modes() {
        return Err(Error::GridMismatch);
    }
    Ok(Field::from_raw(
        &f.grid,
        f.grid.apply_real_symbol(&f.values, &s.values),
    ))
}

/// Spectral `d/dx`. The Nyquist mode of the result is zero.
pub fn ddx(f: &Field) -> Result<Field> {
    check_finite("field", &f.values)?;
    Ok(Field::from_raw(&f.grid, f.grid.derivative(&f.values)))
}

/// Rectangle-rule approximation of the integral of `f g` over the period.
pub fn inner(f: &Field, g: &Field) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    Ok(f.grid.quadrature(&f.values, &g.values))
}
