//! Linear Kelvin-Helmholtz analysis around a constant shear.
//!
//! Linearizing about `zeta = 0` with a constant shear gives, mode by mode,
//!
//! ```text
//! zeta_t + c(D) zeta_x + b(D) v_x = 0,
//! v_t    + a(D) zeta_x + c(D) v_x = 0,
//! ```
//!
//! and the mode `k` is stable exactly when `a(k) > 0` (`b` is always
//! positive). The full Euler coefficients are expressed with the shear
//! `vbar`, the model coefficients with `wbar = vbar / (gamma + delta)`.

use num_complex::Complex64;

use crate::error::Layer;
use crate::multipliers::MultiplierSpec;
use crate::params::PhysParams;

/// Symbol coefficients `(a, b, c)` at one wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coefficients {
    /// Largest `|Im omega|` over the two branches `omega = k (c +- sqrt(a b))`,
    /// computed from the eigenvalues of `k [[c, b], [a, c]]`.
    pub fn growth_rate(&self, k: f64) -> f64 {
        let tr = 2.0 * self.c;
        let det = self.c * self.c - self.a * self.b;
        let disc = Complex64::new(0.25 * tr * tr - det, 0.0).sqrt();
        let l1 = 0.5 * tr + disc;
        let l2 = 0.5 * tr - disc;
        k.abs() * l1.im.abs().max(l2.im.abs())
    }
}

/// `tanh(x) / x`, equal to 1 at the origin.
pub fn tanhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    } else {
        x.tanh() / x
    }
}

/// Full Euler coefficients for the shear `vbar`.
pub fn euler_coeffs(k: f64, p: &PhysParams, vbar: f64) -> Coefficients {
    let gd = p.gamma_plus_delta();
    let x = p.mu.sqrt() * k.abs();
    let t1 = tanhc(x);
    let t2 = tanhc(x / p.delta) / p.delta;
    let den = t1 + p.gamma * t2;
    let ev = p.epsilon * vbar;
    let w_scale = (p.delta + 1.0) / gd;
    Coefficients {
        a: gd * (1.0 + p.inv_bond * k * k) - p.gamma / den * w_scale * w_scale * ev * ev,
        b: t1 * t2 / den,
        c: (p.delta * t1 - p.gamma * t2) / den * ev / gd,
    }
}

/// Coefficient of `eps^2 wbar^2` in `-a(k)` for the full Euler system.
fn euler_shear_factor(k: f64, p: &PhysParams) -> f64 {
    let x = p.mu.sqrt() * k.abs();
    let den = tanhc(x) + p.gamma * tanhc(x / p.delta) / p.delta;
    p.gamma * (p.delta + 1.0).powi(2) / den
}

struct ModelParts {
    /// Common denominator `1 + mu k^2 (F2^2 + gamma delta F1^2) / (3 delta (gamma + delta))`.
    den: f64,
    f1: f64,
    f2: f64,
    mk2: f64,
}

fn model_parts(k: f64, p: &PhysParams, spec: &MultiplierSpec) -> ModelParts {
    let f1 = spec.eval_squared(Layer::Upper, k, p.mu);
    let f2 = spec.eval_squared(Layer::Lower, k, p.mu);
    let mk2 = p.mu * k * k;
    let den = 1.0 + mk2 * (f2 + p.gamma * p.delta * f1) / (3.0 * p.delta * p.gamma_plus_delta());
    ModelParts { den, f1, f2, mk2 }
}

fn model_shear_factor_from(parts: &ModelParts, p: &PhysParams) -> f64 {
    let gd = p.gamma_plus_delta();
    p.gamma * (p.delta + 1.0).powi(2) / (p.delta * gd)
        * (p.delta * p.delta + parts.mk2 * parts.f2 / 3.0)
        * (1.0 + parts.mk2 * parts.f1 / 3.0)
        / parts.den
}

/// Coefficients of the linearized multiplier model for the shear `wbar`.
pub fn model_coeffs(k: f64, p: &PhysParams, spec: &MultiplierSpec, wbar: f64) -> Coefficients {
    let gd = p.gamma_plus_delta();
    let parts = model_parts(k, p, spec);
    let ew = p.epsilon * wbar;
    Coefficients {
        a: gd * (1.0 + p.inv_bond * k * k) - ew * ew * model_shear_factor_from(&parts, p),
        b: 1.0 / gd / parts.den,
        c: ew * ((p.delta * p.delta - p.gamma) / gd + parts.mk2 * (parts.f2 - p.gamma * parts.f1) / (3.0 * gd))
            / parts.den,
    }
}

/// Dispersion relation whose thresholds are compared.
#[derive(Clone, Debug, PartialEq)]
pub enum Dispersion {
    Euler,
    Model(MultiplierSpec),
}

impl Dispersion {
    pub fn label(&self) -> String {
        match self {
            Dispersion::Euler => "euler".into(),
            Dispersion::Model(spec) => spec.to_string(),
        }
    }

    /// Value of `eps^2 wbar^2` above which mode `k` is unstable; NaN when
    /// the mode is stable for every shear.
    pub fn threshold(&self, k: f64, p: &PhysParams) -> f64 {
        let shear = match self {
            Dispersion::Euler => euler_shear_factor(k, p),
            Dispersion::Model(spec) => model_shear_factor_from(&model_parts(k, p, spec), p),
        };
        if shear > 0.0 {
            p.gamma_plus_delta() * (1.0 + p.inv_bond * k * k) / shear
        } else {
            f64::NAN
        }
    }

    /// Coefficients for the shear `wbar` (converted to `vbar` for Euler).
    pub fn coeffs(&self, k: f64, p: &PhysParams, wbar: f64) -> Coefficients {
        match self {
            Dispersion::Euler => euler_coeffs(k, p, p.gamma_plus_delta() * wbar),
            Dispersion::Model(spec) => model_coeffs(k, p, spec, wbar),
        }
    }

    pub fn growth_rate(&self, k: f64, p: &PhysParams, wbar: f64) -> f64 {
        self.coeffs(k, p, wbar).growth_rate(k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCurve {
    pub label: String,
    pub k: Vec<f64>,
    pub threshold: Vec<f64>,
}

impl StabilityCurve {
    /// Smallest finite threshold and the wavenumber attaining it.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.k
            .iter()
            .zip(&self.threshold)
            .filter(|(_, t)| t.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, t)| (*k, *t))
    }
}

///
/// Long grids are split across threads; every entry depends on its own `k`
/// only, so the result does not depend on the split.
pub fn threshold_curve(ks: &[f64], p: &PhysParams, dispersion: &Dispersion) -> StabilityCurve {
    const CHUNK: usize = 4096;
    let threshold = if ks.len() <= CHUNK {
        ks.iter().map(|&k| dispersion.threshold(k, p)).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ks
                .chunks(CHUNK)
                .map(|chunk| scope.spawn(move || chunk.iter().map(|&k| dispersion.threshold(k, p)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("threshold worker panicked"))
                .collect()
        })
    };
    StabilityCurve {
        label: dispersion.label(),
        k: ks.to_vec(),
        threshold,
    }
}

/// `count` wavenumbers evenly spaced in `[k_min, k_max]`.
pub fn linspace(k_min: f64, k_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![k_min],
        _ => (0..count)
            .map(|i| k_min + (k_max - k_min) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn params() -> PhysParams {
        PhysParams::default()
    }

    #[test]
    fn shear_free_euler() {
        let p = params();
        for k in [0.0, 0.5, 3.0, 40.0] {
            let c = euler_coeffs(k, &p, 0.0);
            assert_eq!(c.a, p.gamma_plus_delta() * (1.0 + p.inv_bond * k * k));
            assert_eq!(c.c, 0.0);
            assert!(c.b > 0.0);
        }
    }

    #[test]
    fn long_wave_limits() {
        let p = params();
        let gd = p.gamma_plus_delta();
        let vbar = 0.8;
        let c0 = euler_coeffs(0.0, &p, vbar);
        let expected_c = (p.delta * p.delta - p.gamma) / gd * p.epsilon * vbar / gd;
        assert!((c0.b - 1.0 / gd).abs() < 1e-15);
        assert!((c0.c - expected_c).abs() < 1e-15);
        let tiny = euler_coeffs(1e-7, &p, vbar);
        assert!((tiny.b - 1.0 / gd).abs() < 1e-13);
        let m0 = model_coeffs(0.0, &p, &MultiplierSpec::Identity, vbar / gd);
        assert!((m0.a - c0.a).abs() < 1e-14);
        assert!((m0.b - c0.b).abs() < 1e-15);
        assert!((m0.c - c0.c).abs() < 1e-15);
        let rest = model_coeffs(0.0, &p, &MultiplierSpec::Identity, 0.0);
        assert_eq!((rest.a, rest.b, rest.c), (gd, 1.0 / gd, 0.0));
    }

    #[test]
    fn improved_model_reproduces_euler() {
        let p = params();
        let spec = MultiplierSpec::improved(p.delta).unwrap();
        let wbar = 1.0;
        for k in linspace(0.1, 100.0, 1000) {
            let e = euler_coeffs(k, &p, p.gamma_plus_delta() * wbar);
            let m = model_coeffs(k, &p, &spec, wbar);
            let scale = e.a.abs().max(p.gamma_plus_delta());
            assert!((e.a - m.a).abs() <= 1e-12 * scale, "a at k = {k}");
            assert!((e.b - m.b).abs() <= 1e-12 * e.b, "b at k = {k}");
            assert!((e.c - m.c).abs() <= 1e-12 * e.c.abs().max(1e-3), "c at k = {k}");
        }
    }

    #[test]
    fn coefficients_are_even() {
        let p = params();
        let spec = MultiplierSpec::regularized_natural(p.delta).unwrap();
        for k in [0.3, 7.0, 55.0] {
            assert_eq!(model_coeffs(k, &p, &spec, 0.4), model_coeffs(-k, &p, &spec, 0.4));
            assert_eq!(euler_coeffs(k, &p, 0.4), euler_coeffs(-k, &p, 0.4));
        }
    }

    #[test]
    fn one_layer_is_unconditionally_stable() {
        let p = PhysParams { gamma: 0.0, ..params() };
        for k in [0.1, 1.0, 50.0] {
            assert!(Dispersion::Model(MultiplierSpec::Identity).threshold(k, &p).is_nan());
            assert!(Dispersion::Euler.threshold(k, &p).is_nan());
        }
    }

    #[test]
    fn regularized_threshold_has_uniform_bound_without_surface_tension() {
        let p = PhysParams { inv_bond: 0.0, ..params() };
        let (t1, t2) = (1.0 / 15.0, 1.0 / (15.0 * p.delta * p.delta));
        let d = Dispersion::Model(MultiplierSpec::regularized(t1, t2).unwrap());
        let gd = p.gamma_plus_delta();
        let bound = gd / (p.gamma * (p.delta + 1.0).powi(2) / (p.delta * gd)
            * (p.delta * p.delta + 1.0 / (3.0 * t2))
            * (1.0 + 1.0 / (3.0 * t1)));
        for k in linspace(0.01, 1e4, 500) {
            assert!(d.threshold(k, &p) >= bound * (1.0 - 1e-12), "k = {k}");
        }
        // the original model loses every bound
        let id = Dispersion::Model(MultiplierSpec::Identity);
        assert!(id.threshold(1e4, &p) < 1e-6);
    }

    #[test]
    fn original_model_large_wavenumber_scaling() {
        let p = params();
        let id = Dispersion::Model(MultiplierSpec::Identity);
        let gd = p.gamma_plus_delta();
        let limit = 3.0 * gd * (1.0 + p.gamma * p.delta) / (p.delta + 1.0).powi(2);
        let k = 1e5;
        let scaled = id.threshold(k, &p) * p.gamma * p.mu / p.inv_bond;
        assert!((scaled / limit - 1.0).abs() < 1e-6, "{scaled} vs {limit}");
    }

    #[test]
    fn growth_rate_matches_eigen_solver() {
        let p = params();
        let spec = MultiplierSpec::Identity;
        let d = Dispersion::Model(spec.clone());
        for (k, wbar) in [(5.0, 3.0), (20.0, 2.0), (60.0, 1.5), (1.0, 0.01)] {
            let c = model_coeffs(k, &p, &spec, wbar);
            let m = Matrix2::new(c.c, c.b, c.a, c.c) * k;
            let eig = m.complex_eigenvalues();
            let oracle = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            let rate = d.growth_rate(k, &p, wbar);
            assert!((rate - oracle).abs() <= 1e-10 * oracle.max(1.0), "k = {k}: {rate} vs {oracle}");
            if c.a < 0.0 {
                assert!((rate - k * (-c.a * c.b).sqrt()).abs() <= 1e-10 * rate);
            } else {
                assert_eq!(rate, 0.0);
            }
        }
    }

    #[test]
    fn threshold_depends_on_shear_only_through_eps_wbar() {
        let p = params();
        let spec = MultiplierSpec::regularized_natural(p.delta).unwrap();
        let scaled = PhysParams { epsilon: 0.25, ..p };
        for k in [0.5, 5.0, 50.0] {
            let d = Dispersion::Model(spec.clone());
            assert_eq!(d.threshold(k, &p), d.threshold(k, &scaled));
            let a = model_coeffs(k, &p, &spec, 0.3).a;
            let b = model_coeffs(k, &scaled, &spec, 0.6).a;
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_zeroes_a() {
        let p = params();
        for d in [
            Dispersion::Euler,
            Dispersion::Model(MultiplierSpec::Identity),
            Dispersion::Model(MultiplierSpec::regularized_natural(p.delta).unwrap()),
        ] {
            for k in [0.2, 3.0, 30.0] {
                let thr = d.threshold(k, &p);
                let wbar = thr.sqrt() / p.epsilon;
                let a = d.coeffs(k, &p, wbar).a;
                assert!(a.abs() < 1e-12, "{} k = {k}: {a}", d.label());
            }
        }
    }
}
