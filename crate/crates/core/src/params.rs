//! Dimensionless parameters of the two-layer system.

use crate::error::{Error, Result};

/// The dimensionless parameter set shared by every formula in the crate.
///
/// * `gamma`: density ratio of the upper to the lower fluid, in `[0, 1)`.
/// * `epsilon`: nonlinearity (amplitude over upper depth).
/// * `mu`: shallowness (squared upper depth over wavelength).
/// * `delta`: upper over lower depth.
/// * `inv_bond`: inverse Bond number, scaling surface tension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    pub gamma: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub delta: f64,
    pub inv_bond: f64,
}

impl Default for PhysParams {
    /// The parameters of the reference Kelvin-Helmholtz experiments.
    fn default() -> Self {
        PhysParams {
            gamma: 0.95,
            epsilon: 0.5,
            mu: 0.1,
            delta: 0.5,
            inv_bond: 5e-4,
        }
    }
}

impl PhysParams {
    pub fn new(gamma: f64, epsilon: f64, mu: f64, delta: f64, inv_bond: f64) -> Result<Self> {
        let p = PhysParams {
            gamma,
            epsilon,
            mu,
            delta,
            inv_bond,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |field, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{v} is not finite")))
            }
        };
        finite("gamma", self.gamma)?;
        finite("epsilon", self.epsilon)?;
        finite("mu", self.mu)?;
        finite("delta", self.delta)?;
        finite("inv_bond", self.inv_bond)?;
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::validation("gamma", format!("{} not in [0, 1)", self.gamma)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::validation("epsilon", format!("{} < 0", self.epsilon)));
        }
        if self.mu < 0.0 {
            return Err(Error::validation("mu", format!("{} < 0", self.mu)));
        }
        if self.delta <= 0.0 {
            return Err(Error::validation("delta", format!("{} <= 0", self.delta)));
        }
        if self.inv_bond < 0.0 {
            return Err(Error::validation("inv_bond", format!("{} < 0", self.inv_bond)));
        }
        Ok(())
    }

    /// `gamma + delta`, the coefficient of the hydrostatic restoring force.
    pub fn gamma_plus_delta(&self) -> f64 {
        self.gamma + self.delta
    }

    /// Rest depth of the lower layer, `1 / delta`.
    pub fn lower_depth(&self) -> f64 {
        1.0 / self.delta
    }

    /// Parameter controlling the size of the hyperbolic domain of the models:
    /// `eps^2 (1 + (gamma K1 + K2) (mu Bo)^(1 - sigma))`.
    ///
    /// `kf1`, `kf2` are the decay constants of the two multipliers and
    /// `sigma` their common decay exponent. With no surface tension
    /// (`inv_bond == 0`) the Bond number is infinite, so any `sigma < 1`
    /// yields `f64::INFINITY`.
    pub fn upsilon(&self, kf1: f64, kf2: f64, sigma: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::Domain(format!("sigma = {sigma} not in [0, 1]")));
        }
        if kf1 < 0.0 || kf2 < 0.0 {
            return Err(Error::Domain(format!(
                "decay constants must be nonnegative, got ({kf1}, {kf2})"
            )));
        }
        let eps2 = self.epsilon * self.epsilon;
        let exponent = 1.0 - sigma;
        let scale = if exponent == 0.0 {
            1.0
        } else if self.inv_bond == 0.0 {
            if eps2 == 0.0 {
                return Ok(0.0);
            }
            return Ok(f64::INFINITY);
        } else {
            (self.mu / self.inv_bond).powf(exponent)
        };
        Ok(eps2 * (1.0 + (self.gamma * kf1 + kf2) * scale))
    }
}
