//! Experiment configuration: a flat `key = value` document.
//!
//! Blank lines are ignored and `#` starts a comment. Every key is optional;
//! missing keys take the values of the reference experiment (the Gaussian
//! interface of depth 1 released from rest on `[-4, 4]`). Unknown or
//! repeated keys are errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::multipliers::{MultiplierSpec, MultiplierTable};
use crate::params::PhysParams;
use crate::spectral::Grid;

#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierChoice {
    Identity,
    Regularized,
    Improved,
    Custom(PathBuf),
}

impl MultiplierChoice {
    pub fn name(&self) -> String {
        match self {
            MultiplierChoice::Identity => "identity".into(),
            MultiplierChoice::Regularized => "regularized".into(),
            MultiplierChoice::Improved => "improved".into(),
            MultiplierChoice::Custom(p) => format!("custom:{}", p.display()),
        }
    }

    /// Short directory-friendly tag.
    pub fn tag(&self) -> &'static str {
        match self {
            MultiplierChoice::Identity => "original",
            MultiplierChoice::Regularized => "regularized",
            MultiplierChoice::Improved => "improved",
            MultiplierChoice::Custom(_) => "custom",
        }
    }
}

impl FromStr for MultiplierChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "identity" | "id" | "original" => Ok(MultiplierChoice::Identity),
            "regularized" | "reg" => Ok(MultiplierChoice::Regularized),
            "improved" | "imp" => Ok(MultiplierChoice::Improved),
            _ => match s.strip_prefix("custom:") {
                Some(path) if !path.is_empty() => Ok(MultiplierChoice::Custom(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown multiplier `{s}` (expected identity, regularized, improved or custom:<path>)"
                )),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    GreenNaghdi,
    SaintVenant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// `zeta = amplitude exp(-width x^2)`, `w = 0`.
    Gaussian,
    Rest,
    /// Constant shear `wbar` plus a small growing mode.
    Shear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: PhysParams,
    pub multiplier: MultiplierChoice,
    /// Regularization parameters; `1 / (15 delta_i^2)` when absent.
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub model: ModelKind,
    pub grid_n: usize,
    pub domain_half_length: f64,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_condition: InitialCondition,
    pub ic_amplitude: f64,
    pub ic_width: f64,
    pub shear_wbar: f64,
    pub perturb_amplitude: f64,
    pub perturb_mode: usize,
    /// Extra snapshot times; `0` and `t_end` are always written.
    pub snapshot_times: Vec<f64>,
    pub spectra: bool,
    pub dealias: bool,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Lower edge of the monitored high-wavenumber band; half the Nyquist
    /// wavenumber when absent.
    pub k_band: Option<f64>,
    /// Write a diagnostics row every this many accepted steps.
    pub diag_stride: usize,
    /// A run is stopped as a blow-up once the high band holds more than
    /// this fraction of the peak interface amplitude (the grid no longer
    /// resolves the flow). Zero disables the check.
    pub blowup_band_ratio: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            params: PhysParams::default(),
            multiplier: MultiplierChoice::Regularized,
            theta1: None,
            theta2: None,
            model: ModelKind::GreenNaghdi,
            grid_n: 512,
            domain_half_length: 4.0,
            t_end: 2.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            initial_condition: InitialCondition::Gaussian,
            ic_amplitude: -1.0,
            ic_width: 4.0,
            shear_wbar: 0.0,
            perturb_amplitude: 1e-8,
            perturb_mode: 8,
            snapshot_times: Vec::new(),
            spectra: true,
            dealias: false,
            cg_tol: 1e-12,
            cg_max_iter: 200,
            k_band: None,
            diag_stride: 1,
            blowup_band_ratio: 1e-3,
            k_min: 0.1,
            k_max: 100.0,
            k_count: 1000,
        }
    }
}

const KEYS: &[&str] = &[
    "gamma",
    "epsilon",
    "mu",
    "delta",
    "inv_bond",
    "multiplier",
    "theta1",
    "theta2",
    "model",
    "grid_n",
    "domain_half_length",
    "t_end",
    "rel_tol",
    "abs_tol",
    "initial_condition",
    "ic_amplitude",
    "ic_width",
    "shear_wbar",
    "perturb_amplitude",
    "perturb_mode",
    "snapshot_times",
    "spectra",
    "dealias",
    "cg_tol",
    "cg_max_iter",
    "k_band",
    "diag_stride",
    "blowup_band_ratio",
    "k_min",
    "k_max",
    "k_count",
];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| Error::Parse {
        line,
        message: format!("bad value `{value}` for `{key}`: {e}"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("bad value `{value}` for `{key}`: expected true or false"),
        }),
    }
}

impl ExperimentConfig {
    /// Parses and validates a configuration document.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            };
            if seen.contains(&known) {
                return Err(Error::Parse {
                    line,
                    message: format!("`{key}` given twice"),
                });
            }
            seen.push(known);
            cfg.set(line, known, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let f = |v: &str| parse_value::<f64>(line, key, v);
        let u = |v: &str| parse_value::<usize>(line, key, v);
        match key {
            "gamma" => self.params.gamma = f(value)?,
            "epsilon" => self.params.epsilon = f(value)?,
            "mu" => self.params.mu = f(value)?,
            "delta" => self.params.delta = f(value)?,
            "inv_bond" => self.params.inv_bond = f(value)?,
            "multiplier" => self.multiplier = parse_value(line, key, value)?,
            "theta1" => self.theta1 = Some(f(value)?),
            "theta2" => self.theta2 = Some(f(value)?),
            "model" => {
                self.model = match value {
                    "gn" | "green_naghdi" => ModelKind::GreenNaghdi,
                    "sv" | "saint_venant" => ModelKind::SaintVenant,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: format!("bad value `{value}` for `model`: expected gn or saint_venant"),
                        })
                    }
                }
            }
            "grid_n" => self.grid_n = u(value)?,
            "domain_half_length" => self.domain_half_length = f(value)?,
            "t_end" => self.t_end = f(value)?,
            "rel_tol" => self.rel_tol = f(value)?,
            "abs_tol" => self.abs_tol = f(value)?,
            "initial_condition" => {
                self.initial_condition = match value {
                    "gaussian" => InitialCondition::Gaussian,
                    "rest" => InitialCondition::Rest,
                    "shear" => InitialCondition::Shear,
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: format!(
                                "bad value `{value}` for `initial_condition`: expected gaussian, rest or shear"
                            ),
                        })
                    }
                }
            }
            "ic_amplitude" => self.ic_amplitude = f(value)?,
            "ic_width" => self.ic_width = f(value)?,
            "shear_wbar" => self.shear_wbar = f(value)?,
            "perturb_amplitude" => self.perturb_amplitude = f(value)?,
            "perturb_mode" => self.perturb_mode = u(value)?,
            "snapshot_times" => {
                self.snapshot_times = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(f)
                    .collect::<Result<_>>()?
            }
            "spectra" => self.spectra = parse_bool(line, key, value)?,
            "dealias" => self.dealias = parse_bool(line, key, value)?,
            "cg_tol" => self.cg_tol = f(value)?,
            "cg_max_iter" => self.cg_max_iter = u(value)?,
            "k_band" => self.k_band = Some(f(value)?),
            "diag_stride" => self.diag_stride = u(value)?,
            "blowup_band_ratio" => self.blowup_band_ratio = f(value)?,
            "k_min" => self.k_min = f(value)?,
            "k_max" => self.k_max = f(value)?,
            "k_count" => self.k_count = u(value)?,
            _ => unreachable!("key list and setter disagree on `{key}`"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{v} must be positive")))
            }
        };
        Grid::new(self.grid_n, self.domain_half_length)?;
        positive("t_end", self.t_end)?;
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("cg_tol", self.cg_tol)?;
        positive("ic_width", self.ic_width)?;
        positive("k_min", self.k_min)?;
        positive("k_max", self.k_max)?;
        if let Some(t) = self.theta1 {
            positive("theta1", t)?;
        }
        if let Some(t) = self.theta2 {
            positive("theta2", t)?;
        }
        if let Some(k) = self.k_band {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::validation("k_band", format!("{k} must be nonnegative")));
            }
        }
        for (field, v) in [
            ("ic_amplitude", self.ic_amplitude),
            ("shear_wbar", self.shear_wbar),
            ("perturb_amplitude", self.perturb_amplitude),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(field, format!("{v} is not finite")));
            }
        }
        if self.k_max < self.k_min {
            return Err(Error::validation("k_max", "must not be below k_min"));
        }
        if self.k_count == 0 {
            return Err(Error::validation("k_count", "must be positive"));
        }
        if self.cg_max_iter == 0 {
            return Err(Error::validation("cg_max_iter", "must be positive"));
        }
        if !(self.blowup_band_ratio.is_finite() && self.blowup_band_ratio >= 0.0) {
            return Err(Error::validation("blowup_band_ratio", "must be finite and nonnegative"));
        }
        if self.diag_stride == 0 {
            return Err(Error::validation("diag_stride", "must be positive"));
        }
        if self.initial_condition == InitialCondition::Shear
            && (self.perturb_mode == 0 || self.perturb_mode >= self.grid_n / 2)
        {
            return Err(Error::validation("perturb_mode", "must lie strictly between 0 and grid_n / 2"));
        }
        if self
            .snapshot_times
            .iter()
            .any(|&t| !(t.is_finite() && t > 0.0 && t <= self.t_end))
            || self.snapshot_times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::validation(
                "snapshot_times",
                "must be increasing and inside (0, t_end]",
            ));
        }
        Ok(())
    }

    /// Renders the configuration so that [`ExperimentConfig::parse`] gives
    /// it back exactly.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("gamma", p.gamma.to_string());
        kv("epsilon", p.epsilon.to_string());
        kv("mu", p.mu.to_string());
        kv("delta", p.delta.to_string());
        kv("inv_bond", p.inv_bond.to_string());
        kv("multiplier", self.multiplier.name());
        if let Some(t) = self.theta1 {
            kv("theta1", t.to_string());
        }
        if let Some(t) = self.theta2 {
            kv("theta2", t.to_string());
        }
        kv(
            "model",
            match self.model {
                ModelKind::GreenNaghdi => "gn",
                ModelKind::SaintVenant => "saint_venant",
            }
            .into(),
        );
        kv("grid_n", self.grid_n.to_string());
        kv("domain_half_length", self.domain_half_length.to_string());
        kv("t_end", self.t_end.to_string());
        kv("rel_tol", self.rel_tol.to_string());
        kv("abs_tol", self.abs_tol.to_string());
        kv(
            "initial_condition",
            match self.initial_condition {
                InitialCondition::Gaussian => "gaussian",
                InitialCondition::Rest => "rest",
                InitialCondition::Shear => "shear",
            }
            .into(),
        );
        kv("ic_amplitude", self.ic_amplitude.to_string());
        kv("ic_width", self.ic_width.to_string());
        kv("shear_wbar", self.shear_wbar.to_string());
        kv("perturb_amplitude", self.perturb_amplitude.to_string());
        kv("perturb_mode", self.perturb_mode.to_string());
        kv(
            "snapshot_times",
            self.snapshot_times
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("spectra", self.spectra.to_string());
        kv("dealias", self.dealias.to_string());
        kv("cg_tol", self.cg_tol.to_string());
        kv("cg_max_iter", self.cg_max_iter.to_string());
        if let Some(k) = self.k_band {
            kv("k_band", k.to_string());
        }
        kv("diag_stride", self.diag_stride.to_string());
        kv("blowup_band_ratio", self.blowup_band_ratio.to_string());
        kv("k_min", self.k_min.to_string());
        kv("k_max", self.k_max.to_string());
        kv("k_count", self.k_count.to_string());
        s
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_n, self.domain_half_length)
    }

    /// The multiplier pair, loading the table for custom multipliers.
    pub fn multiplier_spec(&self) -> Result<MultiplierSpec> {
        self.spec_for(&self.multiplier)
    }

    /// Builds `choice` with this configuration's parameters and thetas.
    pub fn spec_for(&self, choice: &MultiplierChoice) -> Result<MultiplierSpec> {
        let delta = self.params.delta;
        match choice {
            MultiplierChoice::Identity => Ok(MultiplierSpec::Identity),
            MultiplierChoice::Regularized => MultiplierSpec::regularized(
                self.theta1.unwrap_or(1.0 / 15.0),
                self.theta2.unwrap_or(1.0 / (15.0 * delta * delta)),
            ),
            MultiplierChoice::Improved => MultiplierSpec::improved(delta),
            MultiplierChoice::Custom(path) => Ok(MultiplierSpec::custom(MultiplierTable::from_csv_path(path)?)),
        }
    }

    pub fn k_band_or_default(&self) -> f64 {
        self.k_band.unwrap_or_else(|| {
            Grid::new(self.grid_n, self.domain_half_length)
                .map(|g| g.nyquist() / 2.0)
                .unwrap_or(0.0)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_document_is_reference_experiment() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.params.gamma, 0.95);
        assert_eq!(cfg.params.inv_bond, 5e-4);
        assert_eq!(cfg.grid_n, 512);
        assert_eq!(cfg.ic_amplitude, -1.0);
    }

    #[test]
    fn partial_document() {
        let cfg = ExperimentConfig::parse("gamma = 0.9   # lighter\n\ndelta = 0.25\n").unwrap();
        assert_eq!(cfg.params.gamma, 0.9);
        assert_eq!(cfg.params.delta, 0.25);
        assert_eq!(cfg.params.mu, 0.1);
    }

    #[test]
    fn errors_carry_location() {
        assert!(matches!(
            ExperimentConfig::parse("delta = -1"),
            Err(Error::Validation { field: "delta", .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("gamma = 0.9\ngama = 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("# c\nmu 0.1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("mu = abc"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("mu = 0.1\nmu = 0.2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("grid_n = 100"),
            Err(Error::Validation { field: "grid_n", .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("t_end = 1\nsnapshot_times = 0.5, 2"),
            Err(Error::Validation { field: "snapshot_times", .. })
        ));
    }

    #[test]
    fn multiplier_names() {
        for (s, m) in [
            ("id", MultiplierChoice::Identity),
            ("original", MultiplierChoice::Identity),
            ("reg", MultiplierChoice::Regularized),
            ("imp", MultiplierChoice::Improved),
            ("custom:tables/f.csv", MultiplierChoice::Custom("tables/f.csv".into())),
        ] {
            assert_eq!(s.parse::<MultiplierChoice>().unwrap(), m);
        }
        assert!("custom:".parse::<MultiplierChoice>().is_err());
        assert!("fancy".parse::<MultiplierChoice>().is_err());
    }

    #[test]
    fn natural_thetas() {
        let cfg = ExperimentConfig::default();
        assert_eq!(
            cfg.multiplier_spec().unwrap(),
            MultiplierSpec::Regularized {
                theta1: 1.0 / 15.0,
                theta2: 4.0 / 15.0
            }
        );
    }

    fn configs() -> impl Strategy<Value = ExperimentConfig> {
        (
            (0.0f64..0.999, 0.0f64..2.0, 0.0f64..3.0, 0.01f64..10.0, 0.0f64..1e-2),
            (3u32..12, 0.1f64..100.0, 1e-3f64..50.0, 1e-14f64..1e-3, 1e-16f64..1e-6),
            (
                prop::sample::select(vec![
                    MultiplierChoice::Identity,
                    MultiplierChoice::Regularized,
                    MultiplierChoice::Improved,
                    MultiplierChoice::Custom("some dir/table.csv".into()),
                ]),
                prop::option::of(1e-3f64..10.0),
                any::<bool>(),
                -2.0f64..2.0,
                prop::collection::vec(0.0f64..1.0, 0..4),
                prop::option::of(0.0f64..100.0),
            ),
        )
            .prop_map(|((g, e, mu, d, b), (n, l, t, rt, at), (m, th, flag, amp, fr, kb))| {
                let mut times: Vec<f64> = fr.iter().map(|f| t * (0.01 + 0.99 * f)).collect();
                times.sort_by(f64::total_cmp);
                times.dedup();
                ExperimentConfig {
                    params: PhysParams { gamma: g, epsilon: e, mu, delta: d, inv_bond: b },
                    multiplier: m,
                    theta1: th,
                    theta2: th.map(|x| x * 3.0),
                    model: if flag { ModelKind::SaintVenant } else { ModelKind::GreenNaghdi },
                    grid_n: 1 << n,
                    domain_half_length: l,
                    t_end: t,
                    rel_tol: rt,
                    abs_tol: at,
                    initial_condition: if flag { InitialCondition::Shear } else { InitialCondition::Gaussian },
                    ic_amplitude: amp,
                    shear_wbar: amp * 0.37,
                    perturb_mode: 1 + (n as usize % 3),
                    snapshot_times: times,
                    spectra: !flag,
                    dealias: flag,
                    k_band: kb,
                    blowup_band_ratio: if flag { 0.0 } else { at * 1e6 },
                    ..ExperimentConfig::default()
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_round_trips(cfg in configs()) {
            prop_assume!(cfg.validate().is_ok());
            let text = cfg.serialize();
            let back = ExperimentConfig::parse(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
