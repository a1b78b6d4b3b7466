//! Pseudo-spectral simulation and linear stability analysis for modified
//! two-layer Green-Naghdi models of internal waves.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod gn;
pub mod integrator;
pub mod io;
pub mod multipliers;
pub mod params;
pub mod presets;
pub mod run;
pub mod saint_venant;
pub mod spectral;
pub mod stability;

pub use error::{Error, Layer, Result};
pub use multipliers::{MultiplierSpec, MultiplierTable};
pub use params::PhysParams;
pub use spectral::{Field, Grid, Symbol};
