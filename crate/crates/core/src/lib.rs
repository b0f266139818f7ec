//! SVEIQHR epidemic model with vaccination, quarantine, hospitalisation
//! and mobility restriction.

pub mod config;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod figures;
pub mod format;
pub mod model;
pub mod strategy;

pub use error::{ConfigError, DynamicsError, EquilibriumError, ParamError, StrategyError};
pub use model::{ModelParameters, ParamName, State};
