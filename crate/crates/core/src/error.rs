use thiserror::Error;

use crate::model::{Bound, ParamName};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter {name} = {value} is outside {bound}")]
    OutOfRange {
        name: ParamName,
        value: f64,
        bound: Bound,
    },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("compartment {compartment} = {value} must be finite and non-negative")]
    InvalidState {
        compartment: &'static str,
        value: f64,
    },
}

impl ParamError {
    /// Name of the offending field, for field-level diagnostics.
    pub fn field(&self) -> String {
        match self {
            ParamError::OutOfRange { name, .. } => name.as_str().to_string(),
            ParamError::UnknownParameter(s) => s.clone(),
            ParamError::InvalidState { compartment, .. } => compartment.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("adaptive step underflow at t = {t} (step {step:e} days)")]
    StepFailure { t: f64, step: f64 },
    #[error("compartment {compartment} reached {value} at t = {t}, below the negativity tolerance")]
    InvariantViolation {
        t: f64,
        compartment: &'static str,
        value: f64,
    },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("endemic quadratic is degenerate (d = {d:e}); linear root: {linear_root:?}")]
    DegenerateQuadratic { d: f64, linear_root: Option<f64> },
    #[error("S-expression denominator vanishes at I = {i}")]
    SingularDenominator { i: f64 },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("equilibrium residual {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("unknown restriction level {0}; expected 1, 2, 3 or 4")]
    UnknownLevel(u8),
    #[error("capacity p{index} = {value} is outside [0, 1]")]
    InvalidCapacity { index: usize, value: f64 },
    #[error("l1 is undefined: delta = {delta} coincides with l2 = {l2}")]
    SingularL1 { delta: f64, l2: f64 },
    #[error("R0 is zero; sensitivity index undefined")]
    ZeroR0,
    #[error("grid value {0} lies outside [0, 1]")]
    GridOutOfRange(f64),
    #[error("{0} is not an intervention rate")]
    NotAnIntervention(ParamName),
    #[error("boost {0} must be finite and non-negative")]
    InvalidBoost(f64),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl From<ParamError> for ConfigError {
    fn from(e: ParamError) -> Self {
        ConfigError::Validation {
            field: e.field(),
            message: e.to_string(),
        }
    }
}
