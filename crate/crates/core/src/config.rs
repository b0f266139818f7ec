//! Scenario files.
//!
//! ```toml
//! outputs = ["trajectory", "r0"]
//!
//! [parameters]
//! delta = 0.653
//! ppkm_level = 1     # or u2 = 0.278
//!
//! [initial]
//! preset = "default"
//!
//! [integrator]
//! method = "rk45"
//! horizon = 730.0
//! sample_interval = 1.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{default_initial_state, IntegratorConfig, Method};
use crate::equilibrium::disease_free_equilibrium;
use crate::error::ConfigError;
use crate::model::{table1_default, ModelParameters, ParamName, State};
use crate::strategy::ppkm_level_u2;

/// Parameter values over the tabulated defaults. δ is always required;
/// u2 is required unless `ppkm_level` is given.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u4: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u5: Option<f64>,
    /// Restriction level 1-4; sets u2 from the published lookup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppkm_level: Option<u8>,
}

impl ParameterOverrides {
    pub fn get(&self, name: ParamName) -> Option<f64> {
        match name {
            ParamName::Lambda => self.lambda,
            ParamName::LambdaPrime => self.lambda_prime,
            ParamName::Mu => self.mu,
            ParamName::MuPrime => self.mu_prime,
            ParamName::Beta => self.beta,
            ParamName::Delta => self.delta,
            ParamName::Alpha => self.alpha,
            ParamName::Theta => self.theta,
            ParamName::Gamma => self.gamma,
            ParamName::Phi => self.phi,
            ParamName::Kappa => self.kappa,
            ParamName::Tau => self.tau,
            ParamName::U1 => self.u1,
            ParamName::U2 => self.u2,
            ParamName::U3 => self.u3,
            ParamName::U4 => self.u4,
            ParamName::U5 => self.u5,
        }
    }

    pub fn set(&mut self, name: ParamName, value: Option<f64>) {
        let slot = match name {
            ParamName::Lambda => &mut self.lambda,
            ParamName::LambdaPrime => &mut self.lambda_prime,
            ParamName::Mu => &mut self.mu,
            ParamName::MuPrime => &mut self.mu_prime,
            ParamName::Beta => &mut self.beta,
            ParamName::Delta => &mut self.delta,
            ParamName::Alpha => &mut self.alpha,
            ParamName::Theta => &mut self.theta,
            ParamName::Gamma => &mut self.gamma,
            ParamName::Phi => &mut self.phi,
            ParamName::Kappa => &mut self.kappa,
            ParamName::Tau => &mut self.tau,
            ParamName::U1 => &mut self.u1,
            ParamName::U2 => &mut self.u2,
            ParamName::U3 => &mut self.u3,
            ParamName::U4 => &mut self.u4,
            ParamName::U5 => &mut self.u5,
        };
        *slot = value;
    }

    /// Applies defaults and validates.
    pub fn resolve(&self) -> Result<ModelParameters, ConfigError> {
        let u2 = match (self.u2, self.ppkm_level) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Validation {
                    field: "ppkm_level".into(),
                    message: "cannot be combined with an explicit u2".into(),
                })
            }
            (None, Some(level)) => Some(ppkm_level_u2(level).map_err(|e| {
                ConfigError::Validation {
                    field: "ppkm_level".into(),
                    message: e.to_string(),
                }
            })?),
            (u2, None) => u2,
        };
        let mut values = [0.0; 17];
        for name in ParamName::ALL {
            let given = if name == ParamName::U2 { u2 } else { self.get(name) };
            values[name.index()] = match given.or_else(|| table1_default(name)) {
                Some(v) => v,
                None => {
                    let hint = if name == ParamName::U2 {
                        "required (set u2 or ppkm_level)"
                    } else {
                        "required; no default value exists"
                    };
                    return Err(ConfigError::Validation {
                        field: name.as_str().into(),
                        message: hint.into(),
                    });
                }
            };
        }
        Ok(ModelParameters::from_values(values)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialPreset {
    /// One thousand infected in the initial population, nobody else infected.
    #[default]
    Default,
    /// The disease-free equilibrium of the scenario's parameters.
    DiseaseFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Preset { preset: InitialPreset },
    Explicit(State),
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Preset {
            preset: InitialPreset::Default,
        }
    }
}

impl InitialSpec {
    pub fn resolve(&self, p: &ModelParameters) -> Result<State, ConfigError> {
        let x = match *self {
            InitialSpec::Preset {
                preset: InitialPreset::Default,
            } => default_initial_state(),
            InitialSpec::Preset {
                preset: InitialPreset::DiseaseFree,
            } => disease_free_equilibrium(p),
            InitialSpec::Explicit(x) => x,
        };
        Ok(x.validated()?)
    }

    pub fn label(&self) -> &'static str {
        match self {
            InitialSpec::Preset {
                preset: InitialPreset::Default,
            } => "default",
            InitialSpec::Preset {
                preset: InitialPreset::DiseaseFree,
            } => "disease-free",
            InitialSpec::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    #[default]
    Rk45,
}

pub const DEFAULT_HORIZON: f64 = 730.0;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 1.0;
pub const DEFAULT_RK4_STEP: f64 = 0.1;
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default)]
    pub method: MethodName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
}

impl IntegratorSection {
    pub fn resolve(&self) -> Result<IntegratorConfig, ConfigError> {
        let method = match self.method {
            MethodName::Rk4 => {
                if self.abs_tol.is_some() || self.rel_tol.is_some() {
                    return Err(ConfigError::Validation {
                        field: "integrator".into(),
                        message: "tolerances apply only to method = \"rk45\"".into(),
                    });
                }
                Method::Rk4 {
                    step: self.step.unwrap_or(DEFAULT_RK4_STEP),
                }
            }
            MethodName::Rk45 => {
                if self.step.is_some() {
                    return Err(ConfigError::Validation {
                        field: "step".into(),
                        message: "applies only to method = \"rk4\"".into(),
                    });
                }
                Method::Rk45 {
                    abs_tol: self.abs_tol,
                    rel_tol: self.rel_tol.unwrap_or(DEFAULT_REL_TOL),
                }
            }
        };
        let cfg = IntegratorConfig {
            method,
            horizon: self.horizon.unwrap_or(DEFAULT_HORIZON),
            sample_interval: self.sample_interval.unwrap_or(DEFAULT_SAMPLE_INTERVAL),
        };
        cfg.validate().map_err(|e| ConfigError::Validation {
            field: "integrator".into(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Trajectory,
    R0,
    Equilibria,
    Sensitivity,
    Region,
    Sweep,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Trajectory => "trajectory",
            OutputKind::R0 => "r0",
            OutputKind::Equilibria => "equilibria",
            OutputKind::Sensitivity => "sensitivity",
            OutputKind::Region => "region",
            OutputKind::Sweep => "sweep",
        }
    }
}

pub const DEFAULT_BOOSTS: [f64; 2] = [0.3, 0.6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_targets")]
    pub targets: Vec<ParamName>,
    #[serde(default = "default_boosts")]
    pub boosts: Vec<f64>,
}

fn default_targets() -> Vec<ParamName> {
    ParamName::INTERVENTIONS.to_vec()
}

fn default_boosts() -> Vec<f64> {
    DEFAULT_BOOSTS.to_vec()
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            targets: default_targets(),
            boosts: default_boosts(),
        }
    }
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Trajectory]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub parameters: ParameterOverrides,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParameters,
    pub initial: State,
    pub integrator: IntegratorConfig,
    pub outputs: Vec<OutputKind>,
    pub sweep: SweepSection,
}

impl ScenarioConfig {
    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        let params = self.parameters.resolve()?;
        for t in &self.sweep.targets {
            if !ParamName::INTERVENTIONS.contains(t) {
                return Err(ConfigError::Validation {
                    field: "sweep.targets".into(),
                    message: format!("{t} is not an intervention rate"),
                });
            }
        }
        if let Some(b) = self.sweep.boosts.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(ConfigError::Validation {
                field: "sweep.boosts".into(),
                message: format!("{b} must be finite and non-negative"),
            });
        }
        Ok(Scenario {
            initial: self.initial.resolve(&params)?,
            integrator: self.integrator.resolve()?,
            outputs: self.outputs.clone(),
            sweep: self.sweep.clone(),
            params,
        })
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

/// Parses and validates a scenario from TOML text.
pub fn parse_config(src: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(src, s.start)).unwrap_or((0, 0));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    cfg.resolve()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&src)
}

/// TOML text that [`parse_config`] reads back to an equal value.
pub fn emit_config(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario config is always representable")
}
