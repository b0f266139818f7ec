use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Population at day zero used to calibrate the newborn recruitment rate.
pub const INITIAL_POPULATION: f64 = 273_523_621.0;

/// Natural death rate: one over a 65-year life expectancy, per day.
pub const NATURAL_DEATH_RATE: f64 = 1.0 / (65.0 * 365.0);

/// The seventeen model parameters, in the order they are tabulated.
///
/// The declaration order doubles as the deterministic tie-break order for
/// sensitivity ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Lambda,
    LambdaPrime,
    Mu,
    MuPrime,
    Beta,
    Delta,
    Alpha,
    Theta,
    Gamma,
    Phi,
    Kappa,
    Tau,
    U1,
    U2,
    U3,
    U4,
    U5,
}

/// Admissible range of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Strictly positive and finite.
    Positive,
    /// Closed unit interval.
    UnitInterval,
}

impl Bound {
    pub fn contains(self, value: f64) -> bool {
        match self {
            Bound::Positive => value.is_finite() && value > 0.0,
            Bound::UnitInterval => (0.0..=1.0).contains(&value),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Positive => f.write_str("(0, inf)"),
            Bound::UnitInterval => f.write_str("[0, 1]"),
        }
    }
}

impl ParamName {
    pub const ALL: [ParamName; 17] = [
        ParamName::Lambda,
        ParamName::LambdaPrime,
        ParamName::Mu,
        ParamName::MuPrime,
        ParamName::Beta,
        ParamName::Delta,
        ParamName::Alpha,
        ParamName::Theta,
        ParamName::Gamma,
        ParamName::Phi,
        ParamName::Kappa,
        ParamName::Tau,
        ParamName::U1,
        ParamName::U2,
        ParamName::U3,
        ParamName::U4,
        ParamName::U5,
    ];

    /// The five intervention rates.
    pub const INTERVENTIONS: [ParamName; 5] = [
        ParamName::U1,
        ParamName::U2,
        ParamName::U3,
        ParamName::U4,
        ParamName::U5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Lambda => "lambda",
            ParamName::LambdaPrime => "lambda_prime",
            ParamName::Mu => "mu",
            ParamName::MuPrime => "mu_prime",
            ParamName::Beta => "beta",
            ParamName::Delta => "delta",
            ParamName::Alpha => "alpha",
            ParamName::Theta => "theta",
            ParamName::Gamma => "gamma",
            ParamName::Phi => "phi",
            ParamName::Kappa => "kappa",
            ParamName::Tau => "tau",
            ParamName::U1 => "u1",
            ParamName::U2 => "u2",
            ParamName::U3 => "u3",
            ParamName::U4 => "u4",
            ParamName::U5 => "u5",
        }
    }

    /// Greek-letter label used in human-facing tables.
    pub fn symbol(self) -> &'static str {
        match self {
            ParamName::Lambda => "λ",
            ParamName::LambdaPrime => "λ′",
            ParamName::Mu => "μ",
            ParamName::MuPrime => "μ′",
            ParamName::Beta => "β",
            ParamName::Delta => "δ",
            ParamName::Alpha => "α",
            ParamName::Theta => "θ",
            ParamName::Gamma => "γ",
            ParamName::Phi => "φ",
            ParamName::Kappa => "κ",
            ParamName::Tau => "τ",
            ParamName::U1 => "u1",
            ParamName::U2 => "u2",
            ParamName::U3 => "u3",
            ParamName::U4 => "u4",
            ParamName::U5 => "u5",
        }
    }

    pub fn bound(self) -> Bound {
        match self {
            ParamName::Delta
            | ParamName::U1
            | ParamName::U2
            | ParamName::U3
            | ParamName::U4
            | ParamName::U5 => Bound::UnitInterval,
            _ => Bound::Positive,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ParamError::UnknownParameter(s.to_string()))
    }
}

/// Validated parameter set of the SVEIQHR model.
///
/// Values are checked against their [`Bound`] on every construction path;
/// an out-of-range value is rejected, never clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters", into = "RawParameters")]
pub struct ModelParameters {
    values: [f64; 17],
}

impl ModelParameters {
    /// Tabulated values for every parameter except the vaccine efficacy and
    /// the mobility intervention rate, which have no published default.
    pub fn table1(delta: f64, u2: f64) -> Result<Self, ParamError> {
        let mut values = [0.0; 17];
        for name in ParamName::ALL {
            values[name.index()] = match name {
                ParamName::Delta => delta,
                ParamName::U2 => u2,
                other => table1_default(other).expect("tabulated parameter"),
            };
        }
        Self::from_values(values)
    }

    /// The disease-free scenario (δ = 0.653, u1 = 1e-8, u2 = 0.93).
    pub fn disease_free_case() -> Self {
        Self::table1(0.653, 0.93)
            .and_then(|p| p.with(ParamName::U1, 1e-8))
            .expect("valid preset")
    }

    /// The endemic scenario (δ = 0.653, u1 = 0.4, u2 = 0.278).
    pub fn endemic_case() -> Self {
        Self::table1(0.653, 0.278).expect("valid preset")
    }

    pub fn from_values(values: [f64; 17]) -> Result<Self, ParamError> {
        for name in ParamName::ALL {
            check(name, values[name.index()])?;
        }
        Ok(Self { values })
    }

    /// Values in [`ParamName::ALL`] order.
    pub fn values(&self) -> [f64; 17] {
        self.values
    }

    pub fn get(&self, name: ParamName) -> f64 {
        self.values[name.index()]
    }

    /// Copy with one parameter replaced, validated.
    pub fn with(&self, name: ParamName, value: f64) -> Result<Self, ParamError> {
        check(name, value)?;
        Ok(self.with_unchecked(name, value))
    }

    /// Copy with one parameter replaced and no range check. Used only for
    /// numerical differentiation, where a stencil point may step just past
    /// a bound.
    pub(crate) fn with_unchecked(&self, name: ParamName, value: f64) -> Self {
        let mut values = self.values;
        values[name.index()] = value;
        Self { values }
    }

    pub fn lambda(&self) -> f64 {
        self.get(ParamName::Lambda)
    }
    pub fn lambda_prime(&self) -> f64 {
        self.get(ParamName::LambdaPrime)
    }
    pub fn mu(&self) -> f64 {
        self.get(ParamName::Mu)
    }
    pub fn mu_prime(&self) -> f64 {
        self.get(ParamName::MuPrime)
    }
    pub fn beta(&self) -> f64 {
        self.get(ParamName::Beta)
    }
    pub fn delta(&self) -> f64 {
        self.get(ParamName::Delta)
    }
    pub fn alpha(&self) -> f64 {
        self.get(ParamName::Alpha)
    }
    pub fn theta(&self) -> f64 {
        self.get(ParamName::Theta)
    }
    pub fn gamma(&self) -> f64 {
        self.get(ParamName::Gamma)
    }
    pub fn phi(&self) -> f64 {
        self.get(ParamName::Phi)
    }
    pub fn kappa(&self) -> f64 {
        self.get(ParamName::Kappa)
    }
    pub fn tau(&self) -> f64 {
        self.get(ParamName::Tau)
    }
    pub fn u1(&self) -> f64 {
        self.get(ParamName::U1)
    }
    pub fn u2(&self) -> f64 {
        self.get(ParamName::U2)
    }
    pub fn u3(&self) -> f64 {
        self.get(ParamName::U3)
    }
    pub fn u4(&self) -> f64 {
        self.get(ParamName::U4)
    }
    pub fn u5(&self) -> f64 {
        self.get(ParamName::U5)
    }
}

/// Tabulated default, or `None` for δ and u2.
pub fn table1_default(name: ParamName) -> Option<f64> {
    let v = match name {
        ParamName::Lambda => NATURAL_DEATH_RATE * INITIAL_POPULATION,
        ParamName::LambdaPrime => 3000.0,
        ParamName::Mu => NATURAL_DEATH_RATE,
        ParamName::MuPrime => 0.0291,
        ParamName::Beta => 4.74396e-8,
        ParamName::Delta => return None,
        ParamName::Alpha => 0.011,
        ParamName::Theta => 0.4,
        ParamName::Gamma => 0.1,
        ParamName::Phi => 0.8198,
        ParamName::Kappa => 0.1,
        ParamName::Tau => 0.01,
        ParamName::U1 => 0.4,
        ParamName::U2 => return None,
        ParamName::U3 => 0.5,
        ParamName::U4 => 0.3,
        ParamName::U5 => 0.0833,
    };
    Some(v)
}

fn check(name: ParamName, value: f64) -> Result<(), ParamError> {
    let bound = name.bound();
    if bound.contains(value) {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { name, value, bound })
    }
}

/// Serialized form: one named field per parameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawParameters {
    lambda: f64,
    lambda_prime: f64,
    mu: f64,
    mu_prime: f64,
    beta: f64,
    delta: f64,
    alpha: f64,
    theta: f64,
    gamma: f64,
    phi: f64,
    kappa: f64,
    tau: f64,
    u1: f64,
    u2: f64,
    u3: f64,
    u4: f64,
    u5: f64,
}

impl TryFrom<RawParameters> for ModelParameters {
    type Error = ParamError;

    fn try_from(r: RawParameters) -> Result<Self, Self::Error> {
        ModelParameters::from_values([
            r.lambda,
            r.lambda_prime,
            r.mu,
            r.mu_prime,
            r.beta,
            r.delta,
            r.alpha,
            r.theta,
            r.gamma,
            r.phi,
            r.kappa,
            r.tau,
            r.u1,
            r.u2,
            r.u3,
            r.u4,
            r.u5,
        ])
    }
}

impl From<ModelParameters> for RawParameters {
    fn from(p: ModelParameters) -> Self {
        let [lambda, lambda_prime, mu, mu_prime, beta, delta, alpha, theta, gamma, phi, kappa, tau, u1, u2, u3, u4, u5] =
            p.values;
        RawParameters {
            lambda,
            lambda_prime,
            mu,
            mu_prime,
            beta,
            delta,
            alpha,
            theta,
            gamma,
            phi,
            kappa,
            tau,
            u1,
            u2,
            u3,
            u4,
            u5,
        }
    }
}
