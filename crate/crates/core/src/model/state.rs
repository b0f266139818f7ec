use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Compartment populations (individuals, real-valued).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

pub const COMPARTMENTS: [&str; 7] = ["S", "V", "E", "I", "Q", "H", "R"];

impl State {
    pub const ZERO: State = State {
        s: 0.0,
        v: 0.0,
        e: 0.0,
        i: 0.0,
        q: 0.0,
        h: 0.0,
        r: 0.0,
    };

    pub fn from_array(x: [f64; 7]) -> Self {
        let [s, v, e, i, q, h, r] = x;
        State { s, v, e, i, q, h, r }
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.s, self.v, self.e, self.i, self.q, self.h, self.r]
    }

    /// Total population N.
    pub fn total(&self) -> f64 {
        self.to_array().iter().sum()
    }

    /// E + I + Q + H.
    pub fn non_healthy(&self) -> f64 {
        self.e + self.i + self.q + self.h
    }

    /// Checks that every component is finite and non-negative.
    pub fn validated(self) -> Result<Self, ParamError> {
        for (name, value) in COMPARTMENTS.iter().zip(self.to_array()) {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ParamError::InvalidState {
                    compartment: name,
                    value,
                });
            }
        }
        Ok(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}
