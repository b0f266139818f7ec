//! Parameter and state types plus exact evaluation of the vector field.

mod params;
mod state;

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

pub use params::{
    table1_default, Bound, ModelParameters, ParamName, INITIAL_POPULATION, NATURAL_DEATH_RATE,
};
pub use state::{State, COMPARTMENTS};

pub type Matrix7 = SMatrix<f64, 7, 7>;

/// Composite rates shared by the equilibrium and threshold formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// θ + u3 + μ: total exit rate from E.
    pub k1: f64,
    /// γ + u4 + u5 + μ + μ′: total exit rate from I.
    pub k2: f64,
    /// κ + τ + μ: total exit rate from Q.
    pub k3: f64,
    /// φ + μ + μ′: total exit rate from H.
    pub k4: f64,
    /// μ + α: total exit rate from R.
    pub k5: f64,
    /// Susceptible population at the disease-free equilibrium.
    pub k6: f64,
    /// (λ + λ′)/μ, the upper bound of the invariant region.
    pub n_cap: f64,
}

pub fn derive_constants(p: &ModelParameters) -> DerivedConstants {
    let mu = p.mu();
    let k1 = p.theta() + p.u3() + mu;
    let k2 = p.gamma() + p.u4() + p.u5() + mu + p.mu_prime();
    let k3 = p.kappa() + p.tau() + mu;
    let k4 = p.phi() + mu + p.mu_prime();
    let k5 = mu + p.alpha();
    let out = p.u1() + mu;
    let al = p.alpha() * p.lambda_prime();
    let k6 = p.lambda() / out
        + al * p.kappa() / (out * k3 * k5)
        + al * p.phi() * p.tau() / (out * k3 * k4 * k5);
    DerivedConstants {
        k1,
        k2,
        k3,
        k4,
        k5,
        k6,
        n_cap: (p.lambda() + p.lambda_prime()) / mu,
    }
}

/// Time derivative (dS, dV, dE, dI, dQ, dH, dR)/dt.
pub fn rhs(x: &State, p: &ModelParameters) -> [f64; 7] {
    let State { s, v, e, i, q, h, r } = *x;
    let mu = p.mu();
    let mu_p = p.mu_prime();
    let infect_s = (1.0 - p.u2()) * p.beta() * s * i;
    let infect_v = (1.0 - p.delta()) * p.beta() * v * i;
    [
        p.lambda() + p.alpha() * r - infect_s - p.u1() * s - mu * s,
        p.u1() * s - infect_v - mu * v,
        infect_s - p.theta() * e + infect_v - p.u3() * e - mu * e,
        p.theta() * e - p.gamma() * i - p.u4() * i - p.u5() * i - mu * i - mu_p * i,
        p.lambda_prime() + p.u3() * e + p.u4() * i - p.kappa() * q - p.tau() * q - mu * q,
        p.tau() * q + p.u5() * i - p.phi() * h - mu * h - mu_p * h,
        p.gamma() * i - p.alpha() * r + p.kappa() * q + p.phi() * h - mu * r,
    ]
}

/// Analytic Jacobian of [`rhs`], rows are equations and columns are
/// compartments, both in S, V, E, I, Q, H, R order.
pub fn jacobian(x: &State, p: &ModelParameters) -> Matrix7 {
    let c = derive_constants(p);
    let mu = p.mu();
    let bs = (1.0 - p.u2()) * p.beta();
    let bv = (1.0 - p.delta()) * p.beta();
    let (s, v, i) = (x.s, x.v, x.i);
    #[rustfmt::skip]
    let j = Matrix7::from_row_slice(&[
        // S
        -bs * i - p.u1() - mu, 0.0, 0.0, -bs * s, 0.0, 0.0, p.alpha(),
        // V
        p.u1(), -bv * i - mu, 0.0, -bv * v, 0.0, 0.0, 0.0,
        // E
        bs * i, bv * i, -c.k1, bs * s + bv * v, 0.0, 0.0, 0.0,
        // I
        0.0, 0.0, p.theta(), -c.k2, 0.0, 0.0, 0.0,
        // Q
        0.0, 0.0, p.u3(), p.u4(), -c.k3, 0.0, 0.0,
        // H
        0.0, 0.0, 0.0, p.u5(), p.tau(), -c.k4, 0.0,
        // R
        0.0, 0.0, 0.0, p.gamma(), p.kappa(), p.phi(), -c.k5,
    ]);
    j
}
