//! Disease-free equilibrium, next-generation-matrix reproduction number,
//! endemic equilibria and local stability.

mod endemic;
mod spectrum;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::EquilibriumError;
use crate::model::{derive_constants, jacobian, rhs, ModelParameters, State};

pub use endemic::{
    back_substitute, endemic_consistency_check, endemic_equilibrium, endemic_stability,
    quadratic_coefficients, ConsistencyResidual, EndemicSolveReport, QuadraticCoefficients,
    RootClass,
};
pub use spectrum::{classify, eigenvalues, spectral_radius, Eigenvalue, Verdict, MARGINAL_BAND};

/// Tolerance on the relative vector-field residual of a computed equilibrium.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Closed-form disease-free equilibrium.
pub fn disease_free_equilibrium(p: &ModelParameters) -> State {
    let c = derive_constants(p);
    let lp = p.lambda_prime();
    State {
        s: c.k6,
        v: p.u1() * c.k6 / p.mu(),
        e: 0.0,
        i: 0.0,
        q: lp / c.k3,
        h: p.tau() * lp / (c.k3 * c.k4),
        r: lp * (p.kappa() * c.k4 + p.phi() * p.tau()) / (c.k3 * c.k4 * c.k5),
    }
}

/// `max |rhs(x)| / max(1, max |x|)`.
pub fn relative_residual(p: &ModelParameters, x: &State) -> f64 {
    let r = rhs(x, p).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    r / x.max_abs().max(1.0)
}

/// New-infection and transition matrices over the infected compartments
/// (E, I, Q, H), linearised at the disease-free equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgmPair {
    pub f: Matrix4<f64>,
    pub v: Matrix4<f64>,
}

impl NgmPair {
    /// F·V⁻¹.
    pub fn next_generation_matrix(&self) -> Matrix4<f64> {
        // V is lower-triangular with a positive diagonal
        let v_inv = self.v.try_inverse().expect("V is invertible");
        self.f * v_inv
    }

    /// Spectral radius of F·V⁻¹ from a numeric eigensolve.
    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.next_generation_matrix())
    }
}

pub fn ngm(p: &ModelParameters) -> NgmPair {
    let c = derive_constants(p);
    let mut f = Matrix4::zeros();
    f[(0, 1)] = (1.0 - p.u2()) * p.beta() * c.k6
        + (1.0 - p.delta()) * p.beta() * p.u1() * c.k6 / p.mu();
    #[rustfmt::skip]
    let v = Matrix4::new(
        c.k1,       0.0,      0.0,      0.0,
        -p.theta(), c.k2,     0.0,      0.0,
        -p.u3(),    -p.u4(),  c.k3,     0.0,
        0.0,        -p.u5(),  -p.tau(), c.k4,
    );
    NgmPair { f, v }
}

/// Basic reproduction number in closed form.
pub fn compute_r0(p: &ModelParameters) -> f64 {
    let c = derive_constants(p);
    let mu = p.mu();
    p.theta() * p.beta() * c.k6 * (mu * (1.0 - p.u2()) + (1.0 - p.delta()) * p.u1())
        / (c.k1 * c.k2 * mu)
}

/// Coefficients of the `x² + b·x + c` factor of the characteristic
/// polynomial of the Jacobian at the disease-free equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFactor {
    pub b: f64,
    pub c: f64,
}

pub fn quadratic_factor(p: &ModelParameters) -> QuadraticFactor {
    let k6 = derive_constants(p).k6;
    let (mu, th, be) = (p.mu(), p.theta(), p.beta());
    let exits_i = p.gamma() + p.u4() + p.u5() + p.mu_prime();
    let b = 2.0 * mu + p.gamma() + th + p.u3() + p.u4() + p.u5() + p.mu_prime();
    let c = mu * mu
        + (p.gamma() + th + p.u3() + p.u4() + p.u5() + p.mu_prime()) * mu
        + ((p.u2() - 1.0) * be * k6 + exits_i) * th
        + p.u3() * exits_i
        + be * th * k6 * p.u1() * (p.delta() - 1.0) / mu;
    QuadraticFactor { b, c }
}

/// The five eigenvalues of the Jacobian at the disease-free equilibrium
/// that do not depend on transmission: −μ, −u1−μ, −k3, −k4, −k5.
pub fn dfe_fixed_eigenvalues(p: &ModelParameters) -> [f64; 5] {
    let c = derive_constants(p);
    [-p.mu(), -p.u1() - p.mu(), -c.k3, -c.k4, -c.k5]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    DiseaseFree,
    Endemic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub point: State,
    pub kind: EquilibriumKind,
    pub r0: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    pub verdict: Verdict,
    /// Relative vector-field residual at `point`.
    pub residual: f64,
    /// Only for the disease-free equilibrium.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quadratic_factor: Option<QuadraticFactor>,
}

pub(crate) fn report_at(
    p: &ModelParameters,
    point: State,
    kind: EquilibriumKind,
) -> EquilibriumReport {
    let eigs = eigenvalues(&jacobian(&point, p));
    EquilibriumReport {
        point,
        kind,
        r0: compute_r0(p),
        verdict: classify(&eigs),
        eigenvalues: eigs,
        residual: relative_residual(p, &point),
        quadratic_factor: None,
    }
}

/// Stability report for the disease-free equilibrium.
///
/// Fails with [`EquilibriumError::Inconsistent`] if the sign of `c` does not
/// oppose the sign of `R0 − 1`, which would mean the threshold formula and
/// the characteristic polynomial disagree.
pub fn dfe_stability(p: &ModelParameters) -> Result<EquilibriumReport, EquilibriumError> {
    let mut report = report_at(p, disease_free_equilibrium(p), EquilibriumKind::DiseaseFree);
    let qf = quadratic_factor(p);
    let excess = report.r0 - 1.0;
    if excess.abs() > 1e-9 && qf.c != 0.0 && (qf.c > 0.0) == (excess > 0.0) {
        return Err(EquilibriumError::Inconsistent(format!(
            "c = {:e} has the same sign as R0 - 1 = {:e}",
            qf.c, excess
        )));
    }
    report.quadratic_factor = Some(qf);
    Ok(report)
}
