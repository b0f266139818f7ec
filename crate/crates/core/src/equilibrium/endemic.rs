//! Endemic equilibria as roots of a quadratic in the infected population.
//!
//! Eliminating every other compartment from the equilibrium equations
//! leaves two expressions for S as a function of I; equating them gives
//! `d·I² + e·I + f = 0`. Each admissible root is back-substituted to
//! rebuild the full state.

use serde::{Deserialize, Serialize};

use super::spectrum::Eigenvalue;
use super::{compute_r0, relative_residual, report_at, EquilibriumKind, EquilibriumReport};
use super::RESIDUAL_TOLERANCE;
use crate::error::EquilibriumError;
use crate::model::{derive_constants, ModelParameters, State};

/// `|d|` below this is treated as a vanishing leading coefficient.
pub const DEGENERATE_LEADING: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoefficients {
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

pub fn quadratic_coefficients(p: &ModelParameters) -> QuadraticCoefficients {
    let c = derive_constants(p);
    let (k1, k2, k3, k4, k5) = (c.k1, c.k2, c.k3, c.k4, c.k5);
    let (th, be, al) = (p.theta(), p.beta(), p.alpha());
    let (ga, ka, ph, ta) = (p.gamma(), p.kappa(), p.phi(), p.tau());
    let (u1, u2, u3, u4, u5) = (p.u1(), p.u2(), p.u3(), p.u4(), p.u5());
    let (de, mu, lp, lam) = (p.delta(), p.mu(), p.lambda_prime(), p.lambda());
    let k_all = k1 * k2 * k3 * k4 * k5;

    let d = (1.0 - de)
        * th
        * (1.0 - u2)
        * be
        * be
        * ((((ga * k3 + ka * u4) * k4 + ph * (k3 * u5 + ta * u4)) * th
            + u3 * k2 * (k4 * ka + ta * ph))
            * al
            - k_all);

    // ((1 − u2)μ + u1(1 − δ)); appears with both signs below
    let force = (1.0 - u2) * mu + u1 * (1.0 - de);
    let x = u4 * (u2 - 1.0) * mu + (u1 * u4 - be * lp * (u2 - 1.0)) * (de - 1.0);
    let e = th
        * (((((ga * force * k3 - x * ka) * k4) - ph * (-u5 * force * k3 + ta * x)) * th
            + u3 * k2 * (k4 * ka + ta * ph) * force)
            * al
            + k3 * k4
                * k5
                * (be * lam * (u2 - 1.0) * (de - 1.0) * th
                    + ((de + u2 - 2.0) * mu + u1 * (de - 1.0)) * k1 * k2))
        * be;

    let f = th
        * (force * ((al * ka * lp + k3 * k5 * lam) * k4 + al * ph * lp * ta) * be * th
            - k_all * mu * (mu + u1));

    QuadraticCoefficients { d, e, f }
}

/// Sign pattern of the two roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootClass {
    ComplexPair,
    TwoNegative,
    OppositeSigns,
    TwoPositive,
    /// At least one root is exactly zero.
    ZeroRoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndemicSolveReport {
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub r0: f64,
    pub roots: Vec<Eigenvalue>,
    pub root_class: RootClass,
    pub positive_equilibrium: Option<State>,
    /// Relative residual of `positive_equilibrium`, when present.
    pub residual: Option<f64>,
    /// Two positive roots were found below threshold; no equilibrium is
    /// constructed and the case needs manual review.
    pub needs_review: bool,
}

/// Roots of `d·x² + e·x + f` avoiding cancellation in the small root.
fn solve_quadratic(q: &QuadraticCoefficients) -> Vec<Eigenvalue> {
    let QuadraticCoefficients { d, e, f } = *q;
    let disc = e * e - 4.0 * d * f;
    if disc < 0.0 {
        let re = -e / (2.0 * d);
        let im = (-disc).sqrt() / (2.0 * d.abs());
        return vec![Eigenvalue { re, im }, Eigenvalue { re, im: -im }];
    }
    let sq = disc.sqrt();
    let big = -0.5 * (e + e.signum() * sq);
    if big == 0.0 {
        return vec![Eigenvalue::real(0.0), Eigenvalue::real(0.0)];
    }
    let mut r = [big / d, f / big];
    r.sort_by(|a, b| b.total_cmp(a));
    r.into_iter().map(Eigenvalue::real).collect()
}

fn classify_roots(roots: &[Eigenvalue]) -> RootClass {
    if roots.iter().any(|r| r.im != 0.0) {
        return RootClass::ComplexPair;
    }
    let pos = roots.iter().filter(|r| r.re > 0.0).count();
    let neg = roots.iter().filter(|r| r.re < 0.0).count();
    match (pos, neg) {
        (2, 0) => RootClass::TwoPositive,
        (0, 2) => RootClass::TwoNegative,
        (1, 1) => RootClass::OppositeSigns,
        _ => RootClass::ZeroRoot,
    }
}

/// Rebuilds the full equilibrium state from a value of I.
pub fn back_substitute(p: &ModelParameters, i: f64) -> State {
    let c = derive_constants(p);
    let e = c.k2 * i / p.theta();
    let inflow_q = p.lambda_prime() + p.u3() * e + p.u4() * i;
    let q = inflow_q / c.k3;
    let h = (p.tau() / c.k3 * inflow_q + p.u5() * i) / c.k4;
    let r = (p.gamma() * i + p.kappa() / c.k3 * inflow_q + p.phi() * h) / c.k5;
    let s = (p.lambda() + p.alpha() * r) / (p.mu() + p.u1() + (1.0 - p.u2()) * p.beta() * i);
    let v = p.u1() * s / ((1.0 - p.delta()) * p.beta() * i + p.mu());
    State { s, v, e, i, q, h, r }
}

/// Solves for endemic equilibria.
///
/// Above threshold the unique positive root is back-substituted and its
/// residual verified; below threshold the roots are only classified.
pub fn endemic_equilibrium(p: &ModelParameters) -> Result<EndemicSolveReport, EquilibriumError> {
    let coeffs = quadratic_coefficients(p);
    if coeffs.d.abs() < DEGENERATE_LEADING {
        let linear_root = (coeffs.e != 0.0).then(|| -coeffs.f / coeffs.e);
        return Err(EquilibriumError::DegenerateQuadratic {
            d: coeffs.d,
            linear_root,
        });
    }
    let r0 = compute_r0(p);
    let roots = solve_quadratic(&coeffs);
    let root_class = classify_roots(&roots);
    let f_over_d = coeffs.f / coeffs.d;

    if r0 > 1.0 && f_over_d >= 0.0 {
        return Err(EquilibriumError::Inconsistent(format!(
            "R0 = {r0} > 1 but f/d = {f_over_d:e} is not negative"
        )));
    }

    let mut positive_equilibrium = None;
    let mut residual = None;
    if root_class == RootClass::OppositeSigns {
        let i1 = roots.iter().map(|r| r.re).fold(f64::MIN, f64::max);
        let x = back_substitute(p, i1);
        if x.to_array().iter().all(|v| *v > 0.0) {
            let res = relative_residual(p, &x);
            if r0 > 1.0 && res > RESIDUAL_TOLERANCE {
                return Err(EquilibriumError::ResidualTooLarge { residual: res });
            }
            positive_equilibrium = Some(x);
            residual = Some(res);
        }
    }

    Ok(EndemicSolveReport {
        d: coeffs.d,
        e: coeffs.e,
        f: coeffs.f,
        r0,
        roots,
        root_class,
        positive_equilibrium,
        residual,
        needs_review: root_class == RootClass::TwoPositive,
    })
}

/// Stability report at the positive endemic equilibrium, if one exists.
pub fn endemic_stability(
    p: &ModelParameters,
) -> Result<Option<EquilibriumReport>, EquilibriumError> {
    let solved = endemic_equilibrium(p)?;
    Ok(solved
        .positive_equilibrium
        .map(|x| report_at(p, x, EquilibriumKind::Endemic)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyResidual {
    /// S from equating the two expressions for E.
    pub s_from_exposed: f64,
    /// S from the susceptible balance after substituting E = k2·I/θ.
    pub s_from_balance: f64,
    /// `|s_from_exposed − s_from_balance| / max(|·|)`.
    pub s_mismatch: f64,
    /// Relative vector-field residual of the back-substituted state.
    pub rhs_residual: f64,
}

/// Evaluates both closed-form expressions for S at a candidate I and the
/// residual of the back-substituted state. At a true endemic value of I
/// both quantities vanish, independently of the quadratic's coefficients.
pub fn endemic_consistency_check(
    p: &ModelParameters,
    i: f64,
) -> Result<ConsistencyResidual, EquilibriumError> {
    let c = derive_constants(p);
    let (be, de, u1, u2, mu, th) = (p.beta(), p.delta(), p.u1(), p.u2(), p.mu(), p.theta());

    let terms = [
        be * de * u2 * i,
        -be * de * i,
        -be * u2 * i,
        be * i,
        -u1 * de,
        -mu * u2,
        mu,
        u1,
    ];
    let den: f64 = terms.iter().sum();
    let den_scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if i.is_nan() || i <= 0.0 || den.abs() <= 1e-14 * den_scale {
        return Err(EquilibriumError::SingularDenominator { i });
    }
    let s_from_exposed = c.k1 * c.k2 * (mu + be * i - be * de * i) / (be * th * den);

    let inflow_q = p.lambda_prime() + c.k2 * p.u3() * i / th + p.u4() * i;
    let recovered_in = p.gamma() * i
        + p.kappa() / c.k3 * inflow_q
        + p.phi() / c.k4 * (p.tau() / c.k3 * inflow_q + p.u5() * i);
    let s_from_balance = (p.lambda() + p.alpha() / c.k5 * recovered_in)
        / (mu + u1 + (1.0 - u2) * be * i);

    let s_mismatch = (s_from_exposed - s_from_balance).abs()
        / s_from_exposed.abs().max(s_from_balance.abs());
    let rhs_residual = relative_residual(p, &back_substitute(p, i));
    Ok(ConsistencyResidual {
        s_from_exposed,
        s_from_balance,
        s_mismatch,
        rhs_residual,
    })
}
