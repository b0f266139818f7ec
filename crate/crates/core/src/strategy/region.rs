use serde::{Deserialize, Serialize};

use crate::equilibrium::compute_r0;
use crate::error::StrategyError;
use crate::model::{derive_constants, ModelParameters, ParamName};

/// `|delta − l2|` below this leaves l1 undefined.
pub const SINGULAR_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeSign {
    Positive,
    Negative,
    Flat,
}

/// The `R0 = 1` line in the (u1, u2) plane and the feasible part of the
/// unit square on which `R0 < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionGeometry {
    pub delta: f64,
    /// u1-axis intercept (u2 = 0).
    pub l1: f64,
    /// u2-axis intercept (u1 = 0); independent of delta.
    pub l2: f64,
    /// u1 at which the line meets u2 = 1.
    pub l3: f64,
    /// Sign of du2/du1 along the line.
    pub slope_sign: SlopeSign,
    /// Counter-clockwise vertices `[u1, u2]`. Empty when no point of the
    /// square has R0 < 1.
    pub feasible_polygon: Vec<[f64; 2]>,
}

/// `R0 − 1 ∝ T·(μ(1−u2) + (1−δ)u1) − K·(u1 + μ)` with both factors positive.
struct Line {
    t: f64,
    k: f64,
    mu: f64,
    delta: f64,
}

impl Line {
    fn new(p: &ModelParameters) -> Self {
        let c = derive_constants(p);
        let (k3, k4, k5) = (c.k3, c.k4, c.k5);
        let t = p.alpha() * p.beta() * k4 * p.kappa() * p.theta() * p.lambda_prime()
            + p.alpha() * p.beta() * p.tau() * p.theta() * p.phi() * p.lambda_prime()
            + p.beta() * k3 * k4 * k5 * p.lambda() * p.theta();
        let k = c.k1 * c.k2 * k3 * k4 * k5 * p.mu();
        Line {
            t,
            k,
            mu: p.mu(),
            delta: p.delta(),
        }
    }

    fn g(&self, u1: f64, u2: f64) -> f64 {
        self.t * (self.mu * (1.0 - u2) + (1.0 - self.delta) * u1) - self.k * (u1 + self.mu)
    }
}

/// Intercepts of the `R0 = 1` line and the clipped feasible polygon.
///
/// Only δ and the non-intervention parameters of `params` matter; its u1
/// and u2 are ignored.
pub fn region_geometry(
    params: &ModelParameters,
    delta: f64,
) -> Result<RegionGeometry, StrategyError> {
    let p = params.with(ParamName::Delta, delta)?;
    let line = Line::new(&p);
    let (t, k, mu) = (line.t, line.k, line.mu);

    let l2 = (t - k) / t;
    if (delta - l2).abs() < SINGULAR_BAND {
        return Err(StrategyError::SingularL1 { delta, l2 });
    }
    let l1 = mu * (t - k) / (delta * t - t + k);
    let l3 = k * mu / (t - k - delta * t);

    let slope = t * (1.0 - delta) - k;
    let slope_sign = if slope > 0.0 {
        SlopeSign::Positive
    } else if slope < 0.0 {
        SlopeSign::Negative
    } else {
        SlopeSign::Flat
    };

    Ok(RegionGeometry {
        delta,
        l1,
        l2,
        l3,
        slope_sign,
        feasible_polygon: clip_unit_square(&line, &p),
    })
}

/// Clips the unit square to `g ≤ 0`, dropping vertices where R0 creeps
/// above 1 through rounding.
fn clip_unit_square(line: &Line, p: &ModelParameters) -> Vec<[f64; 2]> {
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(5);
    for i in 0..4 {
        let a = square[i];
        let b = square[(i + 1) % 4];
        let ga = line.g(a[0], a[1]);
        let gb = line.g(b[0], b[1]);
        if ga <= 0.0 {
            out.push(a);
        }
        if (ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0) {
            let s = ga / (ga - gb);
            let mut x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            // the moving coordinate is solved exactly on the edge
            if a[0] == b[0] {
                x[1] = solve_u2(line, x[0]).clamp(0.0, 1.0);
            } else {
                x[0] = solve_u1(line, x[1]).clamp(0.0, 1.0);
            }
            out.push(x);
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out.retain(|v| {
        let q = p.with_unchecked(ParamName::U1, v[0]).with_unchecked(ParamName::U2, v[1]);
        compute_r0(&q) <= 1.0 + 1e-9
    });
    out
}

fn solve_u1(line: &Line, u2: f64) -> f64 {
    line.mu * (line.t * (1.0 - u2) - line.k) / (line.k - line.t * (1.0 - line.delta))
}

fn solve_u2(line: &Line, u1: f64) -> f64 {
    1.0 - (line.k * (u1 + line.mu) - line.t * (1.0 - line.delta) * u1) / (line.t * line.mu)
}
