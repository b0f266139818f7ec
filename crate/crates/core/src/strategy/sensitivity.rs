//! Normalised sensitivity of R0 to each parameter, `(∂R0/∂p)·(p/R0)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::equilibrium::compute_r0;
use crate::error::StrategyError;
use crate::format::fmt_f64;
use crate::model::{derive_constants, ModelParameters, ParamName};

/// Sensitivity index from the analytic derivative of ln R0.
///
/// Returns 0 when the parameter itself is 0.
pub fn sensitivity_index(p: &ModelParameters, name: ParamName) -> Result<f64, StrategyError> {
    if compute_r0(p) == 0.0 {
        return Err(StrategyError::ZeroR0);
    }
    let c = derive_constants(p);
    let (k1, k2, k3, k4, k5) = (c.k1, c.k2, c.k3, c.k4, c.k5);
    let (mu, al, lp) = (p.mu(), p.alpha(), p.lambda_prime());
    let (ka, ph, ta) = (p.kappa(), p.phi(), p.tau());
    let (de, u1, u2) = (p.delta(), p.u1(), p.u2());

    // R0 = θβ·W·Z / ((u1+μ)·k1·k2·μ) with W = λ + M
    let m = al * lp * (ka * k4 + ph * ta) / (k3 * k4 * k5);
    let w = p.lambda() + m;
    let z = mu * (1.0 - u2) + (1.0 - de) * u1;
    let over_z = |num: f64| if num == 0.0 { 0.0 } else { num / z };

    let value = match name {
        ParamName::Lambda => p.lambda() / w,
        ParamName::LambdaPrime => m / w,
        ParamName::Mu => {
            let dw = al
                * lp
                * (-ka / (k3 * k5) * (1.0 / k3 + 1.0 / k5)
                    - ph * ta / (k3 * k4 * k5) * (1.0 / k3 + 1.0 / k4 + 1.0 / k5));
            mu * (dw / w + over_z(1.0 - u2) - 1.0 / (u1 + mu) - 1.0 / k1 - 1.0 / k2 - 1.0 / mu)
        }
        ParamName::MuPrime => {
            let dw = -al * lp * ph * ta / (k3 * k5 * k4 * k4);
            p.mu_prime() * (dw / w - 1.0 / k2)
        }
        ParamName::Beta => 1.0,
        ParamName::Delta => -over_z(de * u1),
        ParamName::Alpha => al * m * (1.0 / al - 1.0 / k5) / w,
        ParamName::Theta => 1.0 - p.theta() / k1,
        ParamName::Gamma => -p.gamma() / k2,
        ParamName::Phi => {
            let dw = al * lp * ta * (mu + p.mu_prime()) / (k3 * k5 * k4 * k4);
            ph * dw / w
        }
        ParamName::Kappa => ka * m * (k4 / (ka * k4 + ph * ta) - 1.0 / k3) / w,
        ParamName::Tau => {
            let dw = al * lp * (-ka / (k3 * k3 * k5) + ph * (k3 - ta) / (k3 * k3 * k4 * k5));
            ta * dw / w
        }
        ParamName::U1 => u1 * (over_z(1.0 - de) - 1.0 / (u1 + mu)),
        ParamName::U2 => -over_z(mu * u2),
        ParamName::U3 => -p.u3() / k1,
        ParamName::U4 => -p.u4() / k2,
        ParamName::U5 => -p.u5() / k2,
    };
    Ok(if p.get(name) == 0.0 { 0.0 } else { value })
}

/// Sensitivity index by fourth-order central differences of ln R0 in
/// ln p. Independent of [`sensitivity_index`]; used to cross-check it.
pub fn sensitivity_index_fd(p: &ModelParameters, name: ParamName) -> Result<f64, StrategyError> {
    if compute_r0(p) == 0.0 {
        return Err(StrategyError::ZeroR0);
    }
    let x = p.get(name);
    if x == 0.0 {
        return Ok(0.0);
    }
    let h = 1e-3;
    let f = |s: f64| compute_r0(&p.with_unchecked(name, x * s.exp())).ln();
    Ok((-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub parameter: ParamName,
    pub upsilon: f64,
    /// −1, 0 or 1.
    pub sign: i8,
    pub abs: f64,
    /// 1 is most significant.
    pub rank: usize,
    /// Set when the parameter is 0, so the index vanishes by definition.
    pub degenerate: bool,
}

/// Indices for all seventeen parameters, in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub rows: Vec<SensitivityRow>,
}

pub const SENSITIVITY_CSV_HEADER: &str = "parameter,upsilon,abs,rank";

impl SensitivityTable {
    pub fn get(&self, name: ParamName) -> &SensitivityRow {
        &self.rows[name.index()]
    }

    /// Parameter names from most to least significant.
    pub fn ordering(&self) -> Vec<ParamName> {
        let mut rows: Vec<&SensitivityRow> = self.rows.iter().collect();
        rows.sort_by_key(|r| r.rank);
        rows.into_iter().map(|r| r.parameter).collect()
    }

    /// One line per parameter in rank order.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(SENSITIVITY_CSV_HEADER);
        out.push('\n');
        for name in self.ordering() {
            let r = self.get(name);
            let _ = writeln!(
                out,
                "{},{},{},{}",
                name.as_str(),
                fmt_f64(r.upsilon),
                fmt_f64(r.abs),
                r.rank
            );
        }
        out
    }
}

/// Ranks all parameters by decreasing `|Υ|`; ties keep declaration order.
pub fn significance_ranking(p: &ModelParameters) -> Result<SensitivityTable, StrategyError> {
    let mut rows = ParamName::ALL
        .iter()
        .map(|&name| {
            let upsilon = sensitivity_index(p, name)?;
            Ok(SensitivityRow {
                parameter: name,
                upsilon,
                sign: if upsilon > 0.0 {
                    1
                } else if upsilon < 0.0 {
                    -1
                } else {
                    0
                },
                abs: upsilon.abs(),
                rank: 0,
                degenerate: p.get(name) == 0.0,
            })
        })
        .collect::<Result<Vec<_>, StrategyError>>()?;

    let mut order: Vec<usize> = (0..rows.len()).collect();
    // stable sort keeps declaration order among equal magnitudes
    order.sort_by(|&a, &b| rows[b].abs.total_cmp(&rows[a].abs));
    for (rank, idx) in order.into_iter().enumerate() {
        rows[idx].rank = rank + 1;
    }
    Ok(SensitivityTable { rows })
}
