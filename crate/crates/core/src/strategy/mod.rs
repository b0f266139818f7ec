//! Intervention analytics: restriction levels, the feasible region of
//! intervention rates, sensitivity ranking and scenario sweeps.

mod region;
mod sensitivity;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{peak_and_limit, simulate, IntegratorConfig, PeakSummary};
use crate::equilibrium::compute_r0;
use crate::error::StrategyError;
use crate::model::{ModelParameters, ParamName, State};

pub use region::{region_geometry, RegionGeometry, SlopeSign, SINGULAR_BAND};
pub use sensitivity::{
    sensitivity_index, sensitivity_index_fd, significance_ranking, SensitivityRow,
    SensitivityTable, SENSITIVITY_CSV_HEADER,
};

/// Published mobility-restriction rate for each restriction level.
pub const PPKM_U2: [f64; 4] = [0.278, 0.389, 0.694, 0.861];

/// Operating capacities of the nine regulated sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionProfile {
    pub capacities: [f64; 9],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
}

impl RestrictionProfile {
    pub fn new(capacities: [f64; 9]) -> Result<Self, StrategyError> {
        let p = RestrictionProfile {
            capacities,
            level: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Level-1 sector capacities.
    pub fn level1() -> Self {
        RestrictionProfile {
            capacities: [0.75, 1.0, 0.75, 0.75, 0.75, 0.75, 0.75, 0.5, 0.5],
            level: Some(1),
        }
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        for (i, &v) in self.capacities.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(StrategyError::InvalidCapacity {
                    index: i + 1,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// One minus the mean sector capacity.
pub fn u2_from_profile(profile: &RestrictionProfile) -> Result<f64, StrategyError> {
    profile.validate()?;
    Ok(1.0 - profile.capacities.iter().sum::<f64>() / 9.0)
}

pub fn ppkm_level_u2(level: u8) -> Result<f64, StrategyError> {
    match level {
        1..=4 => Ok(PPKM_U2[usize::from(level) - 1]),
        _ => Err(StrategyError::UnknownLevel(level)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceAxis {
    U1,
    U2,
    Delta,
}

impl SliceAxis {
    pub fn param(self) -> ParamName {
        match self {
            SliceAxis::U1 => ParamName::U1,
            SliceAxis::U2 => ParamName::U2,
            SliceAxis::Delta => ParamName::Delta,
        }
    }
}

/// `(value, R0)` along a grid of one of u1, u2 or δ.
pub fn r0_slice(
    p: &ModelParameters,
    vary: SliceAxis,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, StrategyError> {
    grid.iter()
        .map(|&x| {
            if !(0.0..=1.0).contains(&x) {
                return Err(StrategyError::GridOutOfRange(x));
            }
            Ok((x, compute_r0(&p.with(vary.param(), x)?)))
        })
        .collect()
}

/// `n + 1` evenly spaced points on [0, 1].
pub fn unit_grid(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub target: ParamName,
    pub boost: f64,
    /// Boosted value after clamping to [0, 1].
    pub value: f64,
    pub r0: f64,
    pub summary: PeakSummary,
    /// Baseline peak minus this run's peak; positive means improvement.
    pub peak_reduction: f64,
    pub terminal_reduction: f64,
    pub non_healthy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub times: Vec<f64>,
    pub baseline_r0: f64,
    pub baseline: PeakSummary,
    pub baseline_non_healthy: Vec<f64>,
    /// Target-major, in the order requested.
    pub runs: Vec<SweepRun>,
}

/// Reruns the simulation with each target rate scaled by `1 + boost`.
pub fn intervention_sweep(
    p: &ModelParameters,
    initial: &State,
    config: &IntegratorConfig,
    targets: &[ParamName],
    boosts: &[f64],
) -> Result<SweepReport, StrategyError> {
    for t in targets {
        if !ParamName::INTERVENTIONS.contains(t) {
            return Err(StrategyError::NotAnIntervention(*t));
        }
    }
    for &b in boosts {
        if !b.is_finite() || b < 0.0 {
            return Err(StrategyError::InvalidBoost(b));
        }
    }

    let base = simulate(p, initial, config)?;
    let baseline = peak_and_limit(&base)?;

    let jobs: Vec<(ParamName, f64)> = targets
        .iter()
        .flat_map(|&t| boosts.iter().map(move |&b| (t, b)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(target, boost)| {
            let value = (p.get(target) * (1.0 + boost)).clamp(0.0, 1.0);
            let q = p.with(target, value)?;
            let traj = simulate(&q, initial, config)?;
            let summary = peak_and_limit(&traj)?;
            Ok(SweepRun {
                target,
                boost,
                value,
                r0: compute_r0(&q),
                summary,
                peak_reduction: baseline.peak - summary.peak,
                terminal_reduction: baseline.terminal - summary.terminal,
                non_healthy: traj.non_healthy().to_vec(),
            })
        })
        .collect::<Result<Vec<_>, StrategyError>>()?;

    Ok(SweepReport {
        times: base.times().to_vec(),
        baseline_r0: compute_r0(p),
        baseline,
        baseline_non_healthy: base.non_healthy().to_vec(),
        runs,
    })
}
