//! Time integration of the model, invariant monitoring and trajectory
//! summaries.

mod integrator;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;
use crate::format::fmt_f64;
use crate::model::{derive_constants, rhs, ModelParameters, State, COMPARTMENTS};

pub use integrator::MIN_STEP;

/// Components below `-NEGATIVITY_TOLERANCE * n_cap` abort the run; smaller
/// negative values are clamped to zero when sampled.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// Default absolute tolerance as a fraction of the population cap. Kept
/// below [`NEGATIVITY_TOLERANCE`] so that local error alone cannot push a
/// draining compartment past the negativity floor.
pub const DEFAULT_ABS_TOL_FRACTION: f64 = 1e-10;

/// Infected individuals seeded by the default initial condition.
pub const DEFAULT_SEED_INFECTED: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    /// Classical fixed-step RK4.
    Rk4 { step: f64 },
    /// Adaptive Dormand-Prince 5(4). `abs_tol: None` means
    /// `DEFAULT_ABS_TOL_FRACTION * n_cap`.
    Rk45 { abs_tol: Option<f64>, rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    #[serde(flatten)]
    pub method: Method,
    /// Integration length (days).
    pub horizon: f64,
    /// Spacing of stored samples (days).
    pub sample_interval: f64,
}

impl IntegratorConfig {
    /// Adaptive RK45 with the default absolute tolerance and `rel_tol = 1e-8`.
    pub fn adaptive(horizon: f64, sample_interval: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45 {
                abs_tol: None,
                rel_tol: 1e-8,
            },
            horizon,
            sample_interval,
        }
    }

    pub fn rk4(step: f64, horizon: f64, sample_interval: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4 { step },
            horizon,
            sample_interval,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(DynamicsError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("horizon", self.horizon)?;
        positive("sample_interval", self.sample_interval)?;
        match self.method {
            Method::Rk4 { step } => positive("step", step)?,
            Method::Rk45 { abs_tol, rel_tol } => {
                if let Some(a) = abs_tol {
                    positive("abs_tol", a)?;
                }
                positive("rel_tol", rel_tol)?;
            }
        }
        Ok(())
    }

    /// Sample instants: multiples of `sample_interval`, plus the horizon
    /// itself when it is not a multiple.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.horizon / self.sample_interval + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|k| k as f64 * self.sample_interval).collect();
        let last = *times.last().expect("at least t = 0");
        if self.horizon - last > 1e-9 * self.horizon {
            times.push(self.horizon);
        }
        times
    }

    pub fn sample_count(&self) -> usize {
        (self.horizon / self.sample_interval).floor() as usize + 2
    }
}

/// S(0) = N(0) − 1000, I(0) = 1000, everything else empty.
pub fn default_initial_state() -> State {
    State {
        s: crate::model::INITIAL_POPULATION - DEFAULT_SEED_INFECTED,
        i: DEFAULT_SEED_INFECTED,
        ..State::ZERO
    }
}

/// Sampled solution of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<State>,
    non_healthy: Vec<f64>,
    total: Vec<f64>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,S,V,E,I,Q,H,R,N,non_healthy";

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            non_healthy: Vec::with_capacity(n),
            total: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, x: State) {
        self.times.push(t);
        self.non_healthy.push(x.non_healthy());
        self.total.push(x.total());
        self.states.push(x);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn states(&self) -> &[State] {
        &self.states
    }
    pub fn non_healthy(&self) -> &[f64] {
        &self.non_healthy
    }
    pub fn total(&self) -> &[f64] {
        &self.total
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn last_state(&self) -> Option<&State> {
        self.states.last()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
        for (k, x) in self.states.iter().enumerate() {
            write!(w, "{}", fmt_f64(self.times[k]))?;
            for v in x.to_array() {
                write!(w, ",{}", fmt_f64(v))?;
            }
            writeln!(
                w,
                ",{},{}",
                fmt_f64(self.total[k]),
                fmt_f64(self.non_healthy[k])
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

fn sample(
    t: f64,
    y: [f64; 7],
    floor: f64,
) -> Result<State, DynamicsError> {
    let mut out = y;
    for (k, v) in out.iter_mut().enumerate() {
        if !v.is_finite() || *v < -floor {
            return Err(DynamicsError::InvariantViolation {
                t,
                compartment: COMPARTMENTS[k],
                value: *v,
            });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(State::from_array(out))
}

/// Integrates the model from `initial` over `config.horizon` days.
pub fn simulate(
    params: &ModelParameters,
    initial: &State,
    config: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    config.validate()?;
    let initial = initial.validated()?;
    let n_cap = derive_constants(params).n_cap;
    let floor = NEGATIVITY_TOLERANCE * n_cap;
    let field = |y: &[f64; 7]| rhs(&State::from_array(*y), params);

    let times = config.sample_times();
    let mut traj = Trajectory::with_capacity(times.len());
    traj.push(0.0, initial);
    let mut y = initial.to_array();

    match config.method {
        Method::Rk4 { step } => {
            for w in times.windows(2) {
                y = integrator::rk4_advance(&field, y, w[0], w[1], step);
                traj.push(w[1], sample(w[1], y, floor)?);
            }
        }
        Method::Rk45 { abs_tol, rel_tol } => {
            let abs_tol = abs_tol.unwrap_or(DEFAULT_ABS_TOL_FRACTION * n_cap);
            let mut dopri = integrator::Dopri::new(&field, abs_tol, rel_tol);
            for w in times.windows(2) {
                y = dopri.advance(y, w[0], w[1])?;
                traj.push(w[1], sample(w[1], y, floor)?);
            }
        }
    }
    Ok(traj)
}

/// Maximum and terminal value of the non-healthy series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSummary {
    pub peak: f64,
    pub peak_time: f64,
    pub terminal: f64,
    pub terminal_time: f64,
}

pub fn peak_and_limit(traj: &Trajectory) -> Result<PeakSummary, DynamicsError> {
    let (k_peak, &peak) = traj
        .non_healthy
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (k, v)| match best {
            Some((_, b)) if *b >= *v => best,
            _ => Some((k, v)),
        })
        .ok_or(DynamicsError::EmptyTrajectory)?;
    let last = traj.len() - 1;
    Ok(PeakSummary {
        peak,
        peak_time: traj.times[k_peak],
        terminal: traj.non_healthy[last],
        terminal_time: traj.times[last],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::disease_free_equilibrium;

    #[test]
    fn sample_times_cover_horizon() {
        let c = IntegratorConfig::adaptive(10.0, 3.0);
        assert_eq!(c.sample_times(), vec![0.0, 3.0, 6.0, 9.0, 10.0]);
        let c = IntegratorConfig::adaptive(10.0, 2.5);
        assert_eq!(c.sample_times(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
    }

    #[test]
    fn rejects_bad_config() {
        let p = ModelParameters::endemic_case();
        let x = default_initial_state();
        for bad in [
            IntegratorConfig::rk4(0.0, 10.0, 1.0),
            IntegratorConfig::rk4(0.1, -1.0, 1.0),
            IntegratorConfig::rk4(0.1, 10.0, 0.0),
            IntegratorConfig {
                method: Method::Rk45 {
                    abs_tol: Some(-1.0),
                    rel_tol: 1e-8,
                },
                horizon: 1.0,
                sample_interval: 1.0,
            },
        ] {
            assert!(matches!(
                simulate(&p, &x, &bad),
                Err(DynamicsError::InvalidConfig(_))
            ));
        }
        let neg = State { s: -1.0, ..x };
        assert!(matches!(
            simulate(&p, &neg, &IntegratorConfig::adaptive(1.0, 1.0)),
            Err(DynamicsError::Param(_))
        ));
    }

    #[test]
    fn dfe_is_a_fixed_point() {
        let p = ModelParameters::endemic_case();
        let e0 = disease_free_equilibrium(&p);
        // the default absolute tolerance bounds drift in the small
        // compartments once the controller reaches the stability limit
        let abs_tol = DEFAULT_ABS_TOL_FRACTION * derive_constants(&p).n_cap;
        for (config, slack) in [
            (IntegratorConfig::adaptive(400.0, 10.0), abs_tol),
            (IntegratorConfig::rk4(0.5, 400.0, 10.0), 0.0),
        ] {
            let traj = simulate(&p, &e0, &config).unwrap();
            for x in traj.states() {
                for (a, b) in x.to_array().iter().zip(e0.to_array()) {
                    let tol = slack + 1e-9 * b.abs().max(1.0);
                    assert!((a - b).abs() <= tol, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn peak_of_constant_and_decreasing_series() {
        let p = ModelParameters::endemic_case();
        let e0 = disease_free_equilibrium(&p);
        let traj = simulate(&p, &e0, &IntegratorConfig::adaptive(50.0, 1.0)).unwrap();
        let s = peak_and_limit(&traj).unwrap();
        let c = derive_constants(&p);
        let expected = p.lambda_prime() / c.k3 + p.tau() * p.lambda_prime() / (c.k3 * c.k4);
        assert!((s.peak - expected).abs() < 1e-6 * expected);
        assert!((s.terminal - expected).abs() < 1e-6 * expected);

        let mut t = Trajectory::with_capacity(3);
        for (k, nh) in [5.0, 3.0, 1.0].into_iter().enumerate() {
            t.push(k as f64, State { e: nh, ..State::ZERO });
        }
        let s = peak_and_limit(&t).unwrap();
        assert_eq!((s.peak, s.peak_time, s.terminal), (5.0, 0.0, 1.0));
    }

    #[test]
    fn empty_trajectory_has_no_peak() {
        assert_eq!(
            peak_and_limit(&Trajectory::with_capacity(0)),
            Err(DynamicsError::EmptyTrajectory)
        );
    }

    #[test]
    fn csv_layout() {
        let p = ModelParameters::endemic_case();
        let traj = simulate(&p, &default_initial_state(), &IntegratorConfig::adaptive(2.0, 1.0))
            .unwrap();
        let csv = traj.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first.len(), 10);
        assert_eq!(first[1], 273_523_621.0 - 1000.0);
        assert_eq!(first[4], 1000.0);
    }
}
