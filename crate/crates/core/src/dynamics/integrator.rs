//! Explicit Runge-Kutta steppers over a fixed-size state.

use crate::error::DynamicsError;

pub(crate) type Vec7 = [f64; 7];

/// Smallest adaptive step accepted before the run is abandoned (days).
pub const MIN_STEP: f64 = 1e-12;

fn axpy(y: &Vec7, terms: &[(f64, &Vec7)]) -> Vec7 {
    let mut out = *y;
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += c * ki;
        }
    }
    out
}

/// One classical fourth-order step.
pub(crate) fn rk4_step<F: Fn(&Vec7) -> Vec7>(f: &F, y: &Vec7, h: f64) -> Vec7 {
    let k1 = f(y);
    let k2 = f(&axpy(y, &[(0.5 * h, &k1)]));
    let k3 = f(&axpy(y, &[(0.5 * h, &k2)]));
    let k4 = f(&axpy(y, &[(h, &k3)]));
    axpy(y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)])
}

/// Advances `y` from `t0` to `t1` with uniform RK4 steps no longer than `step`.
pub(crate) fn rk4_advance<F: Fn(&Vec7) -> Vec7>(
    f: &F,
    y: Vec7,
    t0: f64,
    t1: f64,
    step: f64,
) -> Vec7 {
    let span = t1 - t0;
    let n = ((span / step) - 1e-9).ceil().max(1.0) as usize;
    let h = span / n as f64;
    (0..n).fold(y, |acc, _| rk4_step(f, &acc, h))
}

// Dormand-Prince 5(4) tableau. The vector field is autonomous, so the
// stage nodes are not needed.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand-Prince integrator state carried across sample segments.
pub(crate) struct Dopri<'a, F> {
    f: &'a F,
    abs_tol: f64,
    rel_tol: f64,
    /// Step proposed by the controller for the next attempt.
    h: f64,
    /// Derivative at the current point (first-same-as-last).
    k1: Option<Vec7>,
}

impl<'a, F: Fn(&Vec7) -> Vec7> Dopri<'a, F> {
    pub fn new(f: &'a F, abs_tol: f64, rel_tol: f64) -> Self {
        Dopri {
            f,
            abs_tol,
            rel_tol,
            h: 0.0,
            k1: None,
        }
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }

    /// Starting step estimate (Hairer, Nørsett and Wanner, II.4).
    fn initial_step(&self, y: &Vec7, k1: &Vec7, span: f64) -> f64 {
        let norm = |v: &Vec7, w: &Vec7| -> f64 {
            let s: f64 = v
                .iter()
                .zip(w.iter())
                .map(|(vi, yi)| (vi / self.scale(*yi, *yi)).powi(2))
                .sum();
            (s / 7.0).sqrt()
        };
        let d0 = norm(y, y);
        let d1 = norm(k1, y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = axpy(y, &[(h0, k1)]);
        let k2 = (self.f)(&y1);
        let diff: Vec7 = std::array::from_fn(|i| k2[i] - k1[i]);
        let d2 = norm(&diff, y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advances `y` from `t0` to exactly `t1`.
    pub fn advance(&mut self, mut y: Vec7, t0: f64, t1: f64) -> Result<Vec7, DynamicsError> {
        let f = self.f;
        let mut t = t0;
        let mut k1 = match self.k1 {
            Some(k) => k,
            None => f(&y),
        };
        if self.h <= 0.0 {
            self.h = self.initial_step(&y, &k1, t1 - t0);
        }
        let mut rejected = false;
        while t < t1 {
            let remaining = t1 - t;
            let truncated = self.h >= remaining;
            let h = if truncated { remaining } else { self.h };
            if h < MIN_STEP && !truncated {
                return Err(DynamicsError::StepFailure { t, step: h });
            }

            let k2 = f(&axpy(&y, &[(h * A21, &k1)]));
            let k3 = f(&axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
            let k4 = f(&axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
            let k5 = f(&axpy(
                &y,
                &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
            ));
            let k6 = f(&axpy(
                &y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ));
            let y_new = axpy(
                &y,
                &[
                    (h * A71, &k1),
                    (h * A73, &k3),
                    (h * A74, &k4),
                    (h * A75, &k5),
                    (h * A76, &k6),
                ],
            );
            let k7 = f(&y_new);

            let mut acc = 0.0;
            for i in 0..7 {
                let err = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                acc += (err / self.scale(y[i], y_new[i])).powi(2);
            }
            let err = (acc / 7.0).sqrt();
            if !err.is_finite() {
                self.h = 0.2 * h;
                rejected = true;
                if self.h < MIN_STEP {
                    return Err(DynamicsError::StepFailure { t, step: self.h });
                }
                continue;
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if truncated { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                let grown = h * if rejected { factor.min(1.0) } else { factor };
                // a step shortened to land on t1 says nothing about the
                // controller's preferred size
                if !truncated || grown > self.h {
                    self.h = grown;
                }
                rejected = false;
            } else {
                self.h = h * factor;
                rejected = true;
                if self.h < MIN_STEP {
                    return Err(DynamicsError::StepFailure { t, step: self.h });
                }
            }
        }
        self.k1 = Some(k1);
        Ok(y)
    }
}
