//! Reference computations that do not go through the library's closed forms.

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sveiqhr::equilibrium::disease_free_equilibrium;
use sveiqhr::model::{rhs, table1_default, Bound, ModelParameters, ParamName};
use sveiqhr::State;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fractions uniform on [0, 1), rates within a factor of two of the table.
pub fn random_params(rng: &mut ChaCha8Rng) -> ModelParameters {
    let mut values = [0.0; 17];
    for name in ParamName::ALL {
        values[name.index()] = match name.bound() {
            Bound::UnitInterval => rng.random_range(0.0..1.0),
            Bound::Positive => {
                table1_default(name).unwrap() * 2f64.powf(rng.random_range(-1.0..1.0))
            }
        };
    }
    ModelParameters::from_values(values).unwrap()
}

/// Central differences; exact up to rounding since the field is bilinear.
pub fn fd_jacobian(p: &ModelParameters, x: [f64; 7]) -> [[f64; 7]; 7] {
    let mut j = [[0.0; 7]; 7];
    for c in 0..7 {
        let h = 1e-2 * x[c].abs().max(1.0);
        let (mut xp, mut xm) = (x, x);
        xp[c] += h;
        xm[c] -= h;
        let fp = rhs(&State::from_array(xp), p);
        let fm = rhs(&State::from_array(xm), p);
        for r in 0..7 {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// Spectral radius of F V^-1 with V taken from the linearised field.
/// F has a single nonzero entry, so F V^-1 is rank one and its only
/// nonzero eigenvalue is its (0, 0) entry.
pub fn ngm_radius(p: &ModelParameters) -> f64 {
    const INFECTED: [usize; 4] = [2, 3, 4, 5];
    let x0 = disease_free_equilibrium(p);
    let j = fd_jacobian(p, x0.to_array());
    let mut f = Matrix4::zeros();
    f[(0, 1)] = p.beta() * ((1.0 - p.u2()) * x0.s + (1.0 - p.delta()) * x0.v);
    let mut v = Matrix4::zeros();
    for (a, &r) in INFECTED.iter().enumerate() {
        for (b, &c) in INFECTED.iter().enumerate() {
            v[(a, b)] = f[(a, b)] - j[r][c];
        }
    }
    let k = f * v.try_inverse().expect("V is nonsingular");
    k[(0, 0)].abs()
}

/// Zero of `g` on [lo, hi] by bisection; `g` must change sign.
pub fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let lo_positive = g(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
