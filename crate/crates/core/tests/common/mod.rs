#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sveiqhr::model::{table1_default, Bound, ModelParameters, ParamName};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rates scaled log-uniformly within a factor of two of the tabulated
/// values, fractions drawn uniformly from the unit interval.
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

/// Central-difference Jacobian of the vector field. The field is at most
/// bilinear, so a wide stencil loses nothing to truncation.
pub fn fd_jacobian(p: &ModelParameters, x: [f64; 7]) -> [[f64; 7]; 7] {
    let mut j = [[0.0; 7]; 7];
    for c in 0..7 {
        let h = 1e-2 * x[c].abs().max(1.0);
        let mut xp = x;
        let mut xm = x;
        xp[c] += h;
        xm[c] -= h;
        let fp = sveiqhr::model::rhs(&sveiqhr::State::from_array(xp), p);
        let fm = sveiqhr::model::rhs(&sveiqhr::State::from_array(xm), p);
        for r in 0..7 {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}
