use sveiqhr::dynamics::{default_initial_state, peak_and_limit, simulate, IntegratorConfig};
use sveiqhr::equilibrium::compute_r0;
use sveiqhr::model::{ModelParameters, ParamName};
use sveiqhr::strategy::{
    intervention_sweep, r0_slice, region_geometry, sensitivity_index, significance_ranking,
    unit_grid, SliceAxis,
};
use ParamName::*;

#[test]
fn l2_does_not_depend_on_efficacy() {
    let base = ModelParameters::endemic_case();
    let l2: Vec<f64> = [0.3, 0.653, 0.9]
        .iter()
        .map(|&d| region_geometry(&base, d).unwrap().l2)
        .collect();
    for v in &l2 {
        assert!((v - l2[0]).abs() <= 1e-12 * l2[0], "{l2:?}");
    }
}

#[test]
fn polygon_vertices_are_feasible() {
    let base = ModelParameters::endemic_case();
    for k in 0..=40 {
        let delta = k as f64 / 40.0;
        let Ok(g) = region_geometry(&base, delta) else {
            continue;
        };
        for v in &g.feasible_polygon {
            let p = base
                .with(U1, v[0])
                .and_then(|p| p.with(U2, v[1]))
                .and_then(|p| p.with(Delta, delta))
                .unwrap();
            assert!(compute_r0(&p) <= 1.0 + 1e-9, "delta {delta}: {v:?}");
        }
    }
}

#[test]
fn r0_slices_from_the_threshold_analysis() {
    // no vaccination: affine in u2, vanishing under total lockdown
    let p = ModelParameters::table1(0.653, 0.0).unwrap().with(U1, 0.0).unwrap();
    let slice = r0_slice(&p, SliceAxis::U2, &unit_grid(20)).unwrap();
    let r00 = slice[0].1;
    for (u2, r0) in &slice {
        assert!((r0 - r00 * (1.0 - u2)).abs() <= 1e-12 * r00);
    }
    assert_eq!(slice.last().unwrap().1, 0.0);

    let p = ModelParameters::table1(0.93, 0.0).unwrap().with(U1, 0.064).unwrap();
    assert!(compute_r0(&p) < 1.0);
}

#[test]
fn sensitivity_signs_match_monotonicity() {
    for p in [ModelParameters::disease_free_case(), ModelParameters::endemic_case()] {
        for name in ParamName::ALL {
            let up = sensitivity_index(&p, name).unwrap();
            let x = p.get(name);
            let h = 1e-4 * x;
            let lo = p.with(name, x - h).unwrap();
            let hi = match p.with(name, x + h) {
                Ok(q) => q,
                Err(_) => continue,
            };
            let slope = compute_r0(&hi) - compute_r0(&lo);
            assert_eq!(up.signum(), slope.signum(), "{name}: {up} vs slope {slope}");
        }
    }
}

#[test]
fn rescaling_beta_leaves_ranking_unchanged() {
    // R0 expressed through beta' = beta / 2 has the same elasticity
    let p = ModelParameters::endemic_case();
    let b = p.beta() / 2.0;
    let r = |bp: f64| compute_r0(&p.with(Beta, 2.0 * bp).unwrap());
    let h = 1e-6 * b;
    let elasticity = (r(b + h) - r(b - h)) / (2.0 * h) * b / r(b);
    assert!((elasticity - 1.0).abs() < 1e-9);
    let table = significance_ranking(&p).unwrap();
    let scaled = significance_ranking(&p.with(Beta, 2.0 * p.beta()).unwrap()).unwrap();
    assert_eq!(table.ordering(), scaled.ordering());
}

#[test]
fn weakly_coupled_rates_have_small_indices() {
    for p in [ModelParameters::disease_free_case(), ModelParameters::endemic_case()] {
        for name in [Kappa, Phi, Tau, Alpha] {
            assert!(sensitivity_index(&p, name).unwrap().abs() < 1e-2, "{name}");
        }
    }
}

#[test]
fn boosting_interventions_lowers_the_peak() {
    let p = ModelParameters::endemic_case();
    let x0 = default_initial_state();
    // the u1 and u2 effects on the early peak are ~0.1%, so sample finely
    let config = IntegratorConfig::adaptive(365.0, 0.05);
    let rep = intervention_sweep(&p, &x0, &config, &ParamName::INTERVENTIONS, &[0.3, 0.6]).unwrap();
    let mut best_u = 0.0_f64;
    for run in &rep.runs {
        let sign = sensitivity_index(&p, run.target).unwrap().signum();
        assert_eq!(run.peak_reduction.signum(), -sign, "{:?} {}", run.target, run.boost);
        best_u = best_u.max(run.peak_reduction);
    }

    let q = p.with(Delta, 0.9).unwrap();
    let peak = peak_and_limit(&simulate(&q, &x0, &config).unwrap()).unwrap().peak;
    assert!(rep.baseline.peak - peak > best_u);
}
