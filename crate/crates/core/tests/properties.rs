mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use common::{max_diff, random_vec};
use sifrk::benchmarks::{allen_cahn_random, flory_huggins_random, traveling_wave_problem, DEFAULT_SEED};
use sifrk::diagnostics::{convergence_rates, curve_csv, discrete_energy, discrete_energy_spectral, ErrorReport};
use sifrk::nonlinearity::{cubic, flory_huggins, NonlinearSpec, StabilizedNonlinearity};
use sifrk::rng::SplitMix64;
use sifrk::spectral::{BoundaryCondition, Field, Grid};
use sifrk::stepper::{integrate, step_butcher, step_shu_osher, IntegrationConfig, NoObserver, SchemeInstance};
use sifrk::tableau::{
    builtin_tableaus, butcher_to_shu_osher, g_derivative, g_function, shu_osher_to_butcher, ssp_sifrk33,
    ssp_sifrk_s2, SchemeTableau,
};

fn specs() -> Vec<NonlinearSpec> {
    vec![cubic(1.0).unwrap(), cubic(0.015 * 0.015).unwrap(), flory_huggins(0.8, 1.6).unwrap()]
}

#[test]
fn stabilized_nonlinearity_bounds_on_samples() {
    let mut rng = SplitMix64::new(21);
    for spec in specs() {
        let sn = StabilizedNonlinearity::with_minimal_kappa(spec.clone());
        let (k, g) = (sn.kappa(), sn.gamma());
        for _ in 0..100_000 {
            let a = rng.uniform(-g, g);
            let b = rng.uniform(-g, g);
            assert!(sn.n0(a).abs() <= k * g * (1.0 + 1e-12), "{} at {a}", spec.name());
            assert!((sn.n0(a) - sn.n0(b)).abs() <= 2.0 * k * (a - b).abs() * (1.0 + 1e-12) + 1e-14);
        }
    }
}

#[test]
fn g_derivative_matches_central_differences() {
    let mut rng = SplitMix64::new(22);
    for b in builtin_tableaus() {
        let t = b.tableau.to_butcher();
        for i in 1..=t.stages() {
            for _ in 0..100 {
                let x = rng.uniform(0.0, 20.0);
                let dx = 1e-5;
                let fd = (g_function(&t, i, x + dx).unwrap() - g_function(&t, i, x - dx).unwrap()) / (2.0 * dx);
                let exact = g_derivative(&t, i, x).unwrap();
                assert!((fd - exact).abs() < 1e-7, "{} stage {i} x {x}: {fd} vs {exact}", b.key);
            }
        }
    }
}

#[test]
fn butcher_shu_osher_round_trip() {
    for so in [ssp_sifrk_s2(2), ssp_sifrk_s2(3), ssp_sifrk_s2(5), ssp_sifrk33()] {
        let bt = shu_osher_to_butcher(&so);
        let back = butcher_to_shu_osher(&bt, so.alpha_rows()).unwrap();
        for (r1, r2) in so.beta_rows().iter().zip(back.beta_rows()) {
            assert!(max_diff(r1, r2) < 1e-13, "{}", so.name());
        }
        assert_eq!(bt.abscissas(), so.abscissas());
    }
}

#[test]
fn both_forms_follow_the_same_trajectory() {
    let problem = allen_cahn_random(2, 64, 0.01, BoundaryCondition::Periodic, -0.9, 0.9, DEFAULT_SEED).unwrap();
    for so in [ssp_sifrk_s2(2), ssp_sifrk33()] {
        let bt = shu_osher_to_butcher(&so);
        let a = problem.instance(SchemeTableau::ShuOsher(so.clone()), 0.05).unwrap();
        let b = problem.instance(SchemeTableau::Butcher(bt), 0.05).unwrap();
        let mut u = problem.initial_field().unwrap();
        let mut v = u.clone();
        for _ in 0..100 {
            u = step_shu_osher(&a, &u).unwrap();
            v = step_butcher(&b, &v).unwrap();
        }
        assert!(max_diff(u.as_slice(), v.as_slice()) < 1e-10, "{}", so.name());
    }
}

#[test]
fn stencil_and_spectral_energy_agree() {
    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
        let p = flory_huggins_random(2, 64, 0.02, -0.9, 0.9, 3).unwrap();
        let sym = sifrk::spectral::laplacian_symbol(
            Arc::new(Grid::cube(2, 64, (0.0, 1.0), bc).unwrap()),
            4e-4,
        )
        .unwrap();
        let u = Field::new(sym.grid().clone(), p.initial_field().unwrap().into_vec()).unwrap();
        let e1 = discrete_energy(&sym, &p.spec, &u).unwrap();
        let e2 = discrete_energy_spectral(&sym, &p.spec, &u).unwrap();
        assert_relative_eq!(e1, e2, max_relative = 1e-12);
    }
}

#[test]
fn energy_does_not_increase_at_small_step() {
    for (name, p) in [
        ("cubic", allen_cahn_random(2, 64, 0.01, BoundaryCondition::Periodic, -0.9, 0.9, 4).unwrap()),
        ("flory-huggins", flory_huggins_random(2, 64, 0.01, -0.9, 0.9, 4).unwrap()),
    ] {
        for b in builtin_tableaus().into_iter().filter(|b| b.tableau.certify().is_certified()) {
            let si = p.instance(b.tableau, 0.01).unwrap();
            let run = integrate(&si, p.initial_field().unwrap(), &IntegrationConfig::new(2.0), &mut NoObserver).unwrap();
            for w in run.records.windows(2) {
                assert!(w[1].energy <= w[0].energy + 1e-8 * w[0].energy.abs(), "{name} {} at {}", b.key, w[1].n);
            }
        }
    }
}

#[test]
fn curve_csv_is_byte_identical_for_a_fixed_seed() {
    let run = |seed: u64| {
        let p = allen_cahn_random(2, 32, 0.02, BoundaryCondition::Neumann, -0.9, 0.9, seed).unwrap();
        let si = p.instance(sifrk::tableau::sifrk_s2(3), 0.1).unwrap();
        let r = integrate(&si, p.initial_field().unwrap(), &IntegrationConfig::new(3.0), &mut NoObserver).unwrap();
        curve_csv(&r.records)
    };
    let a = run(99);
    assert_eq!(a, run(99));
    assert_ne!(a, run(100));
    assert!(a.starts_with("step,t,sup_norm,energy\n0,0.000000000000e+00,"));
}

#[test]
fn one_and_two_dimensional_fronts_agree() {
    let eps = 0.015;
    let t = sifrk::benchmarks::traveling_wave_final_time(eps);
    let tau = t / 16.0;
    let p1 = traveling_wave_problem(eps, 1, 128).unwrap();
    let p2 = traveling_wave_problem(eps, 2, 128).unwrap();
    let heun = sifrk::tableau::heun_sifrk33();
    let r1 = integrate(&p1.instance(heun.clone(), tau).unwrap(), p1.initial_field().unwrap(), &IntegrationConfig::new(t), &mut NoObserver).unwrap();
    let r2 = integrate(&p2.instance(heun, tau).unwrap(), p2.initial_field().unwrap(), &IntegrationConfig::new(t), &mut NoObserver).unwrap();
    let line = r1.field.as_slice();
    // x is the slow axis, so each row of the 2D field is constant
    for (k, row) in r2.field.as_slice().chunks(128).enumerate() {
        for v in row {
            assert!((v - line[k]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rates_of_exact_power_laws(p in 0.5f64..4.0, c in 1e-6f64..1e3, h0 in 1e-3f64..1.0, levels in 2usize..8) {
        let reports: Vec<ErrorReport> = (0..levels)
            .map(|k| {
                let h = h0 / 2f64.powi(k as i32);
                ErrorReport { l2: c * h.powf(p), linf: 3.0 * c * h.powf(p), tau_or_h: h, label: String::new() }
            })
            .collect();
        let table = convergence_rates(&reports).unwrap();
        for row in &table.rows[1..] {
            prop_assert!((row.l2_rate.unwrap() - p).abs() < 1e-9);
            prop_assert!((row.linf_rate.unwrap() - p).abs() < 1e-9);
        }
    }

    #[test]
    fn contraction_on_random_fields(seed in any::<u64>(), t in 0.0f64..3.0, kappa in 0.0f64..50.0) {
        let g = Arc::new(Grid::cube(2, 12, (0.0, 1.0), BoundaryCondition::Neumann).unwrap());
        let sym = sifrk::spectral::laplacian_symbol(g.clone(), 1e-2).unwrap().with_kappa(kappa).unwrap();
        let mut rng = SplitMix64::new(seed);
        let u = Field::new(g.clone(), random_vec(&mut rng, g.len(), -1.0, 1.0)).unwrap();
        let v = sifrk::spectral::apply_exp(&sym, t, &u).unwrap();
        prop_assert!(sifrk::spectral::sup_norm(&v) <= (-kappa * t).exp() * sifrk::spectral::sup_norm(&u) + 1e-12);
    }

    #[test]
    fn certified_step_stays_bounded(seed in any::<u64>(), log_tau in -3.0f64..2.0) {
        let g = Arc::new(Grid::cube(2, 16, (0.0, 1.0), BoundaryCondition::Periodic).unwrap());
        let sym = sifrk::spectral::laplacian_symbol(g.clone(), 1e-3).unwrap().with_kappa(2.0).unwrap();
        let sn = StabilizedNonlinearity::new(cubic(1.0).unwrap(), 2.0).unwrap();
        let si = SchemeInstance::new(sifrk::tableau::heun_sifrk33(), sym, sn, 10f64.powf(log_tau)).unwrap();
        let mut rng = SplitMix64::new(seed);
        let u = Field::new(g.clone(), random_vec(&mut rng, g.len(), -1.0, 1.0)).unwrap();
        let v = si.step(&u).unwrap();
        prop_assert!(sifrk::spectral::sup_norm(&v) <= 1.0 + 1e-12);
    }
}
