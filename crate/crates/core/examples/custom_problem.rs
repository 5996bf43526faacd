//! Plug in a reaction term through the callback hook and a scheme from a
//! tableau file, then drive the stepper by hand on a 3D grid.
//!
//! ```text
//! cargo run --release --example custom_problem
//! ```

use std::ops::ControlFlow;
use std::path::Path;
use std::sync::Arc;

use sifrk::benchmarks::random_initial;
use sifrk::nonlinearity::{custom, StabilizedNonlinearity};
use sifrk::spectral::{laplacian_symbol, BoundaryCondition, Grid};
use sifrk::stepper::{integrate, IntegrationConfig, SchemeInstance, StepRecord};
use sifrk::tableau::parse_tableau;

pub fn run_example(n: usize, steps: usize) -> sifrk::Result<f64> {
    // f0(u) = u - u^5 vanishes at 0 and +-1 and pushes toward +-1.
    let spec = custom(
        "quintic",
        1.0,
        |u| u - u.powi(5),
        |u| 1.0 - 5.0 * u.powi(4),
        |u| u.powi(6) / 6.0 - 0.5 * u * u + 1.0 / 3.0,
        false,
    )?;
    println!("kappa_min from sampling: {:.6}", spec.kappa_min());

    let tableau = parse_tableau(
        "name sIFRK(3,2) by hand\norder 2\ns 3\nc 0 1/3 2/3 1\na 1 1/3\na 2 1/3 1/3\na 3 0 1/2 1/2\n",
        Path::new("<inline>"),
    )?;
    println!("{}: {:?}", tableau.name(), tableau.certify().verdict);

    let grid = Arc::new(Grid::cube(3, n, (0.0, 1.0), BoundaryCondition::Periodic)?);
    let sn = StabilizedNonlinearity::with_minimal_kappa(spec);
    let sym = laplacian_symbol(grid.clone(), 1e-3)?.with_kappa(sn.kappa())?;
    let si = SchemeInstance::new(tableau, sym, sn, 0.1)?;
    let u0 = random_initial(&grid, -1.0, 1.0, 11)?;

    let mut print = |r: &StepRecord, _: &sifrk::spectral::Field| {
        println!("  step {:>3}  t = {:>5.1}  sup = {:.6}  energy = {:.6}", r.n, r.t, r.sup_norm, r.energy);
        ControlFlow::Continue(())
    };
    let run = integrate(&si, u0, &IntegrationConfig::new(0.1 * steps as f64).stride(steps / 5), &mut print)?;
    Ok(run.max_sup_norm)
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    run_example(32, 200).map(|_| ())
}
