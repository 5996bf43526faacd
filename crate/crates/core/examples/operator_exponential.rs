//! Apply `e^{t(L - kappa I)}` to grid functions with periodic and Neumann
//! boundaries and look at its basic properties.
//!
//! ```text
//! cargo run --example operator_exponential
//! ```

use std::sync::Arc;

use sifrk::spectral::{
    apply_exp, apply_laplacian, apply_laplacian_spectral, laplacian_symbol, sup_norm, BoundaryCondition, Field,
    Grid,
};

pub fn run_example() -> sifrk::Result<()> {
    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
        let grid = Arc::new(Grid::cube(2, 64, (-0.5, 0.5), bc)?);
        let sym = laplacian_symbol(grid.clone(), 1e-2)?.with_kappa(2.0)?;
        let u = Field::from_fn(grid.clone(), |x| (-40.0 * (x[0] * x[0] + x[1] * x[1])).exp());

        let lam = sym.lambda();
        let most_negative = lam.iter().copied().fold(0.0, f64::min);
        println!("{bc}: lambda_0 = {}, min lambda = {most_negative:.3}", lam[0]);

        // stencil and transform-space Laplacians agree
        let a = apply_laplacian(&sym, &u)?;
        let b = apply_laplacian_spectral(&sym, &u)?;
        let diff = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        println!("  stencil vs spectral Laplacian: {diff:.2e}");

        for t in [0.1, 1.0, 10.0] {
            let v = apply_exp(&sym, t, &u)?;
            println!(
                "  t = {t:>4}: sup |e^(tL_k) u| = {:.6}  (bound e^(-kappa t) sup|u| = {:.6})",
                sup_norm(&v),
                (-2.0 * t).exp() * sup_norm(&u)
            );
        }

        let split = apply_exp(&sym, 0.3, &apply_exp(&sym, 0.2, &u)?)?;
        let whole = apply_exp(&sym, 0.5, &u)?;
        let gap = split.as_slice().iter().zip(whole.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        println!("  e^(0.3 L_k) e^(0.2 L_k) u vs e^(0.5 L_k) u: {gap:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    run_example()
}
