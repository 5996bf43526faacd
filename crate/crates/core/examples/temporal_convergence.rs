//! Temporal convergence on the traveling tanh front.
//!
//! ```text
//! cargo run --release --example temporal_convergence -- heun33 512
//! ```

use sifrk::benchmarks::{run_temporal_convergence, traveling_wave_final_time, traveling_wave_problem};
use sifrk::diagnostics::RateTable;
use sifrk::tableau::resolve_scheme;

pub fn run_example(scheme: &str, n: usize, levels: usize) -> sifrk::Result<RateTable> {
    let eps = 0.015;
    let t = traveling_wave_final_time(eps);
    // The front depends on x only, so a 1D grid gives the 2D answer.
    let problem = traveling_wave_problem(eps, 1, n)?;
    let tableau = resolve_scheme(scheme)?;
    let coarsest = match tableau.order() {
        1 => t / 128.0,
        2 => t / 32.0,
        _ => t / 16.0,
    };
    let taus: Vec<f64> = (0..levels).map(|k| coarsest / 2f64.powi(k as i32)).collect();
    let table = run_temporal_convergence(&tableau, &problem, &taus, t)?;
    println!("{} (order {}), h = 1/{n}, T = {t:.6e}\n{table}", tableau.name(), tableau.order());
    Ok(table)
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    let mut args = std::env::args().skip(1);
    let scheme = args.next().unwrap_or_else(|| "sifrk22".into());
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(512);
    run_example(&scheme, n, 6).map(|_| ())
}
