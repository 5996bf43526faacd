//! A disc of `u = 1` in a sea of `u = -1` shrinks under mean-curvature
//! motion and disappears. Neumann walls, sIFRK(2,2), tau = 0.01.
//!
//! ```text
//! cargo run --release --example shrinking_bubble -- 256 330
//! ```

use sifrk::benchmarks::{bubble_problem, run_bubble, BubbleReport};
use sifrk::tableau::lookup_builtin;

pub fn run_example(n: usize, t_final: f64) -> sifrk::Result<BubbleReport> {
    let problem = bubble_problem(n)?;
    let checkpoints: Vec<f64> = (0..=6).map(|k| 50.0 * k as f64).collect();
    let r = run_bubble(&problem, &lookup_builtin("sifrk22").expect("built-in"), 0.01, t_final, &checkpoints, 1000)?;
    // sharp-interface estimate: R(t)^2 = R0^2 - 2 eps^2 t
    for (t, radius) in &r.radii {
        let sharp = (0.0625 - 2e-4 * t).max(0.0).sqrt();
        println!("t = {t:>5}: radius {radius:.4} (sharp interface {sharp:.4})");
    }
    match r.vanished_at {
        Some(t) => println!("bubble gone at t = {t:.2}"),
        None => println!("bubble still present at t = {t_final}"),
    }
    println!("max sup norm {:.12}", r.max_sup_norm);
    Ok(r)
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(256);
    let t = args.next().and_then(|a| a.parse().ok()).unwrap_or(100.0);
    run_example(n, t).map(|_| ())
}
