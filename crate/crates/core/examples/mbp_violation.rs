//! SSP-sIFRK(2,2) against sIFRK(2,2) on the same random data with a large
//! step: the first overshoots the bound, the second never does.
//!
//! ```text
//! cargo run --release --example mbp_violation -- 256 440
//! ```

use sifrk::benchmarks::{run_mbp_violation_demo, ViolationReport, ViolationSetup};
use sifrk::tableau::lookup_builtin;

pub fn run_example(n: usize, t_certified: f64) -> sifrk::Result<ViolationReport> {
    let setup = ViolationSetup {
        n,
        t_certified,
        ..Default::default()
    };
    let ssp = lookup_builtin("ssp-sifrk22").expect("built-in");
    let certified = lookup_builtin("sifrk22").expect("built-in");
    let r = run_mbp_violation_demo(&ssp, &certified, &setup)?;
    match r.flag {
        Some(f) => println!("SSP-sIFRK(2,2): sup norm {:.8} > 1 at t = {:.1} (step {})", f.sup_norm, f.t, f.n),
        None => println!("SSP-sIFRK(2,2): no overshoot before t = {}", setup.t_search),
    }
    for rec in r.flagged_run.records.iter().step_by(10) {
        println!("  t = {:>5.1}  sup = {:.8}", rec.t, rec.sup_norm);
    }
    println!(
        "sIFRK(2,2): max sup norm {:.12} through t = {} ({})",
        r.certified_max,
        r.certified_run.t,
        if r.certified_flag.is_none() { "bounded" } else { "overshoot" }
    );
    Ok(r)
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|a| a.parse().ok()).unwrap_or(256);
    let t = args.next().and_then(|a| a.parse().ok()).unwrap_or(50.0);
    run_example(n, t).map(|_| ())
}
