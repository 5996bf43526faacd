//! Certify every built-in tableau, then a hand-written one, and convert
//! between the Butcher and Shu-Osher forms.
//!
//! ```text
//! cargo run --example certify_tableaus
//! ```

use std::path::Path;

use sifrk::tableau::{
    builtin_tableaus, butcher_to_shu_osher, certify_mbp_butcher, certify_mbp_shu_osher, g_function, parse_tableau,
    shu_osher_to_butcher, sifrk_s2, Verdict, DEFAULT_SAMPLES, DEFAULT_X_MAX,
};

pub fn run_example() -> sifrk::Result<Vec<(String, Verdict)>> {
    let mut verdicts = Vec::new();
    for b in builtin_tableaus() {
        let report = b.tableau.certify();
        println!("{:<12} {:<18} {:?}", b.key, b.tableau.name(), report.verdict);
        if let Some(c) = report.first_failure() {
            println!("             first failure: stage {} {}", c.stage, c.condition);
        }
        verdicts.push((b.key.to_string(), report.verdict));
    }

    // A two-stage scheme with c = [0, 1/2, 1] typed in directly.
    let text = "name midpoint\norder 2\ns 2\nc 0 1/2 1\na 1 1/2\na 2 0 1\n";
    let t = parse_tableau(text, Path::new("<inline>"))?;
    let b = t.to_butcher();
    let report = certify_mbp_butcher(&b, DEFAULT_X_MAX, DEFAULT_SAMPLES)?;
    println!("\n{}: {:?}", b.name(), report.verdict);
    for x in [0.0, 1.0, 2.0, 10.0] {
        println!("  g_2({x:>4}) = {:.6}", g_function(&b, 2, x)?);
    }

    // Shu-Osher form of sIFRK(2,2) for a chosen alpha, and back.
    let so = butcher_to_shu_osher(&sifrk_s2(2), &[vec![1.0], vec![0.0, 1.0]])?;
    println!("\nbeta rows for alpha = [[1], [0, 1]]: {:?}", so.beta_rows());
    let back = shu_osher_to_butcher(&so);
    println!("round trip rows: {:?}", back.rows());
    println!("Shu-Osher certification: {:?}", certify_mbp_shu_osher(&so).verdict);
    verdicts.push((b.name().to_string(), report.verdict));
    Ok(verdicts)
}

#[allow(dead_code)]
fn main() -> sifrk::Result<()> {
    run_example().map(|_| ())
}
