//! Runs every example at a reduced size so they cannot rot.

#[path = "../examples/certify_tableaus.rs"]
mod certify_tableaus;
#[path = "../examples/operator_exponential.rs"]
mod operator_exponential;
#[path = "../examples/flory_huggins_mbp.rs"]
mod flory_huggins_mbp;
#[path = "../examples/temporal_convergence.rs"]
mod temporal_convergence;
#[path = "../examples/mbp_violation.rs"]
mod mbp_violation;
#[path = "../examples/shrinking_bubble.rs"]
mod shrinking_bubble;
#[path = "../examples/custom_problem.rs"]
mod custom_problem;

use sifrk::tableau::Verdict;

#[test]
fn certify_tableaus_runs() {
    let verdicts = certify_tableaus::run_example().unwrap();
    assert_eq!(verdicts.len(), 8);
    assert_eq!(verdicts[7], ("midpoint".to_string(), Verdict::Certified));
    let refuted: Vec<&str> = verdicts
        .iter()
        .filter(|(_, v)| *v == Verdict::Refuted)
        .map(|(k, _)| k.as_str())
        .collect();
    assert_eq!(refuted, ["ssp-sifrk22", "ssp-sifrk33"]);
}

#[test]
fn operator_exponential_runs() {
    operator_exponential::run_example().unwrap();
}

#[test]
fn flory_huggins_mbp_runs() {
    let gamma = sifrk::nonlinearity::flory_huggins(0.8, 1.6).unwrap().gamma();
    for (key, max) in flory_huggins_mbp::run_example(32, 0.5).unwrap() {
        assert!(max <= gamma + 1e-12, "{key}");
    }
}

#[test]
fn temporal_convergence_runs() {
    let table = temporal_convergence::run_example("heun33", 256, 4).unwrap();
    assert_eq!(table.rows.len(), 4);
}

#[test]
fn mbp_violation_runs() {
    let r = mbp_violation::run_example(64, 10.0).unwrap();
    assert!(r.certified_max <= 1.0 + 1e-12);
}

#[test]
fn shrinking_bubble_runs() {
    let r = shrinking_bubble::run_example(64, 1.0).unwrap();
    assert!(r.max_sup_norm <= 1.0 + 1e-12);
}

#[test]
fn custom_problem_runs() {
    assert!(custom_problem::run_example(12, 10).unwrap() <= 1.0 + 1e-12);
}
