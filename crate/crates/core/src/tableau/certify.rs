//! Mechanical checks of the unconditional bound-preservation conditions.
//!
//! Butcher form: abscissas must be nondecreasing from 0 to 1 and every
//! stage function `g_i(x) = e^{-c_i x} + x sum_j a_ij e^{-(c_i - c_j) x}`
//! must be nonincreasing on `[0, inf)`. Monotonicity is checked by dense
//! sampling of the closed-form derivative on `[0, x_max]` together with a
//! tail argument for `x > x_max`.
//!
//! Shu-Osher form: convex `alpha`, nonnegative `beta` supported on
//! `alpha`, nondecreasing abscissas and `beta_ij / alpha_ij <= c_i - c_j`.

use std::fmt;

use super::{ButcherTableau, ShuOsherTableau, ALGEBRAIC_TOL, MONOTONICITY_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_X_MAX: f64 = 100.0;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "Certified",
            Verdict::Refuted => "Refuted",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `a_ij >= 0`
    Nonnegative,
    /// `c_i = sum_j a_ij`
    RowSum,
    /// `c_0 = 0`
    InitialAbscissa,
    /// `c_s = 1`
    FinalAbscissa,
    /// `c_{i-1} <= c_i`
    NondecreasingAbscissas,
    /// `g_i' <= 0` on the sampled interval
    SampledMonotonicity,
    /// `g_i' < 0` beyond the sampled interval
    Tail,
    /// `alpha_ij >= 0`, `sum_j alpha_ij = 1`
    ConvexAlpha,
    /// `beta_ij >= 0` and `beta_ij = 0` where `alpha_ij = 0`
    BetaSupport,
    /// `beta_ij / alpha_ij <= c_i - c_j`
    RatioBound,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Nonnegative => "nonnegative coefficients",
            Condition::RowSum => "row sum equals abscissa",
            Condition::InitialAbscissa => "c_0 = 0",
            Condition::FinalAbscissa => "c_s = 1",
            Condition::NondecreasingAbscissas => "nondecreasing abscissas",
            Condition::SampledMonotonicity => "g_i nonincreasing on [0, x_max]",
            Condition::Tail => "g_i nonincreasing beyond x_max",
            Condition::ConvexAlpha => "alpha row is a convex combination",
            Condition::BetaSupport => "beta nonnegative and supported on alpha",
            Condition::RatioBound => "beta/alpha <= c_i - c_j",
        })
    }
}

/// Evidence attached to a failed (or inconclusive) check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness {
    /// `g_i'(x) = value > tolerance`.
    Derivative { x: f64, value: f64 },
    /// A coefficient that breaks an algebraic condition.
    Coefficient { i: usize, j: usize, value: f64, bound: f64 },
    /// `g_i'` tends to `limit > 0` because some `c_j = c_i` with `a_ij > 0`.
    PositiveLimit { limit: f64 },
    /// The tail argument needs `x_max >= required`.
    TailCoverage { required: f64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Witness::Derivative { x, value } => write!(f, "g'({x:.6e}) = {value:.6e}"),
            Witness::Coefficient { i, j, value, bound } => {
                write!(f, "({i},{j}): {value:.6e} vs bound {bound:.6e}")
            }
            Witness::PositiveLimit { limit } => write!(f, "g' -> {limit:.6e} > 0 as x -> inf"),
            Witness::TailCoverage { required } => {
                write!(f, "x_max must be at least {required:.6e}")
            }
        }
    }
}

/// One checked condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    /// Stage index `i` (0 for whole-tableau conditions).
    pub stage: usize,
    pub condition: Condition,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl CertificationReport {
    fn new() -> Self {
        Self {
            verdict: Verdict::Certified,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn pass(&mut self, stage: usize, condition: Condition) {
        self.checks.push(Check {
            stage,
            condition,
            passed: true,
            witness: None,
        });
    }

    fn fail(&mut self, stage: usize, condition: Condition, witness: Option<Witness>) {
        self.verdict = Verdict::Refuted;
        self.checks.push(Check {
            stage,
            condition,
            passed: false,
            witness,
        });
    }

    /// The first failed check, if any.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "  [{mark}] stage {}: {}", c.stage, c.condition)?;
            if let Some(w) = &c.witness {
                write!(f, " -- {w}")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Structural sign and consistency conditions of a Butcher tableau.
///
/// Stops at the first failed condition.
pub fn validate_butcher(t: &ButcherTableau) -> CertificationReport {
    let mut report = CertificationReport::new();
    let s = t.stages();

    if t.c(0).abs() > ALGEBRAIC_TOL {
        report.fail(
            0,
            Condition::InitialAbscissa,
            Some(Witness::Coefficient {
                i: 0,
                j: 0,
                value: t.c(0),
                bound: 0.0,
            }),
        );
        return report;
    }
    report.pass(0, Condition::InitialAbscissa);

    for i in 1..=s {
        if let Some((j, &v)) = t.row(i).iter().enumerate().find(|(_, &v)| v < 0.0) {
            report.fail(
                i,
                Condition::Nonnegative,
                Some(Witness::Coefficient {
                    i,
                    j,
                    value: v,
                    bound: 0.0,
                }),
            );
            return report;
        }
        report.pass(i, Condition::Nonnegative);

        let sum: f64 = t.row(i).iter().sum();
        if (sum - t.c(i)).abs() > ALGEBRAIC_TOL {
            report.fail(
                i,
                Condition::RowSum,
                Some(Witness::Coefficient {
                    i,
                    j: i - 1,
                    value: sum,
                    bound: t.c(i),
                }),
            );
            return report;
        }
        report.pass(i, Condition::RowSum);

        if t.c(i) < t.c(i - 1) - ALGEBRAIC_TOL {
            report.fail(
                i,
                Condition::NondecreasingAbscissas,
                Some(Witness::Coefficient {
                    i,
                    j: i - 1,
                    value: t.c(i),
                    bound: t.c(i - 1),
                }),
            );
            return report;
        }
        report.pass(i, Condition::NondecreasingAbscissas);
    }

    if (t.c(s) - 1.0).abs() > ALGEBRAIC_TOL {
        report.fail(
            s,
            Condition::FinalAbscissa,
            Some(Witness::Coefficient {
                i: s,
                j: s,
                value: t.c(s),
                bound: 1.0,
            }),
        );
        return report;
    }
    report.pass(s, Condition::FinalAbscissa);
    report
}

/// `g_i(x) = e^{-c_i x} + x sum_{j<i} a_ij e^{-(c_i - c_j) x}`.
pub fn g_function(t: &ButcherTableau, i: usize, x: f64) -> Result<f64> {
    t.check_stage(i)?;
    let ci = t.c(i);
    let sum: f64 = t
        .row(i)
        .iter()
        .enumerate()
        .map(|(j, &a)| a * (-(ci - t.c(j)) * x).exp())
        .sum();
    Ok((-ci * x).exp() + x * sum)
}

/// Closed-form derivative
/// `g_i'(x) = -c_i e^{-c_i x} + sum_{j<i} a_ij (1 - (c_i - c_j) x) e^{-(c_i - c_j) x}`.
pub fn g_derivative(t: &ButcherTableau, i: usize, x: f64) -> Result<f64> {
    t.check_stage(i)?;
    Ok(g_derivative_unchecked(t, i, x))
}

fn g_derivative_unchecked(t: &ButcherTableau, i: usize, x: f64) -> f64 {
    let ci = t.c(i);
    let sum: f64 = t
        .row(i)
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let gap = ci - t.c(j);
            a * (1.0 - gap * x) * (-gap * x).exp()
        })
        .sum();
    -ci * (-ci * x).exp() + sum
}

/// Certifies unconditional bound preservation of a Butcher tableau.
///
/// Each stage's `g_i'` is sampled at `n_samples` uniform points of
/// `[0, x_max]`. Beyond `x_max` every term with a positive gap
/// `c_i - c_j` is negative once `x > 1/(c_i - c_j)`, and `-c_i e^{-c_i x}`
/// is never positive, so the tail is settled when `x_max` covers the
/// largest `1/(c_i - c_j)`. A term with zero gap and `a_ij > 0` contributes
/// the constant `a_ij` to the limit of `g_i'`, which refutes the stage
/// outright.
pub fn certify_mbp_butcher(
    t: &ButcherTableau,
    x_max: f64,
    n_samples: usize,
) -> Result<CertificationReport> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("x_max must be positive, got {x_max}")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument("n_samples must be at least 2".into()));
    }
    let mut report = validate_butcher(t);
    if report.verdict != Verdict::Certified {
        return Ok(report);
    }

    let mut inconclusive = false;
    for i in 1..=t.stages() {
        let ci = t.c(i);

        // Sampled interval.
        let step = x_max / (n_samples - 1) as f64;
        let sampled = (0..n_samples)
            .map(|k| {
                let x = k as f64 * step;
                (x, g_derivative_unchecked(t, i, x))
            })
            .find(|&(_, d)| d > MONOTONICITY_TOL);
        match sampled {
            Some((x, value)) => report.fail(
                i,
                Condition::SampledMonotonicity,
                Some(Witness::Derivative { x, value }),
            ),
            None => report.pass(i, Condition::SampledMonotonicity),
        }

        // Tail beyond x_max.
        let mut limit = 0.0;
        let mut required: f64 = 0.0;
        for (j, &a) in t.row(i).iter().enumerate() {
            if a <= 0.0 {
                continue;
            }
            let gap = ci - t.c(j);
            if gap <= ALGEBRAIC_TOL {
                limit += a;
            } else {
                required = required.max(1.0 / gap);
            }
        }
        if limit > ALGEBRAIC_TOL {
            report.fail(i, Condition::Tail, Some(Witness::PositiveLimit { limit }));
            if sampled.is_none() {
                if let Some((x, value)) = search_positive_derivative(t, i, x_max) {
                    report.notes.push(format!(
                        "stage {i}: g' becomes positive beyond the sampled interval at x = {x:.6e} (g' = {value:.6e})"
                    ));
                }
            }
        } else if required > x_max {
            inconclusive = true;
            report.checks.push(Check {
                stage: i,
                condition: Condition::Tail,
                passed: false,
                witness: Some(Witness::TailCoverage { required }),
            });
        } else {
            report.pass(i, Condition::Tail);
        }
    }

    if report.verdict == Verdict::Certified && inconclusive {
        report.verdict = Verdict::Inconclusive;
        report
            .notes
            .push("sampled interval too short for the tail argument; increase x_max".into());
    }
    Ok(report)
}

fn search_positive_derivative(t: &ButcherTableau, i: usize, from: f64) -> Option<(f64, f64)> {
    let mut x = from;
    for _ in 0..64 {
        x *= 2.0;
        let d = g_derivative_unchecked(t, i, x);
        if d > MONOTONICITY_TOL {
            return Some((x, d));
        }
    }
    None
}

/// Certifies unconditional bound preservation of a Shu-Osher tableau.
///
/// Reports the first violating `(i, j)` pair.
pub fn certify_mbp_shu_osher(t: &ShuOsherTableau) -> CertificationReport {
    let mut report = CertificationReport::new();
    let s = t.stages();
    let c = t.abscissas();

    if c[0].abs() > ALGEBRAIC_TOL {
        report.fail(
            0,
            Condition::InitialAbscissa,
            Some(Witness::Coefficient {
                i: 0,
                j: 0,
                value: c[0],
                bound: 0.0,
            }),
        );
        return report;
    }
    if (c[s] - 1.0).abs() > ALGEBRAIC_TOL {
        report.fail(
            s,
            Condition::FinalAbscissa,
            Some(Witness::Coefficient {
                i: s,
                j: s,
                value: c[s],
                bound: 1.0,
            }),
        );
        return report;
    }
    if let Some(i) = (1..=s).find(|&i| c[i] < c[i - 1] - ALGEBRAIC_TOL) {
        report.fail(
            i,
            Condition::NondecreasingAbscissas,
            Some(Witness::Coefficient {
                i,
                j: i - 1,
                value: c[i],
                bound: c[i - 1],
            }),
        );
        return report;
    }
    report.pass(0, Condition::NondecreasingAbscissas);

    for i in 1..=s {
        let alpha = &t.alpha_rows()[i - 1];
        let beta = &t.beta_rows()[i - 1];
        let sum: f64 = alpha.iter().sum();
        if let Some((j, &v)) = alpha.iter().enumerate().find(|(_, &v)| v < 0.0) {
            report.fail(
                i,
                Condition::ConvexAlpha,
                Some(Witness::Coefficient {
                    i,
                    j,
                    value: v,
                    bound: 0.0,
                }),
            );
            return report;
        }
        if (sum - 1.0).abs() > ALGEBRAIC_TOL {
            report.fail(
                i,
                Condition::ConvexAlpha,
                Some(Witness::Coefficient {
                    i,
                    j: i - 1,
                    value: sum,
                    bound: 1.0,
                }),
            );
            return report;
        }
        report.pass(i, Condition::ConvexAlpha);

        for j in 0..i {
            let (a, b) = (alpha[j], beta[j]);
            let unsupported = a <= 0.0 && b.abs() > ALGEBRAIC_TOL;
            if b < -ALGEBRAIC_TOL || unsupported {
                report.fail(
                    i,
                    Condition::BetaSupport,
                    Some(Witness::Coefficient {
                        i,
                        j,
                        value: b,
                        bound: 0.0,
                    }),
                );
                return report;
            }
            if a > 0.0 {
                let ratio = b / a;
                let gap = c[i] - c[j];
                if ratio > gap + ALGEBRAIC_TOL {
                    report.fail(
                        i,
                        Condition::RatioBound,
                        Some(Witness::Coefficient {
                            i,
                            j,
                            value: ratio,
                            bound: gap,
                        }),
                    );
                    return report;
                }
            }
        }
        report.pass(i, Condition::BetaSupport);
        report.pass(i, Condition::RatioBound);
    }
    report
}
