//! Named experiment suites with their pass/fail tolerances, shared by the
//! `bench` command and the acceptance tests.

use std::fs;
use std::path::PathBuf;

use log::info;

use super::*;
use crate::diagnostics::{curve_csv, format_e12};
use crate::tableau::{builtin_tableaus, g_function, lookup_builtin, Verdict};

pub const SUITES: &[&str] = &["temporal", "spatial", "mbp", "bubble", "violation", "threed"];

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Reduced resolution and horizons.
    pub desk: bool,
    /// Where CSV artifacts go; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    /// Restrict suites that loop over schemes to this one.
    pub scheme: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            desk: true,
            out_dir: None,
            seed: DEFAULT_SEED,
            scheme: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOutcome {
    pub suite: String,
    /// One `(passed, message)` entry per checked tolerance.
    pub checks: Vec<(bool, String)>,
    pub artifacts: Vec<PathBuf>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(ok, _)| *ok)
    }

    fn check(&mut self, ok: bool, msg: String) {
        info!("{} {msg}", if ok { "PASS" } else { "FAIL" });
        self.checks.push((ok, msg));
    }

    fn write(&mut self, opts: &SuiteOptions, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &opts.out_dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, contents)?;
            self.artifacts.push(path);
        }
        Ok(())
    }
}

impl std::fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (ok, msg) in &self.checks {
            writeln!(f, "[{}] {}: {msg}", if *ok { "PASS" } else { "FAIL" }, self.suite)?;
        }
        Ok(())
    }
}

pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome {
        suite: name.to_string(),
        ..Default::default()
    };
    match name {
        "temporal" => temporal(opts, &mut out)?,
        "spatial" => spatial(opts, &mut out)?,
        "mbp" => mbp(opts, &mut out)?,
        "bubble" => bubble(opts, &mut out)?,
        "violation" => violation(opts, &mut out)?,
        "threed" => threed(opts, &mut out)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (expected one of {})",
                SUITES.join(", ")
            )))
        }
    }
    Ok(out)
}

fn builtin(key: &str) -> Result<SchemeTableau> {
    lookup_builtin(key).ok_or_else(|| Error::UnknownScheme(key.to_string()))
}

fn in_band(v: Option<f64>, band: (f64, f64)) -> bool {
    v.is_some_and(|r| r >= band.0 && r <= band.1)
}

fn fmt_rate(v: Option<f64>) -> String {
    v.map(|r| format!("{r:.3}")).unwrap_or_else(|| "n/a".into())
}

const TW_EPS: f64 = 0.015;

/// Coarsest step of each ladder is `T / divisor`.
const TEMPORAL_LADDERS: &[(&str, f64)] = &[
    ("sifrk11", 128.0),
    ("sifrk22", 32.0),
    ("sifrk32", 32.0),
    ("sifrk42", 32.0),
    ("heun33", 16.0),
];

/// Accepted finest-pair L2 rate by scheme order.
pub fn temporal_rate_band(order: usize) -> (f64, f64) {
    match order {
        1 => (0.85, 1.15),
        2 => (1.85, 2.15),
        _ => (2.7, 3.3),
    }
}

/// Grid size of the traveling-wave runs. The data depend on `x` only, so
/// the runs use a 1D grid with the stated spacing.
pub fn temporal_grid_n(desk: bool) -> usize {
    if desk {
        512
    } else {
        2048
    }
}

fn temporal(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let t = traveling_wave_final_time(TW_EPS);
    let problem = traveling_wave_problem(TW_EPS, 1, temporal_grid_n(opts.desk))?;
    let mut finest = Vec::new();
    for &(key, divisor) in TEMPORAL_LADDERS {
        if opts.scheme.as_deref().is_some_and(|s| s.to_ascii_lowercase().replace('_', "-") != key) {
            continue;
        }
        let scheme = builtin(key)?;
        let taus: Vec<f64> = (0..6).map(|k| t / divisor / 2f64.powi(k)).collect();
        let table = run_temporal_convergence(&scheme, &problem, &taus, t)?;
        out.write(opts, &format!("temporal_{key}.csv"), &table.to_csv())?;
        let band = temporal_rate_band(scheme.order());
        let rate = table.finest_l2_rate();
        out.check(
            in_band(rate, band),
            format!("{key} finest L2 rate {} in [{}, {}]", fmt_rate(rate), band.0, band.1),
        );
        if divisor == 32.0 {
            finest.push((key, table.rows.last().map(|r| r.l2).unwrap_or(f64::NAN)));
        }
    }
    if finest.len() == 3 {
        let ok = finest[2].1 < finest[1].1 && finest[1].1 < finest[0].1;
        out.check(
            ok,
            format!(
                "L2 at T/1024: sifrk42 {:.4e} < sifrk32 {:.4e} < sifrk22 {:.4e}",
                finest[2].1, finest[1].1, finest[0].1
            ),
        );
    }
    if out.checks.is_empty() {
        return Err(Error::InvalidArgument("no temporal ladder for the requested scheme".into()));
    }
    Ok(())
}

pub const SPATIAL_RATE_BAND: (f64, f64) = (1.8, 2.05);

pub fn spatial_ladder(desk: bool) -> Vec<usize> {
    if desk {
        vec![32, 64, 128, 256]
    } else {
        vec![32, 64, 128, 256, 512, 1024]
    }
}

fn spatial(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let t = traveling_wave_final_time(TW_EPS);
    let scheme = builtin("sifrk22")?;
    let table = run_spatial_convergence(
        &scheme,
        |n| traveling_wave_problem(TW_EPS, 1, n),
        &spatial_ladder(opts.desk),
        t / 2048.0,
        t,
    )?;
    out.write(opts, "spatial.csv", &table.to_csv())?;
    let rows = &table.rows;
    for r in &rows[rows.len() - 2..] {
        out.check(
            in_band(r.l2_rate, SPATIAL_RATE_BAND),
            format!(
                "L2 rate at h = {:.4e}: {} in [{}, {}] (error {:.4e})",
                r.resolution,
                fmt_rate(r.l2_rate),
                SPATIAL_RATE_BAND.0,
                SPATIAL_RATE_BAND.1,
                r.l2
            ),
        );
    }
    Ok(())
}

pub const MBP_TAUS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

/// Built-in tableaus the certifier accepts.
pub fn certified_builtins() -> Vec<(&'static str, SchemeTableau)> {
    builtin_tableaus()
        .into_iter()
        .filter(|b| b.tableau.certify().verdict == Verdict::Certified)
        .map(|b| (b.key, b.tableau))
        .collect()
}

/// Result of one MBP property run.
#[derive(Clone, Debug)]
pub struct MbpCase {
    pub scheme: &'static str,
    pub potential: &'static str,
    pub tau: f64,
    pub gamma: f64,
    /// Largest step or stage sup norm.
    pub max_sup: f64,
    pub first_step: f64,
    /// `g_s(kappa tau) gamma`.
    pub first_step_bound: f64,
}

impl MbpCase {
    pub fn passed(&self) -> bool {
        self.max_sup <= self.gamma + 1e-12 && self.first_step <= self.first_step_bound + 1e-12
    }
}

/// Every certified built-in, every step size in [`MBP_TAUS`], cubic and
/// Flory-Huggins reactions, `steps` steps on an `n x n` periodic grid from
/// random data in `[-0.9 gamma, 0.9 gamma]`.
pub fn mbp_property_cases(n: usize, steps: usize, seed: u64) -> Result<Vec<MbpCase>> {
    let mut cases = Vec::new();
    for potential in ["cubic", "flory_huggins"] {
        let mut problem = match potential {
            "cubic" => allen_cahn_random(2, n, 0.01, BoundaryCondition::Periodic, -0.9, 0.9, seed)?,
            _ => flory_huggins_random(2, n, 0.01, -0.9, 0.9, seed)?,
        };
        let gamma = problem.spec.gamma();
        problem.initial = InitialCondition::Random {
            low: -0.9 * gamma,
            high: 0.9 * gamma,
            seed,
        };
        let u0 = problem.initial_field()?;
        let kappa = problem.kappa();
        for (key, tableau) in certified_builtins() {
            let butcher = tableau.to_butcher();
            for tau in MBP_TAUS {
                let si = problem.instance(tableau.clone(), tau)?;
                let cfg = IntegrationConfig::new(steps as f64 * tau).with_stages(true);
                let run = integrate(&si, u0.clone(), &cfg, &mut NoObserver)?;
                let s = butcher.stages();
                cases.push(MbpCase {
                    scheme: key,
                    potential,
                    tau,
                    gamma,
                    max_sup: run.max_sup_norm,
                    first_step: run.records[1].sup_norm,
                    first_step_bound: g_function(&butcher, s, kappa * tau)? * gamma,
                });
            }
        }
    }
    Ok(cases)
}

fn mbp(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let n = if opts.desk { 128 } else { 256 };
    let cases = mbp_property_cases(n, 20, opts.seed)?;
    let mut csv = String::from("scheme,potential,tau,gamma,max_sup,first_step,first_step_bound\n");
    for c in &cases {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.scheme,
            c.potential,
            format_e12(c.tau),
            format_e12(c.gamma),
            format_e12(c.max_sup),
            format_e12(c.first_step),
            format_e12(c.first_step_bound)
        ));
    }
    out.write(opts, "mbp.csv", &csv)?;
    let failures: Vec<_> = cases.iter().filter(|c| !c.passed()).collect();
    out.check(
        failures.is_empty(),
        format!(
            "{} runs, {} with a sup norm above gamma or above g_s(kappa tau) gamma",
            cases.len(),
            failures.len()
        ),
    );
    for c in failures {
        out.check(false, format!("{c:?}"));
    }
    Ok(())
}

/// Accepted first-violation window for the SSP run.
pub const VIOLATION_WINDOW: (f64, f64) = (4.0, 8.0);

fn violation(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let setup = ViolationSetup {
        seed: opts.seed,
        t_certified: if opts.desk { 50.0 } else { 440.0 },
        ..Default::default()
    };
    let r = run_mbp_violation_demo(&builtin("ssp-sifrk22")?, &builtin("sifrk22")?, &setup)?;
    out.write(opts, "violation_ssp_sifrk22.csv", &curve_csv(&r.flagged_run.records))?;
    out.write(opts, "violation_sifrk22.csv", &curve_csv(&r.certified_run.records))?;
    let (lo, hi) = VIOLATION_WINDOW;
    out.check(
        r.flag.is_some_and(|f| f.t >= lo && f.t <= hi),
        match r.flag {
            Some(f) => format!("SSP-sIFRK(2,2) first exceeds 1 at t = {:.2} (sup {:.6}), window [{lo}, {hi}]", f.t, f.sup_norm),
            None => format!("SSP-sIFRK(2,2) never exceeded 1 before t = {}", setup.t_search),
        },
    );
    out.check(
        r.certified_flag.is_none(),
        format!(
            "sIFRK(2,2) max sup norm {:.12} through t = {}",
            r.certified_max, r.certified_run.t
        ),
    );
    Ok(())
}

pub const BUBBLE_CHECKPOINTS: [f64; 6] = [50.0, 100.0, 150.0, 200.0, 250.0, 300.0];
pub const BUBBLE_VANISH_WINDOW: (f64, f64) = (290.0, 330.0);

fn bubble(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let problem = bubble_problem(256)?;
    let t_end = if opts.desk { 100.0 } else { 340.0 };
    let mut cps = vec![0.0];
    cps.extend(BUBBLE_CHECKPOINTS);
    let r = run_bubble(&problem, &builtin("sifrk22")?, 0.01, t_end, &cps, 100)?;
    out.write(opts, "bubble.csv", &curve_csv(&r.records))?;
    let mut radii = String::from("t,radius\n");
    for (t, rad) in &r.radii {
        radii.push_str(&format!("{},{}\n", format_e12(*t), format_e12(*rad)));
    }
    out.write(opts, "bubble_radius.csv", &radii)?;
    let monotone = r.radii.windows(2).all(|w| w[1].1 <= w[0].1);
    let listing: Vec<String> = r.radii.iter().map(|(t, rad)| format!("{t:.0}:{rad:.4}")).collect();
    out.check(monotone && r.radii.len() >= 2, format!("radius nonincreasing [{}]", listing.join(" ")));
    out.check(r.max_sup_norm <= 1.0 + 1e-12, format!("max sup norm {:.12}", r.max_sup_norm));
    if !opts.desk {
        let (lo, hi) = BUBBLE_VANISH_WINDOW;
        out.check(
            r.vanished_at.is_some_and(|t| t >= lo && t <= hi),
            format!("vanishes at {:?}, window [{lo}, {hi}]", r.vanished_at),
        );
    }
    Ok(())
}

/// First record whose energy exceeds its predecessor by more than
/// `rel_slack` (relative).
pub fn energy_increase(records: &[StepRecord], rel_slack: f64) -> Option<usize> {
    records
        .windows(2)
        .position(|w| w[1].energy > w[0].energy + rel_slack * w[0].energy.abs())
        .map(|k| records[k + 1].n)
}

fn threed(opts: &SuiteOptions, out: &mut SuiteOutcome) -> Result<()> {
    let (n, t_end) = if opts.desk { (32, 5.0) } else { (128, 50.0) };
    let problem = allen_cahn_random(3, n, 0.01, BoundaryCondition::Periodic, -0.9, 0.9, opts.seed)?;
    let si = problem.instance(builtin("sifrk22")?, 0.01)?;
    let mut mon = mbp_monitor(1.0, 1e-12);
    let run = integrate(&si, problem.initial_field()?, &IntegrationConfig::new(t_end).with_stages(true), &mut mon)?;
    out.write(opts, "threed.csv", &curve_csv(&run.records))?;
    out.check(mon.flag().is_none(), format!("{n}^3 grid, max stage sup norm {:.12}", mon.max_seen()));
    let bad = energy_increase(&run.records, 1e-8);
    out.check(bad.is_none(), format!("energy nonincreasing (first increase at step {bad:?})"));
    Ok(())
}
