//! The `run`, `certify` and `bench` commands. Each returns the process
//! exit code and prints to the given writer.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::benchmarks::{run_suite, SuiteOptions, DEFAULT_SEED};
use crate::config::SimulationConfig;
use crate::diagnostics::{curve_csv, format_e12, mbp_monitor, MbpMonitor};
use crate::error::Result;
use crate::spectral::{write_snapshot, Field};
use crate::stepper::{integrate, IntegrationConfig, Observer, StepRecord};
use crate::tableau::{resolve_scheme, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MBP_FLAG: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub snapshots: Option<Vec<f64>>,
    pub expect_mbp: bool,
}

/// What [`run_config`] produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub steps: usize,
    pub t: f64,
    pub final_sup_norm: f64,
    pub final_energy: f64,
    pub max_sup_norm: f64,
    pub gamma: f64,
    /// First time the sup norm (of a step or stage) exceeded `gamma`.
    pub flagged_at: Option<f64>,
    pub wall_seconds: f64,
}

impl RunSummary {
    pub fn verdict(&self) -> String {
        match self.flagged_at {
            None => "preserved".into(),
            Some(t) if t.is_nan() => "violated between recorded steps".into(),
            Some(t) => format!("violated at t = {t:.6}"),
        }
    }
}

struct RunObserver<'a> {
    mbp: MbpMonitor,
    snapshots: &'a [f64],
    tau: f64,
    dir: &'a Path,
    io_error: Option<std::io::Error>,
}

impl RunObserver<'_> {
    fn due(&self, n: usize) -> bool {
        let t = n as f64 * self.tau;
        self.snapshots.iter().any(|&s| (s - t).abs() < 0.5 * self.tau)
    }
}

impl Observer for RunObserver<'_> {
    fn observe(&mut self, r: &StepRecord, u: &Field) -> ControlFlow<()> {
        if self.due(r.n) {
            let path = self.dir.join(format!("snapshot_{:08}.sifk", r.n));
            let res = File::create(&path)
                .map_err(crate::Error::from)
                .and_then(|f| write_snapshot(BufWriter::new(f), u));
            if let Err(e) = res {
                self.io_error = Some(std::io::Error::other(e.to_string()));
                return ControlFlow::Break(());
            }
        }
        self.mbp.observe(r, u)
    }

    fn wants(&self, n: usize) -> bool {
        self.due(n) || self.mbp.wants(n)
    }
}

/// Loads a config, integrates it and writes `curve.csv`, snapshots and
/// `summary.txt` into the output directory.
pub fn run_config(path: &Path, ov: &RunOverrides) -> Result<RunSummary> {
    let mut cfg = SimulationConfig::load(path)?;
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(dir) = &ov.out {
        cfg.out_dir = dir.clone();
    }
    if let Some(s) = &ov.snapshots {
        cfg.snapshots = s.clone();
    }
    let problem = cfg.problem()?;
    let scheme = cfg.scheme()?;
    let si = problem.instance(scheme.clone(), cfg.tau)?;
    let gamma = problem.spec.gamma();
    fs::create_dir_all(&cfg.out_dir)?;

    let started = Instant::now();
    let mut obs = RunObserver {
        mbp: mbp_monitor(gamma, 1e-12).stop_on_flag(ov.expect_mbp),
        snapshots: &cfg.snapshots,
        tau: cfg.tau,
        dir: &cfg.out_dir,
        io_error: None,
    };
    let u0 = problem.initial_field()?;
    if obs.due(0) {
        let f = File::create(cfg.out_dir.join(format!("snapshot_{:08}.sifk", 0)))?;
        write_snapshot(BufWriter::new(f), &u0)?;
    }
    let icfg = IntegrationConfig::new(cfg.t_final).stride(cfg.stride).with_stages(true);
    let run = integrate(&si, u0, &icfg, &mut obs)?;
    if let Some(e) = obs.io_error {
        return Err(e.into());
    }
    let wall = started.elapsed().as_secs_f64();
    fs::write(cfg.out_dir.join("curve.csv"), curve_csv(&run.records))?;

    let last = run.records.last().expect("at least the initial record");
    let summary = RunSummary {
        out_dir: cfg.out_dir.clone(),
        steps: run.steps,
        t: run.t,
        final_sup_norm: last.sup_norm,
        final_energy: last.energy,
        max_sup_norm: run.max_sup_norm,
        gamma,
        flagged_at: obs.mbp.flag().map(|f| f.t).or_else(|| {
            // a violation between record points still counts
            (run.max_sup_norm > gamma + 1e-12).then_some(f64::NAN)
        }),
        wall_seconds: wall,
    };
    let text = format!(
        "scheme = {}\nsteps = {}\nt = {}\nfinal_sup_norm = {}\nfinal_energy = {}\nmax_sup_norm = {}\ngamma = {}\nmbp = {}\nwall_seconds = {:.3}\n",
        scheme.name(),
        summary.steps,
        format_e12(summary.t),
        format_e12(summary.final_sup_norm),
        format_e12(summary.final_energy),
        format_e12(summary.max_sup_norm),
        format_e12(gamma),
        summary.verdict(),
        wall
    );
    fs::write(cfg.out_dir.join("summary.txt"), text)?;
    Ok(summary)
}

pub fn cmd_run(path: &Path, ov: &RunOverrides, out: &mut dyn Write) -> i32 {
    match run_config(path, ov) {
        Ok(s) => {
            let _ = writeln!(
                out,
                "{} steps to t = {}, final sup norm {:.12}, MBP {}; output in {}",
                s.steps,
                s.t,
                s.final_sup_norm,
                s.verdict(),
                s.out_dir.display()
            );
            if ov.expect_mbp && s.flagged_at.is_some() {
                EXIT_MBP_FLAG
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn cmd_certify(name_or_path: &str, out: &mut dyn Write) -> i32 {
    let t = match resolve_scheme(name_or_path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let report = t.certify();
    let _ = writeln!(out, "{}\n{report}", t.name());
    match report.verdict {
        Verdict::Certified => EXIT_OK,
        Verdict::Refuted => EXIT_REFUTED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchArgs {
    pub desk: bool,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub scheme: Option<String>,
}

pub fn cmd_bench(suite: &str, args: &BenchArgs, out: &mut dyn Write) -> i32 {
    let opts = SuiteOptions {
        desk: args.desk,
        out_dir: Some(args.out.clone().unwrap_or_else(|| PathBuf::from("out").join(suite))),
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        scheme: args.scheme.clone(),
    };
    match run_suite(suite, &opts) {
        Ok(r) => {
            let _ = write!(out, "{r}");
            if r.passed() {
                EXIT_OK
            } else {
                EXIT_ERROR
            }
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_ERROR
        }
    }
}
