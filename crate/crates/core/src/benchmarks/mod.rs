//! Problem definitions and experiment harnesses: traveling-wave
//! convergence, MBP runs on random data, the shrinking bubble and the
//! MBP-violation demonstration.

mod suites;

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use rayon::prelude::*;

use crate::diagnostics::{convergence_rates, mbp_monitor, ErrorReport, MbpFlag, RateTable};
use crate::error::{Error, Result};
use crate::nonlinearity::{cubic, flory_huggins, NonlinearSpec, StabilizedNonlinearity};
use crate::rng::{splitmix64_at, uniform_from_bits};
use crate::spectral::{laplacian_symbol, BoundaryCondition, Field, Grid, OperatorSymbol};
use crate::stepper::{integrate, Integration, IntegrationConfig, NoObserver, Observer, SchemeInstance, StepRecord};
use crate::tableau::SchemeTableau;

pub use suites::{
    certified_builtins, energy_increase, mbp_property_cases, run_suite, spatial_ladder, temporal_grid_n,
    temporal_rate_band, MbpCase, SuiteOptions, SuiteOutcome, BUBBLE_CHECKPOINTS, BUBBLE_VANISH_WINDOW, MBP_TAUS,
    SPATIAL_RATE_BAND, SUITES, VIOLATION_WINDOW,
};

/// Seed used when a harness is not given one.
pub const DEFAULT_SEED: u64 = 20_200_101;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KappaPolicy {
    /// The smallest admissible value, `max |f0'|` on `[-gamma, gamma]`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    TravelingWave { eps: f64 },
    Bubble { radius: f64 },
    Random { low: f64, high: f64, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ProblemDef {
    pub grid: Arc<Grid>,
    pub diffusivity: f64,
    pub spec: NonlinearSpec,
    pub kappa: KappaPolicy,
    pub initial: InitialCondition,
}

impl ProblemDef {
    pub fn kappa(&self) -> f64 {
        match self.kappa {
            KappaPolicy::Auto => self.spec.kappa_min(),
            KappaPolicy::Fixed(k) => k,
        }
    }

    pub fn symbol(&self) -> Result<OperatorSymbol> {
        laplacian_symbol(self.grid.clone(), self.diffusivity)?.with_kappa(self.kappa())
    }

    pub fn nonlinearity(&self) -> Result<StabilizedNonlinearity> {
        StabilizedNonlinearity::new(self.spec.clone(), self.kappa())
    }

    pub fn instance(&self, tableau: impl Into<SchemeTableau>, tau: f64) -> Result<SchemeInstance> {
        SchemeInstance::new(tableau, self.symbol()?, self.nonlinearity()?, tau)
    }

    pub fn initial_field(&self) -> Result<Field> {
        match self.initial {
            InitialCondition::TravelingWave { eps } => Ok(traveling_wave_field(&self.grid, eps, 0.0)),
            InitialCondition::Bubble { radius } => Ok(bubble_field(&self.grid, radius)),
            InitialCondition::Random { low, high, seed } => random_initial(&self.grid, low, high, seed),
        }
    }

    /// Exact solution at time `t`, when one is known.
    pub fn exact(&self, t: f64) -> Option<Field> {
        match self.initial {
            InitialCondition::TravelingWave { eps } => Some(traveling_wave_field(&self.grid, eps, t)),
            _ => None,
        }
    }
}

fn unit_box(dim: usize) -> Vec<(f64, f64)> {
    vec![(-0.5, 0.5); dim]
}

fn square_grid(dim: usize, n: usize, bc: BoundaryCondition) -> Result<Arc<Grid>> {
    Ok(Arc::new(Grid::new(&vec![n; dim], &unit_box(dim), bc)?))
}

/// `u_t = Lap u + (u - u^3)/eps^2` on `(-0.5, 0.5)^dim`, periodic, with the
/// tanh front as initial data and `kappa = 2/eps^2`.
///
/// The data depend on `x` only, so `dim = 1` gives the same discrete
/// solution (and the same norms on the unit box) as any higher dimension.
pub fn traveling_wave_problem(eps: f64, dim: usize, n: usize) -> Result<ProblemDef> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    Ok(ProblemDef {
        grid: square_grid(dim, n, BoundaryCondition::Periodic)?,
        diffusivity: 1.0,
        spec: cubic(eps * eps)?,
        kappa: KappaPolicy::Fixed(2.0 / (eps * eps)),
        initial: InitialCondition::TravelingWave { eps },
    })
}

/// Final time of the traveling-wave runs, `sqrt(2) eps / 4`.
pub fn traveling_wave_final_time(eps: f64) -> f64 {
    SQRT_2 * eps / 4.0
}

/// `u_t = eps^2 Lap u + (u - u^3)`, `kappa = 2`, uniform random data.
pub fn allen_cahn_random(
    dim: usize,
    n: usize,
    eps: f64,
    bc: BoundaryCondition,
    low: f64,
    high: f64,
    seed: u64,
) -> Result<ProblemDef> {
    Ok(ProblemDef {
        grid: square_grid(dim, n, bc)?,
        diffusivity: eps * eps,
        spec: cubic(1.0)?,
        kappa: KappaPolicy::Fixed(2.0),
        initial: InitialCondition::Random { low, high, seed },
    })
}

/// Flory-Huggins reaction with `theta = 0.8`, `theta_c = 1.6`,
/// `kappa = 8.02`, periodic, uniform random data.
pub fn flory_huggins_random(dim: usize, n: usize, eps: f64, low: f64, high: f64, seed: u64) -> Result<ProblemDef> {
    Ok(ProblemDef {
        grid: square_grid(dim, n, BoundaryCondition::Periodic)?,
        diffusivity: eps * eps,
        spec: flory_huggins(0.8, 1.6)?,
        kappa: KappaPolicy::Fixed(8.02),
        initial: InitialCondition::Random { low, high, seed },
    })
}

/// Shrinking bubble of radius 0.25 with Neumann walls, `eps = 0.01`.
pub fn bubble_problem(n: usize) -> Result<ProblemDef> {
    Ok(ProblemDef {
        grid: square_grid(2, n, BoundaryCondition::Neumann)?,
        diffusivity: 1e-4,
        spec: cubic(1.0)?,
        kappa: KappaPolicy::Fixed(2.0),
        initial: InitialCondition::Bubble { radius: 0.25 },
    })
}

/// `1/2 (1 - tanh((x - s t) / (2 sqrt(2) eps)))` with `s = 3 / (sqrt(2) eps)`.
pub fn traveling_wave_exact(eps: f64, t: f64, x: f64) -> f64 {
    let s = 3.0 / (SQRT_2 * eps);
    0.5 * (1.0 - ((x - s * t) / (2.0 * SQRT_2 * eps)).tanh())
}

fn traveling_wave_field(grid: &Arc<Grid>, eps: f64, t: f64) -> Field {
    Field::from_fn(grid.clone(), |x| traveling_wave_exact(eps, t, x[0]))
}

fn bubble_field(grid: &Arc<Grid>, radius: f64) -> Field {
    Field::from_fn(grid.clone(), |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 <= radius * radius {
            1.0
        } else {
            -1.0
        }
    })
}

/// `1` inside the disc of radius 0.25, `-1` outside.
pub fn bubble_initial(grid: &Arc<Grid>) -> Result<Field> {
    if grid.dim() != 2 {
        return Err(Error::Grid("the bubble needs a 2D grid".into()));
    }
    Ok(bubble_field(grid, 0.25))
}

/// Uniform values in `[low, high)`; entry `k` (row-major) is built from
/// the `k`-th SplitMix64 output for `seed`.
pub fn random_initial(grid: &Arc<Grid>, low: f64, high: f64, seed: u64) -> Result<Field> {
    if !(low < high && low.is_finite() && high.is_finite()) {
        return Err(Error::InvalidArgument(format!("need low < high, got [{low}, {high}]")));
    }
    let data = (0..grid.len())
        .into_par_iter()
        .map(|k| uniform_from_bits(splitmix64_at(seed, k as u64), low, high))
        .collect();
    Field::new(grid.clone(), data)
}

/// Errors at `t_final` against the exact solution for each step size
/// (coarsest first).
pub fn run_temporal_convergence(
    scheme: &SchemeTableau,
    problem: &ProblemDef,
    taus: &[f64],
    t_final: f64,
) -> Result<RateTable> {
    let exact = problem
        .exact(t_final)
        .ok_or_else(|| Error::InvalidArgument("problem has no exact solution".into()))?;
    let u0 = problem.initial_field()?;
    let mut reports = Vec::with_capacity(taus.len());
    for &tau in taus {
        let si = problem.instance(scheme.clone(), tau)?;
        let out = integrate(&si, u0.clone(), &IntegrationConfig::new(t_final).stride(usize::MAX), &mut NoObserver)?;
        reports.push(ErrorReport::measure(scheme.name(), tau, &out.field, &exact)?);
    }
    convergence_rates(&reports)
}

/// Errors at `t_final` for each grid size `n` (coarsest first) at a fixed
/// step size. `make` builds the problem on an `n`-point grid.
pub fn run_spatial_convergence(
    scheme: &SchemeTableau,
    make: impl Fn(usize) -> Result<ProblemDef>,
    ns: &[usize],
    tau: f64,
    t_final: f64,
) -> Result<RateTable> {
    let mut reports = Vec::with_capacity(ns.len());
    for &n in ns {
        let problem = make(n)?;
        let exact = problem
            .exact(t_final)
            .ok_or_else(|| Error::InvalidArgument("problem has no exact solution".into()))?;
        let si = problem.instance(scheme.clone(), tau)?;
        let out = integrate(
            &si,
            problem.initial_field()?,
            &IntegrationConfig::new(t_final).stride(usize::MAX),
            &mut NoObserver,
        )?;
        reports.push(ErrorReport::measure(scheme.name(), problem.grid.h(0), &out.field, &exact)?);
    }
    convergence_rates(&reports)
}

/// Setup of the MBP-violation comparison.
#[derive(Clone, Debug)]
pub struct ViolationSetup {
    pub n: usize,
    pub tau: f64,
    pub seed: u64,
    /// How long to run the non-certified scheme looking for a flag.
    pub t_search: f64,
    /// How long to run the certified scheme.
    pub t_certified: f64,
}

impl Default for ViolationSetup {
    fn default() -> Self {
        Self {
            n: 256,
            tau: 0.1,
            seed: DEFAULT_SEED,
            t_search: 50.0,
            t_certified: 440.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ViolationReport {
    /// First flag of the non-certified run.
    pub flag: Option<MbpFlag>,
    pub flagged_run: Integration,
    /// Flag of the certified run on the same data (expected `None`).
    pub certified_flag: Option<MbpFlag>,
    pub certified_max: f64,
    pub certified_run: Integration,
}

/// Runs `flagged` until its sup norm first exceeds 1 and `certified` on the
/// same random data, for the cubic Allen-Cahn problem with `eps = 0.01`.
pub fn run_mbp_violation_demo(
    flagged: &SchemeTableau,
    certified: &SchemeTableau,
    setup: &ViolationSetup,
) -> Result<ViolationReport> {
    let problem = allen_cahn_random(2, setup.n, 0.01, BoundaryCondition::Periodic, -0.9, 0.9, setup.seed)?;
    let u0 = problem.initial_field()?;

    let si = problem.instance(flagged.clone(), setup.tau)?;
    let mut mon = mbp_monitor(1.0, 1e-12).stop_on_flag(true);
    let flagged_run = integrate(&si, u0.clone(), &IntegrationConfig::new(setup.t_search), &mut mon)?;
    let flag = mon.flag();

    let si = problem.instance(certified.clone(), setup.tau)?;
    let mut mon = mbp_monitor(1.0, 1e-12);
    let certified_run = integrate(&si, u0, &IntegrationConfig::new(setup.t_certified), &mut mon)?;
    Ok(ViolationReport {
        flag,
        flagged_run,
        certified_flag: mon.flag(),
        certified_max: mon.max_seen(),
        certified_run,
    })
}

/// Radius of the `u > 0` region along the grid row closest to `y = 0`,
/// measured from `x = 0` to the outermost zero crossing (linear
/// interpolation). Zero when the row has no positive value.
pub fn bubble_radius(u: &Field) -> Result<f64> {
    let g = u.grid();
    if g.dim() != 2 {
        return Err(Error::Grid("bubble radius needs a 2D field".into()));
    }
    let (nx, ny) = (g.shape()[0], g.shape()[1]);
    let row = (0..ny)
        .min_by(|&a, &b| g.coordinate(1, a).abs().total_cmp(&g.coordinate(1, b).abs()))
        .expect("nonempty grid");
    let val = |i: usize| u.as_slice()[i * ny + row];
    let mut radius: f64 = 0.0;
    for i in 0..nx {
        if val(i) <= 0.0 {
            continue;
        }
        let x = g.coordinate(0, i);
        let mut r = x.abs();
        // extend to the zero crossing on the outward side
        let next = if x >= 0.0 { i.checked_add(1).filter(|&k| k < nx) } else { i.checked_sub(1) };
        if let Some(k) = next {
            let (a, b) = (val(i), val(k));
            if b <= 0.0 {
                r += (g.coordinate(0, k) - x).abs() * a / (a - b);
            }
        }
        radius = radius.max(r);
    }
    Ok(radius)
}

#[derive(Clone, Debug)]
pub struct BubbleReport {
    /// `(t, radius)` at the requested checkpoints that were reached.
    pub radii: Vec<(f64, f64)>,
    /// First step time at which no grid value is positive.
    pub vanished_at: Option<f64>,
    pub records: Vec<StepRecord>,
    pub max_sup_norm: f64,
}

/// Integrates the bubble to `t_final`, sampling the radius at `checkpoints`
/// and stopping once the bubble has vanished.
pub fn run_bubble(
    problem: &ProblemDef,
    scheme: &SchemeTableau,
    tau: f64,
    t_final: f64,
    checkpoints: &[f64],
    record_stride: usize,
) -> Result<BubbleReport> {
    struct Watch<'a> {
        tau: f64,
        checkpoints: &'a [f64],
        radii: Vec<(f64, f64)>,
        vanished_at: Option<f64>,
        err: Option<Error>,
    }
    impl Observer for Watch<'_> {
        fn observe(&mut self, r: &StepRecord, u: &Field) -> std::ops::ControlFlow<()> {
            if self.checkpoints.iter().any(|&c| (c - r.t).abs() < 0.5 * self.tau) {
                match bubble_radius(u) {
                    Ok(rad) => self.radii.push((r.t, rad)),
                    Err(e) => {
                        self.err = Some(e);
                        return std::ops::ControlFlow::Break(());
                    }
                }
            }
            if self.vanished_at.is_none() && u.as_slice().par_iter().all(|&v| v <= 0.0) {
                self.vanished_at = Some(r.t);
                return std::ops::ControlFlow::Break(());
            }
            std::ops::ControlFlow::Continue(())
        }
    }
    let si = problem.instance(scheme.clone(), tau)?;
    let mut watch = Watch {
        tau,
        checkpoints,
        radii: Vec::new(),
        vanished_at: None,
        err: None,
    };
    // Every step is observed; records are thinned afterwards.
    let out = integrate(&si, problem.initial_field()?, &IntegrationConfig::new(t_final), &mut watch)?;
    if let Some(e) = watch.err {
        return Err(e);
    }
    let stride = record_stride.max(1);
    let last = out.records.last().map(|r| r.n);
    let records = out
        .records
        .into_iter()
        .filter(|r| r.n % stride == 0 || Some(r.n) == last)
        .collect();
    Ok(BubbleReport {
        radii: watch.radii,
        vanished_at: watch.vanished_at,
        records,
        max_sup_norm: out.max_sup_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traveling_wave_values() {
        assert_eq!(traveling_wave_exact(0.015, 0.0, 0.0), 0.5);
        assert!((traveling_wave_exact(0.015, 0.0, -10.0) - 1.0).abs() < 1e-15);
        assert!(traveling_wave_exact(0.015, 0.0, 10.0).abs() < 1e-15);
        let eps = 0.015;
        let t = traveling_wave_final_time(eps);
        let s = 3.0 / (SQRT_2 * eps);
        assert!((traveling_wave_exact(eps, t, s * t) - 0.5).abs() < 1e-15);
        assert!((s * t - 0.75).abs() < 1e-14);
    }

    #[test]
    fn bubble_center_and_corner() {
        let g = Arc::new(Grid::cube(2, 64, (-0.5, 0.5), BoundaryCondition::Neumann).unwrap());
        let u = bubble_initial(&g).unwrap();
        assert_eq!(u.as_slice()[0], -1.0);
        assert_eq!(u.as_slice()[32 * 64 + 32], 1.0);
        let r = bubble_radius(&u).unwrap();
        assert!((r - 0.25).abs() < 1.0 / 64.0, "{r}");
        assert_eq!(bubble_radius(&Field::constant(g, -1.0)).unwrap(), 0.0);
    }

    #[test]
    fn random_data_is_reproducible_and_bounded() {
        let g = Arc::new(Grid::cube(2, 32, (-0.5, 0.5), BoundaryCondition::Periodic).unwrap());
        let a = random_initial(&g, -0.9, 0.9, 7).unwrap();
        let b = random_initial(&g, -0.9, 0.9, 7).unwrap();
        let c = random_initial(&g, -0.9, 0.9, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.as_slice().iter().all(|v| (-0.9..0.9).contains(v)));
        assert!(random_initial(&g, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn problem_kappas() {
        assert_eq!(traveling_wave_problem(0.015, 1, 16).unwrap().kappa(), 2.0 / 0.015f64.powi(2));
        assert_eq!(flory_huggins_random(2, 8, 0.01, -0.5, 0.5, 1).unwrap().kappa(), 8.02);
        let mut p = flory_huggins_random(2, 8, 0.01, -0.5, 0.5, 1).unwrap();
        p.kappa = KappaPolicy::Auto;
        assert!((p.kappa() - 8.02).abs() < 0.01);
    }
}
