//! One-step maps of the stabilized integrating-factor RK method and the
//! time-integration driver.
//!
//! Butcher form, for `1 <= i <= s`:
//!
//! ```text
//! u_i = e^{c_i tau L_k} u^n + tau sum_{j<i} a_ij e^{(c_i - c_j) tau L_k} N[u_j]
//! ```
//!
//! Shu-Osher form:
//!
//! ```text
//! u_i = sum_{j<i} e^{(c_i - c_j) tau L_k} (alpha_ij u_j + tau beta_ij N[u_j])
//! ```
//!
//! with `L_k = L - kappa I` and `N = kappa I + f`. Every exponential is a
//! diagonal multiplier in transform space, so each stage costs one inverse
//! transform plus the forward transforms of the new stage data.

use std::ops::ControlFlow;

use log::warn;

use crate::diagnostics::discrete_energy;
use crate::error::{Error, Result};
use crate::nonlinearity::StabilizedNonlinearity;
use crate::spectral::{same_grid, sup_norm_slice, Field, OperatorSymbol, Spectrum, Workspace};
use crate::tableau::{ButcherTableau, SchemeTableau, ShuOsherTableau};

/// Gaps closer than this share one multiplier table.
const GAP_MERGE_TOL: f64 = 1e-15;

/// A tableau bound to an operator, a nonlinearity and a step size, with
/// every exponential multiplier precomputed.
#[derive(Clone, Debug)]
pub struct SchemeInstance {
    tableau: SchemeTableau,
    sym: OperatorSymbol,
    sn: StabilizedNonlinearity,
    tau: f64,
    /// `(gap, e^{gap tau (lambda - kappa)})` for every distinct `c_i - c_j`.
    tables: Vec<(f64, Vec<f64>)>,
    /// `table_of[i - 1][j]` indexes `tables` for the pair `(i, j)`.
    table_of: Vec<Vec<usize>>,
}

impl SchemeInstance {
    pub fn new(
        tableau: impl Into<SchemeTableau>,
        sym: OperatorSymbol,
        sn: StabilizedNonlinearity,
        tau: f64,
    ) -> Result<Self> {
        let tableau = tableau.into();
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
        }
        if sym.kappa() != sn.kappa() {
            return Err(Error::InvalidArgument(format!(
                "operator kappa {} differs from nonlinearity kappa {}",
                sym.kappa(),
                sn.kappa()
            )));
        }
        let c = tableau.abscissas().to_vec();
        let mut tables: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut table_of = Vec::with_capacity(tableau.stages());
        for i in 1..=tableau.stages() {
            let row: Vec<usize> = (0..i)
                .map(|j| {
                    let gap = c[i] - c[j];
                    if gap < 0.0 {
                        return Err(Error::Tableau(format!(
                            "decreasing abscissas at ({i},{j}) would need a backward exponential"
                        )));
                    }
                    let found = tables.iter().position(|(g, _)| (g - gap).abs() <= GAP_MERGE_TOL);
                    Ok(found.unwrap_or_else(|| {
                        tables.push((gap, sym.exp_multiplier(gap * tau)));
                        tables.len() - 1
                    }))
                })
                .collect::<Result<_>>()?;
            table_of.push(row);
        }
        Ok(Self {
            tableau,
            sym,
            sn,
            tau,
            tables,
            table_of,
        })
    }

    pub fn tableau(&self) -> &SchemeTableau {
        &self.tableau
    }

    pub fn symbol(&self) -> &OperatorSymbol {
        &self.sym
    }

    pub fn nonlinearity(&self) -> &StabilizedNonlinearity {
        &self.sn
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Distinct exponential gaps `c_i - c_j` that have a multiplier table.
    pub fn gaps(&self) -> Vec<f64> {
        self.tables.iter().map(|(g, _)| *g).collect()
    }

    fn multiplier(&self, i: usize, j: usize) -> &[f64] {
        &self.tables[self.table_of[i - 1][j]].1
    }

    /// One step from `u`, allocating a fresh workspace.
    pub fn step(&self, u: &Field) -> Result<Field> {
        Stepper::new(self).step(u, None)
    }
}

/// Applies one step of a Butcher-form scheme.
pub fn step_butcher(si: &SchemeInstance, u: &Field) -> Result<Field> {
    match si.tableau {
        SchemeTableau::Butcher(_) => si.step(u),
        SchemeTableau::ShuOsher(_) => Err(Error::InvalidArgument(
            "scheme is in Shu-Osher form".into(),
        )),
    }
}

/// Applies one step of a Shu-Osher-form scheme.
pub fn step_shu_osher(si: &SchemeInstance, u: &Field) -> Result<Field> {
    match si.tableau {
        SchemeTableau::ShuOsher(_) => si.step(u),
        SchemeTableau::Butcher(_) => Err(Error::InvalidArgument(
            "scheme is in Butcher form".into(),
        )),
    }
}

/// Reusable buffers for repeated steps of one scheme.
pub struct Stepper<'a> {
    si: &'a SchemeInstance,
    work: Workspace,
    /// Transform of `u^n` (Butcher) or of every stage value (Shu-Osher).
    stage_spec: Vec<Spectrum>,
    /// Transforms of `N[u_j]`.
    n_spec: Vec<Spectrum>,
    acc: Spectrum,
    phys: Vec<f64>,
    n_phys: Vec<f64>,
    step_index: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(si: &'a SchemeInstance) -> Self {
        let len = si.sym.grid().len();
        let bc = si.sym.grid().bc();
        let s = si.tableau.stages();
        let stage_slots = match si.tableau {
            SchemeTableau::Butcher(_) => 1,
            SchemeTableau::ShuOsher(_) => s,
        };
        Self {
            si,
            work: Workspace::new(),
            stage_spec: (0..stage_slots).map(|_| Spectrum::zeros(bc, len)).collect(),
            n_spec: (0..s).map(|_| Spectrum::zeros(bc, len)).collect(),
            acc: Spectrum::zeros(bc, len),
            phys: vec![0.0; len],
            n_phys: vec![0.0; len],
            step_index: 0,
        }
    }

    /// Sets the step index used in error reports.
    pub fn set_step_index(&mut self, n: usize) {
        self.step_index = n;
    }

    /// Advances `u` by one step. When `stage_norms` is given it receives
    /// the sup norm of every stage `u_1, ..., u_s`.
    pub fn step(&mut self, u: &Field, stage_norms: Option<&mut Vec<f64>>) -> Result<Field> {
        if !same_grid(self.si.sym.grid(), u.grid()) {
            return Err(Error::GridMismatch);
        }
        let out = match &self.si.tableau {
            SchemeTableau::Butcher(t) => self.butcher(t, u.as_slice(), stage_norms)?,
            SchemeTableau::ShuOsher(t) => self.shu_osher(t, u.as_slice(), stage_norms)?,
        };
        Ok(Field::from_parts_unchecked(u.grid().clone(), out))
    }

    fn nonlinear_transform(&mut self, j: usize, values: &[f64]) -> Result<()> {
        let si = self.si;
        si.sn
            .apply_into(values, &mut self.n_phys)
            .map_err(|_| Error::NonFinite {
                step: self.step_index,
                stage: j,
            })?;
        si.sym
            .plan()
            .forward(&self.n_phys, &mut self.n_spec[j], &mut self.work);
        Ok(())
    }

    fn finish_stage(&mut self, i: usize, norms: &mut Option<&mut Vec<f64>>) -> Result<()> {
        let si = self.si;
        si.sym.plan().inverse(&mut self.acc, &mut self.phys, &mut self.work);
        if self.phys.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                step: self.step_index,
                stage: i,
            });
        }
        if let Some(n) = norms.as_deref_mut() {
            n.push(sup_norm_slice(&self.phys));
        }
        Ok(())
    }

    fn butcher(
        &mut self,
        t: &ButcherTableau,
        u: &[f64],
        mut norms: Option<&mut Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let si = self.si;
        let s = t.stages();
        let tau = si.tau;
        if let Some(n) = norms.as_deref_mut() {
            n.clear();
        }
        si.sym.plan().forward(u, &mut self.stage_spec[0], &mut self.work);
        self.nonlinear_transform(0, u)?;
        for i in 1..=s {
            self.acc
                .assign_scaled(1.0, si.multiplier(i, 0), &self.stage_spec[0]);
            for (j, &a) in t.row(i).iter().enumerate() {
                if a != 0.0 {
                    self.acc
                        .add_scaled(tau * a, si.multiplier(i, j), &self.n_spec[j]);
                }
            }
            self.finish_stage(i, &mut norms)?;
            if i < s {
                let phys = std::mem::take(&mut self.phys);
                let r = self.nonlinear_transform(i, &phys);
                self.phys = phys;
                r?;
            }
        }
        Ok(self.phys.clone())
    }

    fn shu_osher(
        &mut self,
        t: &ShuOsherTableau,
        u: &[f64],
        mut norms: Option<&mut Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let si = self.si;
        let s = t.stages();
        let tau = si.tau;
        if let Some(n) = norms.as_deref_mut() {
            n.clear();
        }
        si.sym.plan().forward(u, &mut self.stage_spec[0], &mut self.work);
        self.nonlinear_transform(0, u)?;
        for i in 1..=s {
            let mut first = true;
            for j in 0..i {
                let (alpha, beta) = (t.alpha(i, j), t.beta(i, j));
                let mult = si.multiplier(i, j);
                if alpha != 0.0 {
                    if first {
                        self.acc.assign_scaled(alpha, mult, &self.stage_spec[j]);
                        first = false;
                    } else {
                        self.acc.add_scaled(alpha, mult, &self.stage_spec[j]);
                    }
                }
                if beta != 0.0 {
                    if first {
                        self.acc.assign_scaled(tau * beta, mult, &self.n_spec[j]);
                        first = false;
                    } else {
                        self.acc.add_scaled(tau * beta, mult, &self.n_spec[j]);
                    }
                }
            }
            if first {
                // every coefficient of the row vanished
                self.acc.scale_by(&vec![0.0; self.phys.len()]);
            }
            self.finish_stage(i, &mut norms)?;
            if i < s {
                si.sym
                    .plan()
                    .forward(&self.phys, &mut self.stage_spec[i], &mut self.work);
                let phys = std::mem::take(&mut self.phys);
                let r = self.nonlinear_transform(i, &phys);
                self.phys = phys;
                r?;
            }
        }
        Ok(self.phys.clone())
    }
}

/// Diagnostics recorded by [`integrate`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    pub sup_norm: f64,
    pub energy: f64,
    /// Sup norms of the stages of the step that produced this record.
    pub stage_sup_norms: Option<Vec<f64>>,
}

/// Receives every record produced by [`integrate`]; returning
/// `ControlFlow::Break` stops the integration after that record.
pub trait Observer {
    fn observe(&mut self, record: &StepRecord, u: &Field) -> ControlFlow<()>;

    /// Also observe step `n` when it falls between record points. Such
    /// records are not stored and carry `energy = NaN`.
    fn wants(&self, _n: usize) -> bool {
        false
    }
}

impl<F> Observer for F
where
    F: FnMut(&StepRecord, &Field) -> ControlFlow<()>,
{
    fn observe(&mut self, record: &StepRecord, u: &Field) -> ControlFlow<()> {
        self(record, u)
    }
}

/// An observer that ignores everything.
pub struct NoObserver;

impl Observer for NoObserver {
    fn observe(&mut self, _: &StepRecord, _: &Field) -> ControlFlow<()> {
        ControlFlow::Continue(())
    }
}

#[derive(Clone, Debug)]
pub struct IntegrationConfig {
    /// Final time; adjusted to the nearest multiple of `tau`.
    pub t_final: f64,
    /// Record every `record_stride` steps (the last step is always recorded).
    pub record_stride: usize,
    /// Keep per-stage sup norms in the records.
    pub record_stages: bool,
}

impl IntegrationConfig {
    pub fn new(t_final: f64) -> Self {
        Self {
            t_final,
            record_stride: 1,
            record_stages: false,
        }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    pub fn with_stages(mut self, on: bool) -> Self {
        self.record_stages = on;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Integration {
    pub field: Field,
    pub records: Vec<StepRecord>,
    pub steps: usize,
    /// Time reached (`steps * tau`).
    pub t: f64,
    /// Largest sup norm over every step and, when recorded, every stage.
    pub max_sup_norm: f64,
    pub stopped_early: bool,
}

/// Number of steps used for `t_final` and the adjusted final time.
pub fn step_count(t_final: f64, tau: f64) -> (usize, f64) {
    let n = (t_final / tau).round().max(0.0) as usize;
    (n, n as f64 * tau)
}

/// Integrates from `u0` to `cfg.t_final`.
pub fn integrate(
    si: &SchemeInstance,
    u0: Field,
    cfg: &IntegrationConfig,
    observer: &mut dyn Observer,
) -> Result<Integration> {
    if !(cfg.t_final >= 0.0 && cfg.t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "final time must be >= 0, got {}",
            cfg.t_final
        )));
    }
    if !same_grid(si.sym.grid(), u0.grid()) {
        return Err(Error::GridMismatch);
    }
    let tau = si.tau;
    let (steps, t_end) = step_count(cfg.t_final, tau);
    if (t_end - cfg.t_final).abs() > 1e-12 * cfg.t_final.max(f64::MIN_POSITIVE) {
        warn!(
            "final time {} is not a multiple of tau = {tau}; using {t_end} ({steps} steps)",
            cfg.t_final
        );
    }
    let stride = cfg.record_stride.max(1);
    let spec = si.sn.spec();
    let energy = |u: &Field| discrete_energy(&si.sym, spec, u);

    let mut records = Vec::new();
    let first = StepRecord {
        n: 0,
        t: 0.0,
        sup_norm: crate::spectral::sup_norm(&u0),
        energy: energy(&u0)?,
        stage_sup_norms: None,
    };
    let mut max_sup = first.sup_norm;
    let stop = observer.observe(&first, &u0).is_break();
    records.push(first);

    let mut u = u0;
    let mut stepper = Stepper::new(si);
    let mut stage_buf = Vec::new();
    let mut taken = 0;
    let mut stopped_early = stop;
    if !stop {
        for n in 1..=steps {
            stepper.set_step_index(n);
            let stages = if cfg.record_stages {
                Some(&mut stage_buf)
            } else {
                None
            };
            u = stepper.step(&u, stages)?;
            taken = n;
            let sup = crate::spectral::sup_norm(&u);
            max_sup = max_sup.max(sup);
            if cfg.record_stages {
                max_sup = stage_buf.iter().copied().fold(max_sup, f64::max);
            }
            let stored = n % stride == 0 || n == steps;
            if stored || observer.wants(n) {
                let rec = StepRecord {
                    n,
                    t: n as f64 * tau,
                    sup_norm: sup,
                    energy: if stored { energy(&u)? } else { f64::NAN },
                    stage_sup_norms: cfg.record_stages.then(|| stage_buf.clone()),
                };
                let flow = observer.observe(&rec, &u);
                if stored {
                    records.push(rec);
                }
                if flow.is_break() {
                    stopped_early = n < steps;
                    break;
                }
            }
        }
    }
    Ok(Integration {
        field: u,
        records,
        steps: taken,
        t: taken as f64 * tau,
        max_sup_norm: max_sup,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::cubic;
    use crate::spectral::{laplacian_symbol, BoundaryCondition, Grid};
    use crate::tableau::{butcher_to_shu_osher, sifrk11, sifrk_s2, ssp_sifrk_s2};
    use std::sync::Arc;

    fn setup(n: usize, kappa: f64) -> (Arc<Grid>, OperatorSymbol, StabilizedNonlinearity) {
        let g = Arc::new(Grid::cube(1, n, (0.0, 1.0), BoundaryCondition::Periodic).unwrap());
        let sym = laplacian_symbol(g.clone(), 1e-3).unwrap().with_kappa(kappa).unwrap();
        let sn = StabilizedNonlinearity::new(cubic(1.0).unwrap(), kappa).unwrap();
        (g, sym, sn)
    }

    #[test]
    fn constant_state_follows_scalar_formula() {
        // With a constant field only the zero mode (lambda = 0) is active.
        let (g, sym, sn) = setup(4, 2.0);
        for tau in [0.01, 0.5, 3.0] {
            let si = SchemeInstance::new(sifrk11(), sym.clone(), sn.clone(), tau).unwrap();
            let u1 = si.step(&Field::constant(g.clone(), 1.0)).unwrap();
            let want = (-2.0 * tau).exp() * (1.0 + 2.0 * tau);
            for v in u1.as_slice() {
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_stays_zero() {
        let (g, sym, sn) = setup(8, 2.0);
        let si = SchemeInstance::new(sifrk_s2(3), sym, sn, 0.7).unwrap();
        let u = si.step(&Field::zeros(g)).unwrap();
        assert!(u.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kappa_mismatch_is_rejected() {
        let (_, sym, _) = setup(4, 2.0);
        let sn = StabilizedNonlinearity::new(cubic(1.0).unwrap(), 3.0).unwrap();
        assert!(SchemeInstance::new(sifrk11(), sym.clone(), sn.clone(), 0.1).is_err());
        let sn = StabilizedNonlinearity::new(cubic(1.0).unwrap(), 2.0).unwrap();
        assert!(SchemeInstance::new(sifrk11(), sym, sn, 0.0).is_err());
    }

    #[test]
    fn gaps_are_deduplicated() {
        let (_, sym, sn) = setup(4, 2.0);
        let si = SchemeInstance::new(sifrk_s2(4), sym.clone(), sn.clone(), 0.1).unwrap();
        let mut gaps = si.gaps();
        gaps.sort_by(f64::total_cmp);
        assert_eq!(gaps, vec![0.25, 0.5, 0.75, 1.0]);
        let si = SchemeInstance::new(ssp_sifrk_s2(2), sym, sn, 0.1).unwrap();
        let mut gaps = si.gaps();
        gaps.sort_by(f64::total_cmp);
        assert_eq!(gaps, vec![0.0, 1.0]);
    }

    #[test]
    fn forms_agree_on_single_stage() {
        let (g, sym, sn) = setup(16, 2.0);
        let u = Field::from_fn(g, |x| 0.8 * (6.0 * x[0]).sin());
        let b = SchemeInstance::new(sifrk11(), sym.clone(), sn.clone(), 0.3).unwrap();
        let so = butcher_to_shu_osher(&sifrk11(), &[vec![1.0]]).unwrap();
        let s = SchemeInstance::new(so, sym, sn, 0.3).unwrap();
        assert_eq!(step_butcher(&b, &u).unwrap(), step_shu_osher(&s, &u).unwrap());
        assert!(step_butcher(&s, &u).is_err());
        assert!(step_shu_osher(&b, &u).is_err());
    }

    #[test]
    fn zero_steps_return_input() {
        let (g, sym, sn) = setup(8, 2.0);
        let si = SchemeInstance::new(sifrk_s2(2), sym, sn, 0.1).unwrap();
        let u0 = Field::from_fn(g, |x| x[0] - 0.5);
        let out = integrate(&si, u0.clone(), &IntegrationConfig::new(0.0), &mut NoObserver).unwrap();
        assert_eq!(out.field, u0);
        assert_eq!(out.steps, 0);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn records_follow_stride_and_observer_can_stop() {
        let (g, sym, sn) = setup(8, 2.0);
        let si = SchemeInstance::new(sifrk_s2(2), sym, sn, 0.1).unwrap();
        let u0 = Field::from_fn(g, |x| 0.5 * (6.0 * x[0]).cos());
        let cfg = IntegrationConfig::new(1.0).stride(3);
        let out = integrate(&si, u0.clone(), &cfg, &mut NoObserver).unwrap();
        let steps: Vec<usize> = out.records.iter().map(|r| r.n).collect();
        assert_eq!(steps, vec![0, 3, 6, 9, 10]);
        for r in &out.records {
            assert!((r.t - r.n as f64 * 0.1).abs() < 1e-14);
        }

        let mut stop_after = |r: &StepRecord, _: &Field| {
            if r.n >= 4 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        };
        let out = integrate(&si, u0, &IntegrationConfig::new(1.0), &mut stop_after).unwrap();
        assert_eq!(out.steps, 4);
        assert!(out.stopped_early);
    }

    #[test]
    fn non_finite_stage_is_reported() {
        let (g, sym, sn) = setup(8, 2.0);
        let si = SchemeInstance::new(ssp_sifrk_s2(2), sym, sn, 1e3).unwrap();
        // Huge data overflows the cubic term.
        let u0 = Field::constant(g, 1e120);
        match si.step(&u0) {
            Err(Error::NonFinite { stage, .. }) => assert!(stage >= 1),
            other => panic!("expected a non-finite error, got {other:?}"),
        }
    }
}
