//! Energy, error norms, convergence rates and the MBP monitor.

use std::fmt::Write as _;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearSpec;
use crate::spectral::{apply_laplacian, apply_laplacian_spectral, Field, OperatorSymbol};
use crate::stepper::{Observer, StepRecord};

/// `h^d [ -1/2 sum u (L u) + sum F(u) ]` with the stencil Laplacian at the
/// symbol's diffusivity. The stabilizer `kappa` is ignored.
pub fn discrete_energy(sym: &OperatorSymbol, spec: &NonlinearSpec, u: &Field) -> Result<f64> {
    let lu = apply_laplacian(sym, u)?;
    Ok(energy_from(spec, u, &lu))
}

/// Same as [`discrete_energy`] but with `L u` computed in transform space.
pub fn discrete_energy_spectral(
    sym: &OperatorSymbol,
    spec: &NonlinearSpec,
    u: &Field,
) -> Result<f64> {
    let lu = apply_laplacian_spectral(sym, u)?;
    Ok(energy_from(spec, u, &lu))
}

fn energy_from(spec: &NonlinearSpec, u: &Field, lu: &Field) -> f64 {
    let sum: f64 = u
        .as_slice()
        .par_iter()
        .zip(lu.as_slice().par_iter())
        .map(|(&v, &l)| -0.5 * v * l + spec.potential(v))
        .sum();
    u.grid().cell_volume() * sum
}

fn check_pair(u: &Field, v: &Field) -> Result<()> {
    if u.same_grid(v) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `sqrt(h^d sum (u - v)^2)`.
pub fn l2_error(u: &Field, v: &Field) -> Result<f64> {
    check_pair(u, v)?;
    let s: f64 = u
        .as_slice()
        .par_iter()
        .zip(v.as_slice().par_iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((u.grid().cell_volume() * s).sqrt())
}

/// `max |u - v|`.
pub fn linf_error(u: &Field, v: &Field) -> Result<f64> {
    check_pair(u, v)?;
    Ok(u
        .as_slice()
        .par_iter()
        .zip(v.as_slice().par_iter())
        .map(|(a, b)| (a - b).abs())
        .reduce(|| 0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    /// Step size or grid spacing the errors were measured at.
    pub tau_or_h: f64,
    pub label: String,
}

impl ErrorReport {
    pub fn measure(label: impl Into<String>, tau_or_h: f64, u: &Field, exact: &Field) -> Result<Self> {
        Ok(Self {
            l2: l2_error(u, exact)?,
            linf: linf_error(u, exact)?,
            tau_or_h,
            label: label.into(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub resolution: f64,
    pub l2: f64,
    pub l2_rate: Option<f64>,
    pub linf: f64,
    pub linf_rate: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    /// L2 rate between the last two rows.
    pub fn finest_l2_rate(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.l2_rate)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("resolution,l2,l2_rate,linf,linf_rate\n");
        let opt = |r: Option<f64>| r.map(format_e12).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                format_e12(r.resolution),
                format_e12(r.l2),
                opt(r.l2_rate),
                format_e12(r.linf),
                opt(r.linf_rate)
            );
        }
        out
    }
}

impl std::fmt::Display for RateTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:>12}  {:>11}  {:>5}  {:>11}  {:>5}", "resolution", "L2", "rate", "Linf", "rate")?;
        let rate = |r: Option<f64>| r.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                f,
                "{:>12.4e}  {:>11.4e}  {:>5}  {:>11.4e}  {:>5}",
                r.resolution,
                r.l2,
                rate(r.l2_rate),
                r.linf,
                rate(r.linf_rate)
            )?;
        }
        Ok(())
    }
}

/// `log2(e_{i-1} / e_i)` for successive rows, coarsest first.
pub fn convergence_rates(errors: &[ErrorReport]) -> Result<RateTable> {
    let mut rows: Vec<RateRow> = Vec::with_capacity(errors.len());
    for (k, e) in errors.iter().enumerate() {
        if !(e.l2 > 0.0 && e.linf > 0.0 && e.tau_or_h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "row {k}: errors and resolution must be positive"
            )));
        }
        let (l2_rate, linf_rate) = match rows.last() {
            None => (None, None),
            Some(prev) => {
                if e.tau_or_h >= prev.resolution {
                    return Err(Error::InvalidArgument(format!(
                        "row {k}: resolutions must decrease"
                    )));
                }
                let ratio = (prev.resolution / e.tau_or_h).log2();
                (
                    Some((prev.l2 / e.l2).log2() / ratio),
                    Some((prev.linf / e.linf).log2() / ratio),
                )
            }
        };
        rows.push(RateRow {
            resolution: e.tau_or_h,
            l2: e.l2,
            l2_rate,
            linf: e.linf,
            linf_rate,
        });
    }
    Ok(RateTable { rows })
}

/// A step where the sup norm exceeded the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MbpFlag {
    pub n: usize,
    pub t: f64,
    pub sup_norm: f64,
}

/// Observer that flags the first record whose sup norm (or stage sup norm)
/// exceeds `gamma + tol`.
#[derive(Clone, Debug)]
pub struct MbpMonitor {
    gamma: f64,
    tol: f64,
    stop_on_flag: bool,
    flag: Option<MbpFlag>,
    max_seen: f64,
}

pub fn mbp_monitor(gamma: f64, tol: f64) -> MbpMonitor {
    MbpMonitor {
        gamma,
        tol,
        stop_on_flag: false,
        flag: None,
        max_seen: 0.0,
    }
}

impl MbpMonitor {
    /// Ask the integrator to stop at the first flag.
    pub fn stop_on_flag(mut self, on: bool) -> Self {
        self.stop_on_flag = on;
        self
    }

    pub fn flag(&self) -> Option<MbpFlag> {
        self.flag
    }

    pub fn max_seen(&self) -> f64 {
        self.max_seen
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Observer for MbpMonitor {
    fn observe(&mut self, r: &StepRecord, _: &Field) -> ControlFlow<()> {
        let stage_max = r
            .stage_sup_norms
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .copied()
            .fold(r.sup_norm, f64::max);
        self.max_seen = self.max_seen.max(stage_max);
        if self.flag.is_none() && stage_max > self.gamma + self.tol {
            self.flag = Some(MbpFlag {
                n: r.n,
                t: r.t,
                sup_norm: stage_max,
            });
        }
        if self.stop_on_flag && self.flag.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }

    fn wants(&self, _n: usize) -> bool {
        self.stop_on_flag
    }
}

/// Formats like C's `%.12e` (signed exponent, at least two digits).
pub fn format_e12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

/// The `step,t,sup_norm,energy` curve CSV.
pub fn curve_csv(records: &[StepRecord]) -> String {
    let mut out = String::from("step,t,sup_norm,energy\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n,
            format_e12(r.t),
            format_e12(r.sup_norm),
            format_e12(r.energy)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::cubic;
    use crate::spectral::{laplacian_symbol, BoundaryCondition, Grid};
    use std::sync::Arc;

    fn report(h: f64, e: f64) -> ErrorReport {
        ErrorReport {
            l2: e,
            linf: 2.0 * e,
            tau_or_h: h,
            label: String::new(),
        }
    }

    #[test]
    fn format_matches_printf() {
        assert_eq!(format_e12(0.0), "0.000000000000e+00");
        assert_eq!(format_e12(1.0), "1.000000000000e+00");
        assert_eq!(format_e12(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_e12(1.25e123), "1.250000000000e+123");
    }

    #[test]
    fn energy_of_simple_states() {
        let g = Arc::new(Grid::cube(2, 8, (0.0, 2.0), BoundaryCondition::Periodic).unwrap());
        let eps2 = 0.01;
        let sym = laplacian_symbol(g.clone(), 1.0).unwrap();
        let spec = cubic(eps2).unwrap();
        let e0 = discrete_energy(&sym, &spec, &Field::zeros(g.clone())).unwrap();
        assert!((e0 - 4.0 / (4.0 * eps2)).abs() < 1e-12);
        let e1 = discrete_energy(&sym, &spec, &Field::constant(g, 1.0)).unwrap();
        assert_eq!(e1, 0.0);
    }

    #[test]
    fn constant_difference_norms() {
        let g = Arc::new(Grid::cube(1, 10, (0.0, 4.0), BoundaryCondition::Neumann).unwrap());
        let u = Field::from_fn(g.clone(), |x| x[0].sin());
        let v = Field::from_fn(g, |x| x[0].sin() - 0.3);
        assert!((l2_error(&u, &v).unwrap() - 0.6).abs() < 1e-14);
        assert!((linf_error(&u, &v).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(l2_error(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_errors_give_rate_two() {
        let rows: Vec<_> = (0..5).map(|k| {
            let h = 0.1 / 2f64.powi(k);
            report(h, 3.0 * h * h)
        }).collect();
        let t = convergence_rates(&rows).unwrap();
        assert_eq!(t.rows[0].l2_rate, None);
        for r in &t.rows[1..] {
            assert!((r.l2_rate.unwrap() - 2.0).abs() < 1e-12);
            assert!((r.linf_rate.unwrap() - 2.0).abs() < 1e-12);
        }
        let csv = t.to_csv();
        assert!(csv.starts_with("resolution,l2,l2_rate,linf,linf_rate\n1.000000000000e-01,"));
        assert!(csv.lines().nth(1).unwrap().contains(",,"));
    }

    #[test]
    fn rates_reject_bad_input() {
        assert!(convergence_rates(&[report(0.1, 1.0), report(0.05, 0.0)]).is_err());
        assert!(convergence_rates(&[report(0.1, 1.0), report(0.2, 0.5)]).is_err());
    }

    #[test]
    fn monitor_flags_first_excess() {
        let g = Arc::new(Grid::cube(1, 2, (0.0, 1.0), BoundaryCondition::Periodic).unwrap());
        let u = Field::zeros(g);
        let rec = |n: usize, s: f64| StepRecord {
            n,
            t: n as f64 * 0.5,
            sup_norm: s,
            energy: 0.0,
            stage_sup_norms: None,
        };
        let mut m = mbp_monitor(1.0, 1e-12);
        assert!(m.observe(&rec(1, 0.99), &u).is_continue());
        assert!(m.observe(&rec(2, 1.0 + 1e-13), &u).is_continue());
        assert!(m.flag().is_none());
        let _ = m.observe(&rec(3, 1.001), &u);
        let _ = m.observe(&rec(4, 1.01), &u);
        let f = m.flag().unwrap();
        assert_eq!((f.n, f.t), (3, 1.5));

        let mut never = mbp_monitor(f64::INFINITY, 0.0).stop_on_flag(true);
        assert!(never.observe(&rec(1, 1e300), &u).is_continue());
    }
}
