//! Explicit Runge-Kutta tableaus in Butcher and Shu-Osher form.
//!
//! Indexing follows the integrating-factor convention used throughout the
//! crate: stage `0` is the incoming solution `u^n`, stage `s` is `u^{n+1}`,
//! and row `i` of the coefficient matrix holds `a[i][0..i]` for
//! `1 <= i <= s`. The abscissa vector has `s + 1` entries with `c[0] = 0`.
//! This differs from the classical Butcher layout, where the weights `b`
//! live in a separate row; here they are simply row `s`.

mod builtin;
mod certify;
mod format;

pub use builtin::{
    builtin_tableaus, heun_sifrk33, lookup_builtin, sifrk11, sifrk_s2, ssp_sifrk33, ssp_sifrk_s2,
    BuiltinScheme,
};
pub use certify::{
    certify_mbp_butcher, certify_mbp_shu_osher, g_derivative, g_function, validate_butcher,
    CertificationReport, Check, Condition, Verdict, Witness, DEFAULT_SAMPLES, DEFAULT_X_MAX,
};
pub use format::{parse_tableau, read_tableau, resolve_scheme, write_tableau};

use crate::error::{Error, Result};

/// Absolute tolerance for algebraic identities on coefficients.
pub const ALGEBRAIC_TOL: f64 = 1e-14;
/// Slack allowed on `g_i'` before a stage counts as increasing.
pub const MONOTONICITY_TOL: f64 = 1e-12;
/// Tolerance for Butcher/Shu-Osher round trips.
pub const ROUND_TRIP_TOL: f64 = 1e-13;

/// An explicit RK tableau in Butcher form.
#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    name: String,
    order: usize,
    a: Vec<Vec<f64>>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// Builds a tableau from its rows `a[1..=s]` and abscissas `c[0..=s]`.
    ///
    /// Only the shape is checked here; use [`validate_butcher`] for the
    /// sign and consistency conditions.
    pub fn new(name: impl Into<String>, order: usize, a: Vec<Vec<f64>>, c: Vec<f64>) -> Result<Self> {
        check_lower_triangular("a", &a)?;
        let s = a.len();
        if c.len() != s + 1 {
            return Err(Error::Tableau(format!(
                "abscissa vector has {} entries, expected {}",
                c.len(),
                s + 1
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Tableau("non-finite abscissa".into()));
        }
        Ok(Self {
            name: name.into(),
            order,
            a,
            c,
        })
    }

    /// Builds a tableau whose abscissas are the row sums of `a`.
    pub fn from_rows(name: impl Into<String>, order: usize, a: Vec<Vec<f64>>) -> Result<Self> {
        let mut c = vec![0.0];
        c.extend(a.iter().map(|row| row.iter().sum::<f64>()));
        Self::new(name, order, a, c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Claimed temporal order (metadata only).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.a.len()
    }

    /// Coefficient `a[i][j]` for `1 <= i <= s`, `j < i`.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i - 1][j]
    }

    /// Row `i` of the coefficient matrix, `a[i][0..i]`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i - 1]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.c
    }

    pub(crate) fn check_stage(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.stages() {
            return Err(Error::StageIndex {
                stage: i,
                stages: self.stages(),
            });
        }
        Ok(())
    }
}

/// An explicit RK tableau in Shu-Osher form.
///
/// Stage `i` is `sum_j e^{(c_i - c_j) tau L}(alpha[i][j] u_j + tau beta[i][j] N[u_j])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuOsherTableau {
    name: String,
    order: usize,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    c: Vec<f64>,
}

impl ShuOsherTableau {
    pub fn new(
        name: impl Into<String>,
        order: usize,
        alpha: Vec<Vec<f64>>,
        beta: Vec<Vec<f64>>,
        c: Vec<f64>,
    ) -> Result<Self> {
        check_lower_triangular("alpha", &alpha)?;
        check_lower_triangular("beta", &beta)?;
        if alpha.len() != beta.len() {
            return Err(Error::Tableau(format!(
                "alpha has {} rows but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        if c.len() != alpha.len() + 1 {
            return Err(Error::Tableau(format!(
                "abscissa vector has {} entries, expected {}",
                c.len(),
                alpha.len() + 1
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Tableau("non-finite abscissa".into()));
        }
        Ok(Self {
            name: name.into(),
            order,
            alpha,
            beta,
            c,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.alpha[i - 1][j]
    }

    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.beta[i - 1][j]
    }

    pub fn alpha_rows(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    pub fn beta_rows(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn abscissas(&self) -> &[f64] {
        &self.c
    }
}

/// Either form of tableau; the stepper accepts both.
#[derive(Clone, Debug, PartialEq)]
pub enum SchemeTableau {
    Butcher(ButcherTableau),
    ShuOsher(ShuOsherTableau),
}

impl SchemeTableau {
    pub fn name(&self) -> &str {
        match self {
            Self::Butcher(t) => t.name(),
            Self::ShuOsher(t) => t.name(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Self::Butcher(t) => t.order(),
            Self::ShuOsher(t) => t.order(),
        }
    }

    pub fn stages(&self) -> usize {
        match self {
            Self::Butcher(t) => t.stages(),
            Self::ShuOsher(t) => t.stages(),
        }
    }

    pub fn abscissas(&self) -> &[f64] {
        match self {
            Self::Butcher(t) => t.abscissas(),
            Self::ShuOsher(t) => t.abscissas(),
        }
    }

    /// Butcher form of the scheme (converting from Shu-Osher if needed).
    pub fn to_butcher(&self) -> ButcherTableau {
        match self {
            Self::Butcher(t) => t.clone(),
            Self::ShuOsher(t) => shu_osher_to_butcher(t),
        }
    }

    /// Runs the certifier that matches the stored form.
    pub fn certify(&self) -> CertificationReport {
        match self {
            Self::Butcher(t) => certify_mbp_butcher(t, DEFAULT_X_MAX, DEFAULT_SAMPLES)
                .expect("default sampling parameters are valid"),
            Self::ShuOsher(t) => certify_mbp_shu_osher(t),
        }
    }
}

impl From<ButcherTableau> for SchemeTableau {
    fn from(t: ButcherTableau) -> Self {
        Self::Butcher(t)
    }
}

impl From<ShuOsherTableau> for SchemeTableau {
    fn from(t: ShuOsherTableau) -> Self {
        Self::ShuOsher(t)
    }
}

/// Rewrites a Butcher tableau in Shu-Osher form for a chosen `alpha`.
///
/// `beta[i][j] = a[i][j] - sum_{k=j+1}^{i-1} alpha[i][k] a[k][j]`; abscissas
/// are copied. `alpha` must be nonnegative with unit row sums.
pub fn butcher_to_shu_osher(t: &ButcherTableau, alpha: &[Vec<f64>]) -> Result<ShuOsherTableau> {
    check_lower_triangular("alpha", alpha)?;
    if alpha.len() != t.stages() {
        return Err(Error::Tableau(format!(
            "alpha has {} rows, tableau has {} stages",
            alpha.len(),
            t.stages()
        )));
    }
    for (r, row) in alpha.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::Tableau(format!(
                "alpha row {} must be nonnegative with unit sum (sum = {sum})",
                r + 1
            )));
        }
    }
    let s = t.stages();
    let mut beta = Vec::with_capacity(s);
    for i in 1..=s {
        let row: Vec<f64> = (0..i)
            .map(|j| {
                let correction: f64 = (j + 1..i).map(|k| alpha[i - 1][k] * t.a(k, j)).sum();
                t.a(i, j) - correction
            })
            .collect();
        beta.push(row);
    }
    ShuOsherTableau::new(t.name(), t.order(), alpha.to_vec(), beta, t.abscissas().to_vec())
}

/// Recovers the Butcher coefficients of a Shu-Osher tableau.
///
/// `a[i][j] = beta[i][j] + sum_{k=j+1}^{i-1} alpha[i][k] a[k][j]`, built row
/// by row. Abscissas are copied.
pub fn shu_osher_to_butcher(t: &ShuOsherTableau) -> ButcherTableau {
    let s = t.stages();
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 1..=s {
        let row: Vec<f64> = (0..i)
            .map(|j| {
                let carried: f64 = (j + 1..i).map(|k| t.alpha(i, k) * a[k - 1][j]).sum();
                t.beta(i, j) + carried
            })
            .collect();
        a.push(row);
    }
    ButcherTableau::new(t.name(), t.order(), a, t.abscissas().to_vec())
        .expect("shape inherited from a valid Shu-Osher tableau")
}

fn check_lower_triangular(label: &str, rows: &[Vec<f64>]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Tableau(format!("{label} must have at least one stage")));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != r + 1 {
            return Err(Error::Tableau(format!(
                "{label} row {} has {} entries, expected {}",
                r + 1,
                row.len(),
                r + 1
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Tableau(format!("{label} row {} is not finite", r + 1)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        assert!(ButcherTableau::new("bad", 1, vec![vec![1.0, 0.0]], vec![0.0, 1.0]).is_err());
        assert!(ButcherTableau::new("bad", 1, vec![vec![1.0]], vec![0.0]).is_err());
        assert!(ButcherTableau::new("bad", 1, vec![], vec![0.0]).is_err());
        assert!(ShuOsherTableau::new("bad", 1, vec![vec![1.0]], vec![], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn single_stage_conversion_has_no_correction() {
        let t = sifrk11();
        let so = butcher_to_shu_osher(&t, &[vec![1.0]]).unwrap();
        assert_eq!(so.beta(1, 0), t.a(1, 0));
        assert_eq!(shu_osher_to_butcher(&so), t);
    }

    #[test]
    fn sifrk22_with_identity_like_alpha() {
        let t = sifrk_s2(2);
        let so = butcher_to_shu_osher(&t, &[vec![1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(so.beta(2, 1), 1.0);
        assert_eq!(so.beta(2, 0), -0.5);
    }

    #[test]
    fn ssp22_canonical_alpha_recovers_printed_beta() {
        // Butcher form of SSP-sIFRK(2,2): a10 = 1, a20 = a21 = 1/2.
        let t = ButcherTableau::new(
            "ssp22",
            2,
            vec![vec![1.0], vec![0.5, 0.5]],
            vec![0.0, 1.0, 1.0],
        )
        .unwrap();
        let so = butcher_to_shu_osher(&t, &[vec![1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(so.beta(2, 1), 0.5);
        assert_eq!(so.beta(2, 0), 0.0);
        assert_eq!(so.beta(1, 0), 1.0);
    }

    #[test]
    fn ssp_forms_convert_to_printed_abscissas() {
        let b22 = shu_osher_to_butcher(&ssp_sifrk_s2(2));
        assert_eq!(b22.abscissas(), &[0.0, 1.0, 1.0]);
        assert_eq!(b22.row(2), &[0.5, 0.5]);

        let b33 = shu_osher_to_butcher(&ssp_sifrk33());
        let c = b33.abscissas();
        assert!((c[1] - 2.0 / 3.0).abs() < 1e-15 && (c[2] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c[3], 1.0);
        // g_2 of SSP-sIFRK(3,3): coefficients 2/9 (gap 2/3) and 4/9 (gap 0).
        assert!((b33.a(2, 0) - 2.0 / 9.0).abs() < 1e-15);
        assert!((b33.a(2, 1) - 4.0 / 9.0).abs() < 1e-15);
        assert!(validate_butcher(&b33).verdict == Verdict::Certified);
    }

    #[test]
    fn alpha_must_be_convex() {
        let t = sifrk_s2(2);
        assert!(butcher_to_shu_osher(&t, &[vec![1.0], vec![0.7, 0.7]]).is_err());
        assert!(butcher_to_shu_osher(&t, &[vec![1.0], vec![1.5, -0.5]]).is_err());
        assert!(butcher_to_shu_osher(&t, &[vec![1.0]]).is_err());
    }

    #[test]
    fn stage_index_errors() {
        let t = sifrk11();
        assert!(matches!(g_function(&t, 0, 1.0), Err(Error::StageIndex { .. })));
        assert!(matches!(g_derivative(&t, 2, 1.0), Err(Error::StageIndex { .. })));
    }
}
