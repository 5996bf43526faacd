//! Uniform grids, grid functions and the stabilized diffusion operator.
//!
//! The central-difference Laplacian on a periodic or cell-centered Neumann
//! grid is diagonalized exactly by the DFT or the DCT-II respectively, so
//! `e^{t(L - kappa I)}` is applied matrix-free as a multiplier in transform
//! space.

mod snapshot;
mod transform;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

pub use snapshot::{read_snapshot, write_snapshot};
pub use transform::{Spectrum, TransformPlan, Workspace};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Periodic,
    /// Homogeneous Neumann on a cell-centered grid.
    Neumann,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Periodic => "periodic",
            Self::Neumann => "neumann",
        })
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" => Ok(Self::Periodic),
            "neumann" | "homogeneous_neumann" => Ok(Self::Neumann),
            other => Err(Error::InvalidArgument(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// A uniform tensor-product grid on a box in 1, 2 or 3 dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    n: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    bc: BoundaryCondition,
}

impl Grid {
    pub fn new(n: &[usize], bounds: &[(f64, f64)], bc: BoundaryCondition) -> Result<Self> {
        if !(1..=3).contains(&n.len()) {
            return Err(Error::Grid(format!("dimension {} not in 1..=3", n.len())));
        }
        if bounds.len() != n.len() {
            return Err(Error::Grid(format!(
                "{} box intervals for a {}-dimensional grid",
                bounds.len(),
                n.len()
            )));
        }
        if let Some(&bad) = n.iter().find(|&&k| k < 2) {
            return Err(Error::Grid(format!("need at least 2 points per axis, got {bad}")));
        }
        for &(a, b) in bounds {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Grid(format!("invalid interval [{a}, {b}]")));
            }
        }
        Ok(Self {
            n: n.to_vec(),
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            bc,
        })
    }

    /// `n` points per axis on `[a, b]^dim`.
    pub fn cube(dim: usize, n: usize, interval: (f64, f64), bc: BoundaryCondition) -> Result<Self> {
        Self::new(&vec![n; dim], &vec![interval; dim], bc)
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.n
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        (self.lower[axis], self.upper[axis])
    }

    pub fn h(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / self.n[axis] as f64
    }

    /// `prod_d h_d`, the quadrature weight of one grid point.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|d| self.h(d)).product()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|d| self.upper[d] - self.lower[d]).product()
    }

    /// Coordinate of index `k` along `axis`: `a + k h` (periodic) or
    /// `a + (k + 1/2) h` (Neumann).
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        let offset = match self.bc {
            BoundaryCondition::Periodic => 0.0,
            BoundaryCondition::Neumann => 0.5,
        };
        self.lower[axis] + (k as f64 + offset) * self.h(axis)
    }

    /// Multi-index of a flat row-major position.
    pub fn unravel(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for d in (0..self.dim()).rev() {
            idx[d] = flat % self.n[d];
            flat /= self.n[d];
        }
        idx
    }

    /// Physical coordinates of a flat row-major position (unused axes are 0).
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unravel(flat);
        let mut x = [0.0; 3];
        for d in 0..self.dim() {
            x[d] = self.coordinate(d, idx[d]);
        }
        x
    }

    fn strides(&self) -> [usize; 3] {
        let mut s = [0; 3];
        let mut acc = 1;
        for d in (0..self.dim()).rev() {
            s[d] = acc;
            acc *= self.n[d];
        }
        s
    }
}

/// A real grid function stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Grid(format!(
                "field has {} values, grid has {} points",
                data.len(),
                grid.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at index {i}")));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Self {
        let data = vec![value; grid.len()];
        Self { grid, data }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let dim = grid.dim();
        let data = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)[..dim]))
            .collect();
        Self { grid, data }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid>, data: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), data.len());
        Self { grid, data }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        same_grid(&self.grid, &other.grid)
    }
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `max_i |u_i|`.
pub fn sup_norm(u: &Field) -> f64 {
    sup_norm_slice(u.as_slice())
}

pub(crate) fn sup_norm_slice(values: &[f64]) -> f64 {
    values.par_iter().map(|v| v.abs()).reduce(|| 0.0, f64::max)
}

/// Eigenvalues of the scaled central-difference Laplacian plus the
/// stabilization shift `kappa`.
#[derive(Clone, Debug)]
pub struct OperatorSymbol {
    grid: Arc<Grid>,
    diffusivity: f64,
    kappa: f64,
    lambda: Arc<Vec<f64>>,
    plan: Arc<TransformPlan>,
}

/// Central-difference Laplacian symbol with `kappa = 0`.
///
/// Periodic: `lambda_k = D sum_d (2 cos(2 pi k_d / n_d) - 2) / h_d^2`.
/// Neumann: `lambda_k = D sum_d (2 cos(pi k_d / n_d) - 2) / h_d^2`.
pub fn laplacian_symbol(grid: Arc<Grid>, diffusivity: f64) -> Result<OperatorSymbol> {
    if !(diffusivity > 0.0 && diffusivity.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "diffusivity must be positive, got {diffusivity}"
        )));
    }
    let per_axis: Vec<Vec<f64>> = (0..grid.dim())
        .map(|d| {
            let n = grid.shape()[d];
            let h2 = grid.h(d).powi(2);
            let period = match grid.bc() {
                BoundaryCondition::Periodic => 2.0 * PI / n as f64,
                BoundaryCondition::Neumann => PI / n as f64,
            };
            (0..n)
                .map(|k| diffusivity * (2.0 * (period * k as f64).cos() - 2.0) / h2)
                .collect()
        })
        .collect();
    let lambda: Vec<f64> = (0..grid.len())
        .map(|i| {
            let idx = grid.unravel(i);
            (0..grid.dim()).map(|d| per_axis[d][idx[d]]).sum()
        })
        .collect();
    let plan = TransformPlan::cached(grid.shape(), grid.bc());
    Ok(OperatorSymbol {
        grid,
        diffusivity,
        kappa: 0.0,
        lambda: Arc::new(lambda),
        plan,
    })
}

impl OperatorSymbol {
    /// Same symbol with stabilization constant `kappa`.
    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be >= 0, got {kappa}")));
        }
        self.kappa = kappa;
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Laplacian eigenvalues in transform-mode order (row-major).
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn plan(&self) -> &Arc<TransformPlan> {
        &self.plan
    }

    /// Multiplier `e^{t (lambda_k - kappa)}` for every mode.
    pub fn exp_multiplier(&self, t: f64) -> Vec<f64> {
        let kappa = self.kappa;
        self.lambda
            .par_iter()
            .map(|&l| (t * (l - kappa)).exp())
            .collect()
    }

    /// Applies an arbitrary real multiplier in transform space.
    pub fn apply_multiplier(&self, mult: &[f64], u: &Field) -> Result<Field> {
        self.check(u)?;
        let mut work = Workspace::new();
        let mut spec = Spectrum::zeros(self.grid.bc(), u.len());
        self.plan.forward(u.as_slice(), &mut spec, &mut work);
        spec.scale_by(mult);
        let mut out = vec![0.0; u.len()];
        self.plan.inverse(&mut spec, &mut out, &mut work);
        Ok(Field::from_parts_unchecked(self.grid.clone(), out))
    }

    fn check(&self, u: &Field) -> Result<()> {
        if same_grid(&self.grid, u.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `e^{t (L - kappa I)} u`, computed in transform space.
pub fn apply_exp(sym: &OperatorSymbol, t: f64, u: &Field) -> Result<Field> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    sym.check(u)?;
    if t == 0.0 {
        return Ok(u.clone());
    }
    sym.apply_multiplier(&sym.exp_multiplier(t), u)
}

/// `L u` by multiplication with the eigenvalues in transform space.
pub fn apply_laplacian_spectral(sym: &OperatorSymbol, u: &Field) -> Result<Field> {
    sym.apply_multiplier(sym.lambda(), u)
}

/// `L u` by the second-order central-difference stencil in physical space.
///
/// Periodic axes wrap around; Neumann axes mirror the boundary cell into
/// its ghost cell. The result is scaled by the diffusivity; `kappa` is not
/// applied.
pub fn apply_laplacian(sym: &OperatorSymbol, u: &Field) -> Result<Field> {
    sym.check(u)?;
    let grid = sym.grid.clone();
    let dim = grid.dim();
    let shape = grid.shape().to_vec();
    let strides = grid.strides();
    let inv_h2: Vec<f64> = (0..dim).map(|d| 1.0 / grid.h(d).powi(2)).collect();
    let periodic = grid.bc() == BoundaryCondition::Periodic;
    let src = u.as_slice();
    let d_coef = sym.diffusivity;
    let out: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let idx = grid.unravel(i);
            let center = src[i];
            let mut acc = 0.0;
            for d in 0..dim {
                let n = shape[d];
                let k = idx[d];
                let st = strides[d];
                let left = if k > 0 {
                    src[i - st]
                } else if periodic {
                    src[i + (n - 1) * st]
                } else {
                    center
                };
                let right = if k + 1 < n {
                    src[i + st]
                } else if periodic {
                    src[i - (n - 1) * st]
                } else {
                    center
                };
                acc += (left - 2.0 * center + right) * inv_h2[d];
            }
            d_coef * acc
        })
        .collect();
    Ok(Field::from_parts_unchecked(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, bc: BoundaryCondition, b: f64) -> Arc<Grid> {
        Arc::new(Grid::new(&[n], &[(0.0, b)], bc).unwrap())
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(&[1], &[(0.0, 1.0)], BoundaryCondition::Periodic).is_err());
        assert!(Grid::new(&[4, 4, 4, 4], &[(0.0, 1.0); 4], BoundaryCondition::Periodic).is_err());
        assert!(Grid::new(&[4], &[(1.0, 1.0)], BoundaryCondition::Periodic).is_err());
        assert!(Grid::new(&[4, 4], &[(0.0, 1.0)], BoundaryCondition::Periodic).is_err());
    }

    #[test]
    fn grid_points() {
        let g = Grid::cube(2, 4, (-0.5, 0.5), BoundaryCondition::Periodic).unwrap();
        assert_eq!(g.point(0), [-0.5, -0.5, 0.0]);
        assert_eq!(g.point(5), [-0.25, -0.25, 0.0]);
        let g = Grid::cube(2, 4, (-0.5, 0.5), BoundaryCondition::Neumann).unwrap();
        assert_eq!(g.point(0), [-0.375, -0.375, 0.0]);
        assert_eq!(g.cell_volume(), 1.0 / 16.0);
    }

    #[test]
    fn periodic_symbol_n4() {
        let sym = laplacian_symbol(grid1(4, BoundaryCondition::Periodic, 1.0), 1.0).unwrap();
        let expected = [0.0, -32.0, -64.0, -32.0];
        for (a, b) in sym.lambda().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn neumann_symbol_n2() {
        let sym = laplacian_symbol(grid1(2, BoundaryCondition::Neumann, 1.0), 1.0).unwrap();
        assert_eq!(sym.lambda()[0], 0.0);
        assert!((sym.lambda()[1] + 8.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_is_nonpositive_with_zero_constant_mode() {
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
            let g = Arc::new(Grid::new(&[5, 6, 3], &[(0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)], bc).unwrap());
            let sym = laplacian_symbol(g, 0.3).unwrap();
            assert_eq!(sym.lambda()[0], 0.0);
            assert!(sym.lambda().iter().all(|&l| l <= 0.0));
        }
    }

    #[test]
    fn hand_stencil() {
        let g = grid1(4, BoundaryCondition::Periodic, 1.0);
        let sym = laplacian_symbol(g.clone(), 1.0).unwrap();
        let u = Field::new(g, vec![1.0, 0.0, -1.0, 0.0]).unwrap();
        let lu = apply_laplacian(&sym, &u).unwrap();
        let expected = [-32.0, 0.0, 32.0, 0.0];
        for (a, b) in lu.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_behaviour() {
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
            let g = Arc::new(Grid::cube(2, 6, (0.0, 1.0), bc).unwrap());
            let sym = laplacian_symbol(g.clone(), 2.0).unwrap().with_kappa(3.0).unwrap();
            let u = Field::constant(g, 0.7);
            let lu = apply_laplacian(&sym, &u).unwrap();
            assert!(sup_norm(&lu) < 1e-10);
            let e = apply_exp(&sym, 0.4, &u).unwrap();
            let want = (-3.0f64 * 0.4).exp() * 0.7;
            assert!(e.as_slice().iter().all(|v| (v - want).abs() < 1e-14));
        }
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let g = grid1(8, BoundaryCondition::Periodic, 1.0);
        let sym = laplacian_symbol(g.clone(), 1.0).unwrap();
        let u = Field::from_fn(g, |x| (x[0] * 7.0).sin());
        assert_eq!(apply_exp(&sym, 0.0, &u).unwrap(), u);
        assert!(apply_exp(&sym, -1.0, &u).is_err());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g1 = grid1(8, BoundaryCondition::Periodic, 1.0);
        let g2 = grid1(8, BoundaryCondition::Periodic, 2.0);
        let sym = laplacian_symbol(g1, 1.0).unwrap();
        let u = Field::zeros(g2);
        assert!(matches!(apply_exp(&sym, 1.0, &u), Err(Error::GridMismatch)));
        assert!(matches!(apply_laplacian(&sym, &u), Err(Error::GridMismatch)));
    }

    #[test]
    fn sup_norm_values() {
        let g = grid1(2, BoundaryCondition::Periodic, 1.0);
        assert_eq!(sup_norm(&Field::zeros(g.clone())), 0.0);
        assert_eq!(sup_norm(&Field::new(g, vec![0.3, -0.9]).unwrap()), 0.9);
    }

    #[test]
    fn field_rejects_bad_data() {
        let g = grid1(2, BoundaryCondition::Periodic, 1.0);
        assert!(Field::new(g.clone(), vec![1.0]).is_err());
        assert!(Field::new(g, vec![1.0, f64::NAN]).is_err());
    }
}
