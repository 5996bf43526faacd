//! Dense reference implementations used as oracles. Nothing here calls
//! into the transform code.

#![allow(dead_code)]

use sifrk::rng::SplitMix64;
use sifrk::spectral::BoundaryCondition;

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i * self.n + j] * v[j]).sum())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Dense) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    /// Infinity norm (max row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Second-difference matrix of one axis with `n` points and spacing `h`.
/// Neumann grids are cell centered, so the ghost value equals the
/// boundary value.
fn second_difference(n: usize, h: f64, bc: BoundaryCondition) -> Dense {
    let mut d = Dense::zeros(n);
    let w = 1.0 / (h * h);
    for i in 0..n {
        let (left, right) = match bc {
            BoundaryCondition::Periodic => (Some((i + n - 1) % n), Some((i + 1) % n)),
            BoundaryCondition::Neumann => (i.checked_sub(1), (i + 1 < n).then_some(i + 1)),
        };
        for nb in [left, right].into_iter().flatten() {
            d.a[i * n + nb] += w;
            d.a[i * n + i] -= w;
        }
    }
    d
}

/// `diffusivity * Laplacian - kappa I` on a row-major grid with the last
/// axis fastest.
pub fn dense_operator(shape: &[usize], h: &[f64], bc: BoundaryCondition, diffusivity: f64, kappa: f64) -> Dense {
    let total: usize = shape.iter().product();
    let mut out = Dense::zeros(total);
    let mut stride = 1;
    for axis in (0..shape.len()).rev() {
        let d1 = second_difference(shape[axis], h[axis], bc);
        let n = shape[axis];
        for p in 0..total {
            let k = (p / stride) % n;
            let base = p - k * stride;
            for m in 0..n {
                let v = d1.at(k, m);
                if v != 0.0 {
                    out.a[p * total + base + m * stride] += diffusivity * v;
                }
            }
        }
        stride *= n;
    }
    for i in 0..total {
        out.a[i * total + i] -= kappa;
    }
    out
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &Dense) -> Dense {
    let norm = m.norm_inf();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m.scaled(scale);
    let mut sum = Dense::identity(m.n);
    let mut term = Dense::identity(m.n);
    for k in 1..=20 {
        term = term.mul(&a).scaled(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

pub fn random_vec(rng: &mut SplitMix64, n: usize, low: f64, high: f64) -> Vec<f64> {
    (0..n).map(|_| rng.uniform(low, high)).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
