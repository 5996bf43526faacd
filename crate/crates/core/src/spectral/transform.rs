//! Multi-dimensional trigonometric transforms on row-major grids.
//!
//! Periodic grids use the complex DFT along every axis; cell-centered
//! Neumann grids use the DCT-II (forward) / DCT-III (inverse) pair. Plans
//! are built once per `(n, bc)` and shared through a process-wide cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use super::BoundaryCondition;

/// Transform-space coefficients of a real field.
#[derive(Clone, Debug, PartialEq)]
pub enum Spectrum {
    Fourier(Vec<Complex64>),
    Cosine(Vec<f64>),
}

impl Spectrum {
    pub fn zeros(bc: BoundaryCondition, len: usize) -> Self {
        match bc {
            BoundaryCondition::Periodic => Spectrum::Fourier(vec![Complex64::new(0.0, 0.0); len]),
            BoundaryCondition::Neumann => Spectrum::Cosine(vec![0.0; len]),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Spectrum::Fourier(v) => v.len(),
            Spectrum::Cosine(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `self[k] = weight * mult[k] * other[k]`.
    pub fn assign_scaled(&mut self, weight: f64, mult: &[f64], other: &Spectrum) {
        match (self, other) {
            (Spectrum::Fourier(d), Spectrum::Fourier(o)) => d
                .par_iter_mut()
                .zip(o.par_iter())
                .zip(mult.par_iter())
                .for_each(|((d, o), m)| *d = *o * (weight * m)),
            (Spectrum::Cosine(d), Spectrum::Cosine(o)) => d
                .par_iter_mut()
                .zip(o.par_iter())
                .zip(mult.par_iter())
                .for_each(|((d, o), m)| *d = *o * (weight * m)),
            _ => panic!("spectrum kinds differ"),
        }
    }

    /// `self[k] += weight * mult[k] * other[k]`.
    pub fn add_scaled(&mut self, weight: f64, mult: &[f64], other: &Spectrum) {
        match (self, other) {
            (Spectrum::Fourier(d), Spectrum::Fourier(o)) => d
                .par_iter_mut()
                .zip(o.par_iter())
                .zip(mult.par_iter())
                .for_each(|((d, o), m)| *d += *o * (weight * m)),
            (Spectrum::Cosine(d), Spectrum::Cosine(o)) => d
                .par_iter_mut()
                .zip(o.par_iter())
                .zip(mult.par_iter())
                .for_each(|((d, o), m)| *d += *o * (weight * m)),
            _ => panic!("spectrum kinds differ"),
        }
    }

    /// `self[k] *= mult[k]`.
    pub fn scale_by(&mut self, mult: &[f64]) {
        match self {
            Spectrum::Fourier(d) => d
                .par_iter_mut()
                .zip(mult.par_iter())
                .for_each(|(d, m)| *d *= *m),
            Spectrum::Cosine(d) => d
                .par_iter_mut()
                .zip(mult.par_iter())
                .for_each(|(d, m)| *d *= *m),
        }
    }
}

/// Precomputed 1D transforms for every axis of a grid shape.
pub struct TransformPlan {
    shape: Vec<usize>,
    kind: PlanKind,
}

enum PlanKind {
    Fourier {
        forward: Vec<Arc<dyn Fft<f64>>>,
        inverse: Vec<Arc<dyn Fft<f64>>>,
    },
    Cosine {
        dct: Vec<Arc<dyn TransformType2And3<f64>>>,
    },
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan")
            .field("shape", &self.shape)
            .field("bc", &self.bc())
            .finish()
    }
}

type CacheKey = (Vec<usize>, BoundaryCondition);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<TransformPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<TransformPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl TransformPlan {
    /// Returns the cached plan for `(shape, bc)`, building it on first use.
    pub fn cached(shape: &[usize], bc: BoundaryCondition) -> Arc<TransformPlan> {
        let key = (shape.to_vec(), bc);
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key)
            .or_insert_with(|| Arc::new(TransformPlan::new(shape, bc)))
            .clone()
    }

    fn new(shape: &[usize], bc: BoundaryCondition) -> Self {
        let kind = match bc {
            BoundaryCondition::Periodic => {
                let mut planner = FftPlanner::new();
                PlanKind::Fourier {
                    forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
                    inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
                }
            }
            BoundaryCondition::Neumann => {
                let mut planner = DctPlanner::new();
                PlanKind::Cosine {
                    dct: shape.iter().map(|&n| planner.plan_dct2(n)).collect(),
                }
            }
        };
        Self {
            shape: shape.to_vec(),
            kind,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bc(&self) -> BoundaryCondition {
        match self.kind {
            PlanKind::Fourier { .. } => BoundaryCondition::Periodic,
            PlanKind::Cosine { .. } => BoundaryCondition::Neumann,
        }
    }

    /// Forward transform of `input` into `out` (unnormalized).
    pub fn forward(&self, input: &[f64], out: &mut Spectrum, work: &mut Workspace) {
        assert_eq!(input.len(), self.len());
        match (&self.kind, out) {
            (PlanKind::Fourier { forward, .. }, Spectrum::Fourier(buf)) => {
                buf.par_iter_mut()
                    .zip(input.par_iter())
                    .for_each(|(b, &x)| *b = Complex64::new(x, 0.0));
                for (axis, fft) in forward.iter().enumerate() {
                    let scratch_len = fft.get_inplace_scratch_len();
                    transform_axis(buf, &self.shape, axis, &mut work.complex, scratch_len, |line, scr| {
                        fft.process_with_scratch(line, scr)
                    });
                }
            }
            (PlanKind::Cosine { dct }, Spectrum::Cosine(buf)) => {
                buf.copy_from_slice(input);
                for (axis, plan) in dct.iter().enumerate() {
                    let scratch_len = plan.get_scratch_len();
                    transform_axis(buf, &self.shape, axis, &mut work.real, scratch_len, |line, scr| {
                        plan.process_dct2_with_scratch(line, scr)
                    });
                }
            }
            _ => panic!("spectrum kind does not match transform plan"),
        }
    }

    /// Normalized inverse transform; `spec` is used as scratch and left unspecified.
    pub fn inverse(&self, spec: &mut Spectrum, out: &mut [f64], work: &mut Workspace) {
        assert_eq!(out.len(), self.len());
        match (&self.kind, spec) {
            (PlanKind::Fourier { inverse, .. }, Spectrum::Fourier(buf)) => {
                for (axis, fft) in inverse.iter().enumerate() {
                    let scratch_len = fft.get_inplace_scratch_len();
                    transform_axis(buf, &self.shape, axis, &mut work.complex, scratch_len, |line, scr| {
                        fft.process_with_scratch(line, scr)
                    });
                }
                let scale = 1.0 / self.len() as f64;
                out.par_iter_mut()
                    .zip(buf.par_iter())
                    .for_each(|(o, b)| *o = b.re * scale);
            }
            (PlanKind::Cosine { dct }, Spectrum::Cosine(buf)) => {
                for (axis, plan) in dct.iter().enumerate() {
                    let scratch_len = plan.get_scratch_len();
                    transform_axis(buf, &self.shape, axis, &mut work.real, scratch_len, |line, scr| {
                        plan.process_dct3_with_scratch(line, scr)
                    });
                }
                let scale: f64 = self.shape.iter().map(|&n| 2.0 / n as f64).product();
                out.par_iter_mut()
                    .zip(buf.par_iter())
                    .for_each(|(o, b)| *o = b * scale);
            }
            _ => panic!("spectrum kind does not match transform plan"),
        }
    }
}

/// Reusable transposition buffers for [`TransformPlan`].
#[derive(Default, Debug)]
pub struct Workspace {
    complex: Vec<Complex64>,
    real: Vec<f64>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }
}

const LINES_PER_TASK: usize = 16;
const TILE: usize = 16;

fn apply_lines<T, F>(data: &mut [T], n: usize, scratch_len: usize, f: &F)
where
    T: Copy + Default + Send + Sync,
    F: Fn(&mut [T], &mut [T]) + Sync,
{
    data.par_chunks_mut(n * LINES_PER_TASK).for_each_init(
        || vec![T::default(); scratch_len],
        |scratch, chunk| {
            for line in chunk.chunks_exact_mut(n) {
                f(line, scratch);
            }
        },
    );
}

/// Applies `f` to every 1D line of `data` along `axis`.
///
/// Non-contiguous axes are transposed into `transposed` so every line is
/// contiguous, transformed, and copied back.
fn transform_axis<T, F>(
    data: &mut [T],
    shape: &[usize],
    axis: usize,
    transposed: &mut Vec<T>,
    scratch_len: usize,
    f: F,
) where
    T: Copy + Default + Send + Sync,
    F: Fn(&mut [T], &mut [T]) + Sync,
{
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    if inner == 1 {
        apply_lines(data, n, scratch_len, &f);
        return;
    }
    let block = n * inner;
    transposed.resize(data.len(), T::default());

    // transposed[o][k][a] = data[o][a][k]
    transposed
        .par_chunks_mut(block)
        .zip(data.par_chunks(block))
        .for_each(|(t, d)| transpose(d, t, n, inner));
    apply_lines(transposed, n, scratch_len, &f);
    data.par_chunks_mut(block)
        .zip(transposed.par_chunks(block))
        .for_each(|(d, t)| transpose(t, d, inner, n));
}

/// Writes the `cols x rows` transpose of the row-major `rows x cols` matrix `src`.
fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    for r0 in (0..rows).step_by(TILE) {
        let r1 = (r0 + TILE).min(rows);
        for c0 in (0..cols).step_by(TILE) {
            let c1 = (c0 + TILE).min(cols);
            for r in r0..r1 {
                for c in c0..c1 {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
