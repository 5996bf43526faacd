//! Pointwise reaction terms `f_0`, their bounds and the stabilized map
//! `N_0(xi) = kappa xi + f_0(xi)`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::Field;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of samples used to bound `|f_0'|` for user-supplied terms.
const KAPPA_SAMPLES: usize = 1_000_000;
/// Inflation applied to sampled `kappa` bounds.
const KAPPA_SAFETY: f64 = 1.01;

#[derive(Clone)]
enum Kind {
    /// `(u - u^3) / scale`
    Cubic { scale: f64 },
    /// `theta/2 ln((1-u)/(1+u)) + theta_c u`
    FloryHuggins { theta: f64, theta_c: f64 },
    Custom {
        f0: ScalarFn,
        f0_prime: ScalarFn,
        potential: ScalarFn,
    },
}

/// A reaction term together with its bound `gamma` and the smallest
/// admissible stabilization constant.
#[derive(Clone)]
pub struct NonlinearSpec {
    name: String,
    kind: Kind,
    gamma: f64,
    kappa_min: f64,
    clamp: bool,
}

impl fmt::Debug for NonlinearSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearSpec")
            .field("name", &self.name)
            .field("gamma", &self.gamma)
            .field("kappa_min", &self.kappa_min)
            .field("clamp", &self.clamp)
            .finish()
    }
}

/// `f_0(u) = (u - u^3) / scale`, `gamma = 1`, `kappa_min = 2 / scale`.
///
/// The potential is normalized as `F(u) = (1 - u^2)^2 / (4 scale)`. Pass
/// `scale = 1` for the unscaled double well and `scale = eps^2` for the
/// sharp-interface scaling.
pub fn cubic(scale: f64) -> Result<NonlinearSpec> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Nonlinearity(format!("cubic scale must be positive, got {scale}")));
    }
    Ok(NonlinearSpec {
        name: if scale == 1.0 {
            "cubic".into()
        } else {
            format!("cubic/{scale}")
        },
        kind: Kind::Cubic { scale },
        gamma: 1.0,
        kappa_min: 2.0 / scale,
        clamp: false,
    })
}

/// Logarithmic Flory-Huggins term
/// `f_0(u) = theta/2 ln((1-u)/(1+u)) + theta_c u` on `(-1, 1)`.
///
/// `gamma` is the positive root of `f_0`, found by bisection to `1e-12`;
/// `kappa_min = |theta_c - theta/(1 - gamma^2)|` is attained at `+-gamma`.
/// Arguments are clamped to `[-gamma, gamma]` before evaluation.
pub fn flory_huggins(theta: f64, theta_c: f64) -> Result<NonlinearSpec> {
    if !(theta > 0.0 && theta_c > 0.0 && theta.is_finite() && theta_c.is_finite()) {
        return Err(Error::Nonlinearity(format!(
            "theta and theta_c must be positive, got {theta}, {theta_c}"
        )));
    }
    if theta >= theta_c {
        return Err(Error::Nonlinearity(format!(
            "need theta < theta_c for an interior root, got {theta} >= {theta_c}"
        )));
    }
    let f0 = |u: f64| 0.5 * theta * ((1.0 - u) / (1.0 + u)).ln() + theta_c * u;
    let mut lo = 1e-8;
    let mut hi = 1.0 - 1e-12;
    if !(f0(lo) > 0.0 && f0(hi) < 0.0) {
        return Err(Error::Nonlinearity(format!(
            "f_0 has no sign change on (0, 1) for theta = {theta}, theta_c = {theta_c}"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = hi;
    let at_gamma = (theta_c - theta / (1.0 - gamma * gamma)).abs();
    let at_zero = (theta_c - theta).abs();
    Ok(NonlinearSpec {
        name: format!("flory_huggins({theta},{theta_c})"),
        kind: Kind::FloryHuggins { theta, theta_c },
        gamma,
        kappa_min: at_gamma.max(at_zero),
        clamp: true,
    })
}

/// A user-supplied reaction term.
///
/// `kappa_min` is estimated by sampling `|f_0'|` at a million points of
/// `[-gamma, gamma]` and inflating the maximum by 1%.
pub fn custom(
    name: impl Into<String>,
    gamma: f64,
    f0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    f0_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    potential: impl Fn(f64) -> f64 + Send + Sync + 'static,
    clamp: bool,
) -> Result<NonlinearSpec> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Nonlinearity(format!("gamma must be positive, got {gamma}")));
    }
    if !(f0(gamma) <= 0.0 && f0(-gamma) >= 0.0) {
        return Err(Error::Nonlinearity(
            "need f_0(gamma) <= 0 <= f_0(-gamma)".into(),
        ));
    }
    let step = 2.0 * gamma / (KAPPA_SAMPLES - 1) as f64;
    let max_slope = (0..KAPPA_SAMPLES)
        .into_par_iter()
        .map(|k| f0_prime(-gamma + k as f64 * step).abs())
        .reduce(|| 0.0, f64::max);
    Ok(NonlinearSpec {
        name: name.into(),
        kind: Kind::Custom {
            f0: Arc::new(f0),
            f0_prime: Arc::new(f0_prime),
            potential: Arc::new(potential),
        },
        gamma,
        kappa_min: KAPPA_SAFETY * max_slope,
        clamp,
    })
}

impl NonlinearSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Bound `gamma` of the maximum bound principle.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `max_{|xi| <= gamma} |f_0'(xi)|`.
    pub fn kappa_min(&self) -> f64 {
        self.kappa_min
    }

    /// Whether arguments are clamped to `[-gamma, gamma]` before evaluation.
    pub fn clamps(&self) -> bool {
        self.clamp
    }

    #[inline]
    fn prepare(&self, u: f64) -> f64 {
        if self.clamp {
            u.clamp(-self.gamma, self.gamma)
        } else {
            u
        }
    }

    #[inline]
    pub fn f0(&self, u: f64) -> f64 {
        let u = self.prepare(u);
        match &self.kind {
            Kind::Cubic { scale } => (u - u * u * u) / scale,
            Kind::FloryHuggins { theta, theta_c } => {
                0.5 * theta * ((1.0 - u) / (1.0 + u)).ln() + theta_c * u
            }
            Kind::Custom { f0, .. } => f0(u),
        }
    }

    pub fn f0_prime(&self, u: f64) -> f64 {
        let u = self.prepare(u);
        match &self.kind {
            Kind::Cubic { scale } => (1.0 - 3.0 * u * u) / scale,
            Kind::FloryHuggins { theta, theta_c } => theta_c - theta / (1.0 - u * u),
            Kind::Custom { f0_prime, .. } => f0_prime(u),
        }
    }

    /// Potential `F` with `F' = -f_0`.
    pub fn potential(&self, u: f64) -> f64 {
        let u = self.prepare(u);
        match &self.kind {
            Kind::Cubic { scale } => {
                let w = 1.0 - u * u;
                w * w / (4.0 * scale)
            }
            Kind::FloryHuggins { theta, theta_c } => {
                0.5 * theta * ((1.0 - u) * (1.0 - u).ln() + (1.0 + u) * (1.0 + u).ln())
                    - 0.5 * theta_c * u * u
            }
            Kind::Custom { potential, .. } => potential(u),
        }
    }
}

/// `N_0(xi) = kappa xi + f_0(xi)` with `kappa >= kappa_min`.
#[derive(Clone, Debug)]
pub struct StabilizedNonlinearity {
    spec: NonlinearSpec,
    kappa: f64,
}

impl StabilizedNonlinearity {
    pub fn new(spec: NonlinearSpec, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= spec.kappa_min) {
            return Err(Error::Nonlinearity(format!(
                "kappa = {kappa} is below the minimum {} for {}",
                spec.kappa_min, spec.name
            )));
        }
        Ok(Self { spec, kappa })
    }

    /// Uses `kappa = kappa_min`.
    pub fn with_minimal_kappa(spec: NonlinearSpec) -> Self {
        let kappa = spec.kappa_min;
        Self { spec, kappa }
    }

    pub fn spec(&self) -> &NonlinearSpec {
        &self.spec
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.spec.gamma
    }

    #[inline]
    pub fn n0(&self, xi: f64) -> f64 {
        let xi = self.spec.prepare(xi);
        self.kappa * xi + self.spec.f0(xi)
    }

    /// Pointwise `N_0` of a field.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        let mut out = vec![0.0; u.len()];
        self.apply_into(u.as_slice(), &mut out)?;
        Ok(Field::from_parts_unchecked(u.grid().clone(), out))
    }

    /// Pointwise `N_0` from `src` into `dst`.
    pub fn apply_into(&self, src: &[f64], dst: &mut [f64]) -> Result<()> {
        if let Some(i) = src.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at index {i}")));
        }
        dst.par_iter_mut()
            .zip(src.par_iter())
            .for_each(|(d, &s)| *d = self.n0(s));
        Ok(())
    }
}
