//! Run configuration files.
//!
//! ```text
//! # comments start with '#'
//! [problem]
//! potential = cubic          # cubic | cubic_scaled | flory_huggins
//! epsilon = 0.01
//! kappa = auto               # or a number
//! initial = random           # random | bubble | traveling_wave
//! low = -0.9
//! high = 0.9
//! seed = 7
//!
//! [scheme]
//! name = sifrk22             # built-in key or tableau file
//! tau = 0.01
//! T = 10
//!
//! [grid]
//! dim = 2
//! n = 256
//! bc = periodic              # periodic | neumann
//! box = -0.5 0.5
//!
//! [output]
//! dir = out
//! stride = 10
//! snapshots = 1, 5, 10
//! ```
//!
//! `cubic` is `eps^2 Lap u + u - u^3`; `cubic_scaled` is
//! `Lap u + (u - u^3)/eps^2`; `flory_huggins` uses `eps^2 Lap u`. An
//! explicit `diffusivity` overrides the coefficient of `Lap u`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::benchmarks::{InitialCondition, KappaPolicy, ProblemDef, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::nonlinearity::{cubic, flory_huggins};
use crate::spectral::{BoundaryCondition, Grid};
use crate::tableau::{resolve_scheme, SchemeTableau};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    Cubic,
    CubicScaled,
    FloryHuggins,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialKind {
    Random { low: f64, high: f64 },
    Bubble { radius: f64 },
    TravelingWave,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub potential: Potential,
    pub epsilon: f64,
    pub theta: f64,
    pub theta_c: f64,
    pub kappa: KappaPolicy,
    pub diffusivity: Option<f64>,
    pub initial: InitialKind,
    pub seed: u64,
    pub scheme: String,
    pub tau: f64,
    pub t_final: f64,
    pub dim: usize,
    pub n: Vec<usize>,
    pub bc: BoundaryCondition,
    pub bounds: (f64, f64),
    pub out_dir: PathBuf,
    pub stride: usize,
    pub snapshots: Vec<f64>,
}

const KEYS: &[(&str, &[&str])] = &[
    (
        "problem",
        &["potential", "epsilon", "theta", "theta_c", "kappa", "diffusivity", "initial", "low", "high", "radius", "seed"],
    ),
    ("scheme", &["name", "tau", "T"]),
    ("grid", &["dim", "n", "bc", "box"]),
    ("output", &["dir", "stride", "snapshots"]),
];

struct Entry {
    value: String,
    line: usize,
}

struct Raw<'a> {
    origin: &'a Path,
    entries: HashMap<String, Entry>,
}

impl Raw<'_> {
    fn err(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.origin.to_path_buf(),
            line,
            message,
        }
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| self.err(e.line, format!("`{key}`: cannot parse `{}`", e.value))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| self.err(0, format!("missing required key `{key}`")))
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = match default {
            Some(d) => self.parse(key)?.unwrap_or(d),
            None => self.require(key)?,
        };
        if !(v > 0.0 && f64::is_finite(v)) {
            let line = self.get(key).map_or(0, |e| e.line);
            return Err(self.err(line, format!("`{key}` must be positive, got {v}")));
        }
        Ok(v)
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map_or(0, |e| e.line)
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

impl SimulationConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut raw = Raw {
            origin,
            entries: HashMap::new(),
        };
        let mut section: Option<&str> = None;
        for (idx, full) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = full.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                section = Some(
                    KEYS.iter()
                        .find(|(s, _)| *s == name)
                        .map(|(s, _)| *s)
                        .ok_or_else(|| raw.err(line_no, format!("unknown section `[{name}]`")))?,
                );
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| raw.err(line_no, format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let sec = section.ok_or_else(|| raw.err(line_no, format!("key `{key}` outside a section")))?;
            let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(raw.err(line_no, format!("unknown key `{key}` in [{sec}]")));
            }
            let entry = Entry {
                value: value.trim().to_string(),
                line: line_no,
            };
            if let Some(prev) = raw.entries.insert(key.to_string(), entry) {
                return Err(raw.err(line_no, format!("duplicate key `{key}` (first set on line {})", prev.line)));
            }
        }
        Self::from_raw(&raw)
    }

    fn from_raw(raw: &Raw) -> Result<Self> {
        let potential = match raw.require::<String>("potential")?.as_str() {
            "cubic" => Potential::Cubic,
            "cubic_scaled" => Potential::CubicScaled,
            "flory_huggins" => Potential::FloryHuggins,
            other => {
                return Err(raw.err(
                    raw.line("potential"),
                    format!("`potential`: expected cubic, cubic_scaled or flory_huggins, got `{other}`"),
                ))
            }
        };
        let epsilon = raw.positive("epsilon", None)?;
        let (theta, theta_c) = if potential == Potential::FloryHuggins {
            (raw.positive("theta", None)?, raw.positive("theta_c", None)?)
        } else {
            for key in ["theta", "theta_c"] {
                if raw.get(key).is_some() {
                    return Err(raw.err(raw.line(key), format!("`{key}` only applies to flory_huggins")));
                }
            }
            (0.0, 0.0)
        };
        let kappa = match raw.get("kappa") {
            None => KappaPolicy::Auto,
            Some(e) if e.value == "auto" => KappaPolicy::Auto,
            Some(_) => KappaPolicy::Fixed(raw.positive("kappa", None)?),
        };
        let diffusivity = match raw.get("diffusivity") {
            None => None,
            Some(_) => Some(raw.positive("diffusivity", None)?),
        };
        let initial = match raw.require::<String>("initial")?.as_str() {
            "random" => {
                let low: f64 = raw.parse("low")?.unwrap_or(-0.9);
                let high: f64 = raw.parse("high")?.unwrap_or(0.9);
                if !(low < high) {
                    return Err(raw.err(raw.line("high"), format!("need low < high, got [{low}, {high}]")));
                }
                InitialKind::Random { low, high }
            }
            "bubble" => InitialKind::Bubble {
                radius: raw.positive("radius", Some(0.25))?,
            },
            "traveling_wave" => InitialKind::TravelingWave,
            other => {
                return Err(raw.err(
                    raw.line("initial"),
                    format!("`initial`: expected random, bubble or traveling_wave, got `{other}`"),
                ))
            }
        };
        let seed = raw.parse("seed")?.unwrap_or(DEFAULT_SEED);
        let scheme: String = raw.require("name")?;
        let tau = raw.positive("tau", None)?;
        let t_final: f64 = raw.require("T")?;
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(raw.err(raw.line("T"), format!("`T` must be >= 0, got {t_final}")));
        }
        let dim: usize = raw.require("dim")?;
        if !(1..=3).contains(&dim) {
            return Err(raw.err(raw.line("dim"), format!("`dim` must be 1, 2 or 3, got {dim}")));
        }
        let n_line = raw.line("n");
        let n: Vec<usize> = raw
            .require::<String>("n")?
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| raw.err(n_line, format!("`n`: cannot parse `{t}`"))))
            .collect::<Result<_>>()?;
        let n = match n.len() {
            1 => vec![n[0]; dim],
            k if k == dim => n,
            k => return Err(raw.err(n_line, format!("`n` has {k} entries for dim = {dim}"))),
        };
        let bc: BoundaryCondition = raw
            .require::<String>("bc")?
            .parse()
            .map_err(|e: Error| raw.err(raw.line("bc"), e.to_string()))?;
        let bounds = match raw.get("box") {
            None => (-0.5, 0.5),
            Some(e) => match parse_list(&e.value).as_deref() {
                Ok([a, b]) if a < b => (*a, *b),
                _ => return Err(raw.err(e.line, format!("`box` must be two increasing numbers, got `{}`", e.value))),
            },
        };
        let out_dir = raw.get("dir").map_or_else(|| PathBuf::from("out"), |e| PathBuf::from(&e.value));
        let stride: usize = raw.parse("stride")?.unwrap_or(1);
        if stride == 0 {
            return Err(raw.err(raw.line("stride"), "`stride` must be at least 1".into()));
        }
        let snapshots = match raw.get("snapshots") {
            None => Vec::new(),
            Some(e) => parse_snapshot_times(&e.value).map_err(|m| raw.err(e.line, m))?,
        };
        let cfg = Self {
            potential,
            epsilon,
            theta,
            theta_c,
            kappa,
            diffusivity,
            initial,
            seed,
            scheme,
            tau,
            t_final,
            dim,
            n,
            bc,
            bounds,
            out_dir,
            stride,
            snapshots,
        };
        cfg.problem()?;
        Ok(cfg)
    }

    /// Coefficient of the Laplacian.
    pub fn diffusivity(&self) -> f64 {
        self.diffusivity.unwrap_or(match self.potential {
            Potential::CubicScaled => 1.0,
            Potential::Cubic | Potential::FloryHuggins => self.epsilon * self.epsilon,
        })
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::new(&self.n, &vec![self.bounds; self.dim], self.bc)?))
    }

    pub fn problem(&self) -> Result<ProblemDef> {
        let grid = self.grid()?;
        let spec = match self.potential {
            Potential::Cubic => cubic(1.0)?,
            Potential::CubicScaled => cubic(self.epsilon * self.epsilon)?,
            Potential::FloryHuggins => flory_huggins(self.theta, self.theta_c)?,
        };
        let initial = match self.initial {
            InitialKind::Random { low, high } => InitialCondition::Random {
                low,
                high,
                seed: self.seed,
            },
            InitialKind::Bubble { radius } => {
                if self.dim != 2 {
                    return Err(Error::InvalidArgument("the bubble needs dim = 2".into()));
                }
                InitialCondition::Bubble { radius }
            }
            InitialKind::TravelingWave => InitialCondition::TravelingWave { eps: self.epsilon },
        };
        let p = ProblemDef {
            grid,
            diffusivity: self.diffusivity(),
            spec,
            kappa: self.kappa,
            initial,
        };
        p.nonlinearity()?;
        Ok(p)
    }

    pub fn scheme(&self) -> Result<SchemeTableau> {
        resolve_scheme(&self.scheme)
    }
}

/// Parses `t1,t2,...` into nonnegative times.
pub fn parse_snapshot_times(s: &str) -> std::result::Result<Vec<f64>, String> {
    let times = parse_list(s).map_err(|_| format!("`snapshots`: cannot parse `{s}`"))?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(format!("`snapshots`: times must be >= 0, got `{s}`"));
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[problem]
potential = cubic
epsilon = 0.01
initial = random
seed = 3

[scheme]
name = sifrk22
tau = 0.1
T = 1

[grid]
dim = 2
n = 16
bc = periodic
";

    fn parse(text: &str) -> Result<SimulationConfig> {
        SimulationConfig::parse(text, Path::new("test.cfg"))
    }

    #[test]
    fn minimal_config() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.potential, Potential::Cubic);
        assert_eq!(c.n, vec![16, 16]);
        assert_eq!(c.kappa, KappaPolicy::Auto);
        assert_eq!(c.seed, 3);
        assert_eq!(c.bounds, (-0.5, 0.5));
        assert!((c.diffusivity() - 1e-4).abs() < 1e-20);
        assert_eq!(c.problem().unwrap().kappa(), 2.0);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let text = MINIMAL.replace("seed = 3", "sede = 3");
        match parse(&text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 5);
                assert!(message.contains("sede"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(parse(&MINIMAL.replace("tau = 0.1", "tau = -1")).is_err());
        assert!(parse(&MINIMAL.replace("bc = periodic", "bc = dirichlet")).is_err());
        assert!(parse(&MINIMAL.replace("[grid]", "[grids]")).is_err());
        assert!(parse(&MINIMAL.replace("potential = cubic", "potential = quartic")).is_err());
        assert!(parse(&MINIMAL.replace("n = 16", "n = 16 16 16")).is_err());
        assert!(parse(&format!("{MINIMAL}\n[output]\nstride = 0\n")).is_err());
        assert!(parse(&MINIMAL.replace("T = 1", "")).is_err());
        // kappa below the admissible minimum
        assert!(parse(&MINIMAL.replace("seed = 3", "seed = 3\nkappa = 1.0")).is_err());
    }

    #[test]
    fn flory_huggins_with_pinned_kappa() {
        let text = MINIMAL.replace(
            "potential = cubic",
            "potential = flory_huggins\ntheta = 0.8\ntheta_c = 1.6\nkappa = 8.02",
        );
        let c = parse(&text).unwrap();
        assert_eq!(c.kappa, KappaPolicy::Fixed(8.02));
        assert!((c.problem().unwrap().spec.gamma() - 0.9575).abs() < 1e-4);
    }

    #[test]
    fn snapshot_list() {
        assert_eq!(parse_snapshot_times("1, 2.5,10").unwrap(), vec![1.0, 2.5, 10.0]);
        assert!(parse_snapshot_times("1,-2").is_err());
    }
}
