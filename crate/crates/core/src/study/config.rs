//! Study configuration: a flat `key = value` text format with `#` comments.
//!
//! ```text
//! # table configuration
//! element_type = tri
//! N = 10, 20, 40, 80
//! k = 10
//! beta_minus = 1
//! beta_plus = 10
//! alpha = 1.5
//! r0 = 0.5
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use crate::assembly::QuadratureOrders;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linear_solver::{SolverConfig, SolverMethod};
use crate::mesh::{Domain, ElementType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Radial `r^alpha` solution around a circular interface.
    RadialAlpha,
    /// `(2+i) sin(pi x) sin(pi y)`; requires equal coefficients.
    Sine,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial_alpha" | "radial" => Ok(ProblemKind::RadialAlpha),
            "sine" => Ok(ProblemKind::Sine),
            _ => Err(Error::InvalidArgument(format!("unknown problem `{s}`"))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProblemKind::RadialAlpha => "radial_alpha",
            ProblemKind::Sine => "sine",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub domain: Domain,
    pub element_type: ElementType,
    pub n_list: Vec<usize>,
    pub k: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// `None` selects `30 max(beta-, beta+)`.
    pub sigma0: Option<f64>,
    pub problem: ProblemKind,
    pub alpha: f64,
    /// Interface circle.
    pub r0: f64,
    pub center: Point,
    pub orders: QuadratureOrders,
    pub norm_depth: usize,
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
    pub dump_matrix: Option<PathBuf>,
}

/// Interface radius of the reference setup, `pi / 6.28` (not `pi / tau`).
#[allow(clippy::approx_constant)]
pub const REFERENCE_R0: f64 = std::f64::consts::PI / 6.28;

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            domain: Domain::symmetric_unit(),
            element_type: ElementType::Triangle,
            n_list: vec![10, 20, 40, 80, 160],
            k: 10.0,
            beta_minus: 1.0,
            beta_plus: 10.0,
            sigma0: None,
            problem: ProblemKind::RadialAlpha,
            alpha: 1.5,
            r0: REFERENCE_R0,
            center: Point::new(0.0, 0.0),
            orders: QuadratureOrders::default(),
            norm_depth: 4,
            solver: SolverConfig::default(),
            output: None,
            dump_matrix: None,
        }
    }
}

/// Parse a comma- or whitespace-separated list of mesh sizes.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let list = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad mesh size `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    check_n_list(&list)?;
    Ok(list)
}

/// Non-empty, positive, each entry double the previous.
pub fn check_n_list(list: &[usize]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::InvalidArgument("empty mesh size list".into()));
    }
    if list[0] == 0 {
        return Err(Error::InvalidArgument("mesh sizes must be positive".into()));
    }
    for w in list.windows(2) {
        if w[0].checked_mul(2) != Some(w[1]) {
            return Err(Error::InvalidArgument(format!("mesh sizes {} -> {} do not double", w[0], w[1])));
        }
    }
    Ok(())
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("`{key}` expects a number, got `{v}`")))
}

fn integer(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("`{key}` expects an integer, got `{v}`")))
}

fn numbers(key: &str, v: &str, n: usize) -> Result<Vec<f64>> {
    let xs = v.split(',').map(|t| number(key, t.trim())).collect::<Result<Vec<_>>>()?;
    if xs.len() != n {
        return Err(Error::InvalidArgument(format!("`{key}` expects {n} comma-separated numbers")));
    }
    Ok(xs)
}

impl StudyConfig {
    /// Parse a configuration; keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(Error::InvalidArgument(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value).map_err(|e| Error::InvalidArgument(format!("line {}: {e}", lineno + 1)))?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "domain" => {
                let d = numbers(key, value, 4)?;
                self.domain = Domain::new(d[0], d[1], d[2], d[3])?;
            }
            "element_type" => self.element_type = value.parse()?,
            "N" | "n_list" => self.n_list = parse_n_list(value)?,
            "k" => self.k = number(key, value)?,
            "beta_minus" => self.beta_minus = number(key, value)?,
            "beta_plus" => self.beta_plus = number(key, value)?,
            "sigma0" => self.sigma0 = Some(number(key, value)?),
            "problem" => self.problem = value.parse()?,
            "alpha" => self.alpha = number(key, value)?,
            "r0" => self.r0 = number(key, value)?,
            "center" => {
                let c = numbers(key, value, 2)?;
                self.center = Point::new(c[0], c[1]);
            }
            "volume_order" => self.orders.volume = integer(key, value)?,
            "edge_order" => self.orders.edge = integer(key, value)?,
            "norm_depth" => self.norm_depth = integer(key, value)?,
            "solver" => {
                self.solver.method = match value {
                    "direct" => SolverMethod::Direct,
                    "bicgstab" => SolverMethod::BiCgStab { max_iterations: 10_000 },
                    _ => return Err(Error::InvalidArgument(format!("unknown solver `{value}`"))),
                }
            }
            "max_iterations" => match &mut self.solver.method {
                SolverMethod::BiCgStab { max_iterations } => *max_iterations = integer(key, value)?,
                SolverMethod::Direct => {
                    return Err(Error::InvalidArgument("`max_iterations` requires `solver = bicgstab`".into()))
                }
            },
            "solver_tolerance" => self.solver.tolerance = number(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "dump_matrix" => self.dump_matrix = Some(PathBuf::from(value)),
            _ => return Err(Error::InvalidArgument(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0.unwrap_or(30.0 * self.beta_minus.max(self.beta_plus))
    }

    pub fn validate(&self) -> Result<()> {
        check_n_list(&self.n_list)?;
        let positive = [
            ("k", self.k),
            ("beta_minus", self.beta_minus),
            ("beta_plus", self.beta_plus),
            ("r0", self.r0),
            ("solver_tolerance", self.solver.tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("`{name}` must be positive, got {v}")));
            }
        }
        if self.sigma0().is_nan() || self.sigma0() < 0.0 {
            return Err(Error::InvalidArgument("`sigma0` must be non-negative".into()));
        }
        for (name, o) in [("volume_order", self.orders.volume), ("edge_order", self.orders.edge)] {
            if !(2..=8).contains(&o) {
                return Err(Error::InvalidArgument(format!("`{name}` must lie in 2..=8, got {o}")));
            }
        }
        match self.problem {
            ProblemKind::RadialAlpha if self.alpha.is_nan() || self.alpha <= 1.0 => {
                Err(Error::InvalidArgument(format!("`alpha` must exceed 1, got {}", self.alpha)))
            }
            ProblemKind::Sine if self.beta_minus != self.beta_plus => {
                Err(Error::InvalidArgument("the sine problem needs beta_minus = beta_plus".into()))
            }
            _ => Ok(()),
        }
    }

    /// `key = value` lines that parse back to this configuration.
    pub fn to_text(&self) -> String {
        let d = &self.domain;
        let list: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("domain", format!("{:?}, {:?}, {:?}, {:?}", d.x_min, d.x_max, d.y_min, d.y_max));
        kv("element_type", self.element_type.to_string());
        kv("N", list.join(", "));
        kv("k", format!("{:?}", self.k));
        kv("beta_minus", format!("{:?}", self.beta_minus));
        kv("beta_plus", format!("{:?}", self.beta_plus));
        kv("sigma0", format!("{:?}", self.sigma0()));
        kv("problem", self.problem.to_string());
        kv("alpha", format!("{:?}", self.alpha));
        kv("r0", format!("{:?}", self.r0));
        kv("center", format!("{:?}, {:?}", self.center.x, self.center.y));
        kv("volume_order", self.orders.volume.to_string());
        kv("edge_order", self.orders.edge.to_string());
        kv("norm_depth", self.norm_depth.to_string());
        match self.solver.method {
            SolverMethod::Direct => kv("solver", "direct".into()),
            SolverMethod::BiCgStab { max_iterations } => {
                kv("solver", "bicgstab".into());
                kv("max_iterations", max_iterations.to_string());
            }
        }
        kv("solver_tolerance", format!("{:?}", self.solver.tolerance));
        if let Some(p) = &self.output {
            kv("output", p.display().to_string());
        }
        if let Some(p) = &self.dump_matrix {
            kv("dump_matrix", p.display().to_string());
        }
        s
    }
}
