//! Manufactured solutions with their source and boundary data.

use std::f64::consts::PI;

use crate::assembly::ProblemData;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::interface_geom::Side;
use crate::norms::ExactSolution;
use crate::C64;

/// An exact solution that also supplies the data generating it.
pub trait TestProblem: ExactSolution + ProblemData {}

impl<T: ExactSolution + ProblemData> TestProblem for T {}

const AMPLITUDE: C64 = C64::new(2.0, 1.0);

/// Radial solution around a circular interface of radius `r0` at `center`:
///
/// ```text
///   u- = (2+i)/beta- r^alpha                                      r < r0
///   u+ = (2+i)/beta+ r^alpha + ((2+i)/beta- - (2+i)/beta+) r0^alpha  r > r0
/// ```
///
/// continuous with continuous flux across the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    pub alpha: f64,
    pub r0: f64,
    pub center: Point,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub k: f64,
}

pub fn manufactured_problem(alpha: f64, r0: f64, beta_minus: f64, beta_plus: f64, k: f64) -> Result<RadialProblem> {
    RadialProblem::new(alpha, r0, Point::new(0.0, 0.0), beta_minus, beta_plus, k)
}

impl RadialProblem {
    pub fn new(alpha: f64, r0: f64, center: Point, beta_minus: f64, beta_plus: f64, k: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidArgument(format!("interface radius must be positive, got {r0}")));
        }
        if !(beta_minus > 0.0 && beta_plus > 0.0 && k > 0.0) {
            return Err(Error::InvalidArgument("coefficients and wave number must be positive".into()));
        }
        Ok(Self { alpha, r0, center, beta_minus, beta_plus, k })
    }

    fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    fn offset(&self, side: Side) -> C64 {
        match side {
            Side::Minus => C64::new(0.0, 0.0),
            Side::Plus => (AMPLITUDE / self.beta_minus - AMPLITUDE / self.beta_plus) * self.r0.powf(self.alpha),
        }
    }

    fn radius(&self, p: Point) -> f64 {
        (p - self.center).norm()
    }
}

impl ExactSolution for RadialProblem {
    fn value(&self, p: Point, side: Side) -> C64 {
        AMPLITUDE / self.beta(side) * self.radius(p).powf(self.alpha) + self.offset(side)
    }

    fn gradient(&self, p: Point, side: Side) -> Option<[C64; 2]> {
        let d = p - self.center;
        let r = d.norm();
        if r == 0.0 {
            return Some([C64::new(0.0, 0.0); 2]);
        }
        let s = AMPLITUDE / self.beta(side) * (self.alpha * r.powf(self.alpha - 2.0));
        Some([s * d.x, s * d.y])
    }
}

impl ProblemData for RadialProblem {
    fn source(&self, p: Point, side: Side) -> C64 {
        let r = self.radius(p);
        let mass = self.value(p, side) * (self.k * self.k);
        if r < 1e-300 {
            return -mass;
        }
        -AMPLITUDE * (self.alpha * self.alpha * r.powf(self.alpha - 2.0)) - mass
    }

    fn boundary(&self, p: Point, n: Point) -> C64 {
        let side = if self.radius(p) < self.r0 { Side::Minus } else { Side::Plus };
        let g = self.gradient(p, side).expect("gradient is always available");
        (g[0] * n.x + g[1] * n.y) * self.beta(side) + C64::new(0.0, self.k) * self.value(p, side)
    }
}

/// `u = (2+i) sin(pi x) sin(pi y)` with a single coefficient `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineProblem {
    pub beta: f64,
    pub k: f64,
}

impl ExactSolution for SineProblem {
    fn value(&self, p: Point, _side: Side) -> C64 {
        AMPLITUDE * ((PI * p.x).sin() * (PI * p.y).sin())
    }

    fn gradient(&self, p: Point, _side: Side) -> Option<[C64; 2]> {
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        Some([AMPLITUDE * (PI * cx * sy), AMPLITUDE * (PI * sx * cy)])
    }
}

impl ProblemData for SineProblem {
    fn source(&self, p: Point, side: Side) -> C64 {
        self.value(p, side) * (2.0 * PI * PI * self.beta - self.k * self.k)
    }

    fn boundary(&self, p: Point, n: Point) -> C64 {
        let g = self.gradient(p, Side::Plus).unwrap();
        (g[0] * n.x + g[1] * n.y) * self.beta + C64::new(0.0, self.k) * self.value(p, Side::Plus)
    }
}
