use ppife::assembly::ProblemData;
use ppife::norms::ExactSolution;
use ppife::{Point, Side, C64};

use super::Data;

const A: C64 = C64::new(1.0, 2.0);

/// `u = (1+2i)(x^2 - xy + y^2/2 + x - 0.3)` with a single coefficient.
pub struct Quadratic {
    pub beta: f64,
    pub k: f64,
}

impl Quadratic {
    pub fn u(&self, p: Point) -> C64 {
        A * (p.x * p.x - p.x * p.y + 0.5 * p.y * p.y + p.x - 0.3)
    }
    pub fn grad(&self, p: Point) -> [C64; 2] {
        [A * (2.0 * p.x - p.y + 1.0), A * (p.y - p.x)]
    }
}

impl Data for Quadratic {
    fn f(&self, p: Point) -> C64 {
        -A * (3.0 * self.beta) - self.u(p) * (self.k * self.k)
    }
    fn g(&self, p: Point, n: Point) -> C64 {
        let g = self.grad(p);
        (g[0] * n.x + g[1] * n.y) * self.beta + C64::new(0.0, self.k) * self.u(p)
    }
}

impl ProblemData for Quadratic {
    fn source(&self, p: Point, _s: Side) -> C64 {
        self.f(p)
    }
    fn boundary(&self, p: Point, n: Point) -> C64 {
        self.g(p, n)
    }
}

impl ExactSolution for Quadratic {
    fn value(&self, p: Point, _s: Side) -> C64 {
        self.u(p)
    }
    fn gradient(&self, p: Point, _s: Side) -> Option<[C64; 2]> {
        Some(self.grad(p))
    }
}

/// The zero function, so error norms measure the discrete function itself.
pub struct Zero;

impl ExactSolution for Zero {
    fn value(&self, _p: Point, _s: Side) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn gradient(&self, _p: Point, _s: Side) -> Option<[C64; 2]> {
        Some([C64::new(0.0, 0.0); 2])
    }
}
