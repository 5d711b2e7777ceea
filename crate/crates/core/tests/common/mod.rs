#![allow(dead_code)]

pub mod cuts;
pub mod data;

use nalgebra::{DMatrix, DVector};
use ppife::geometry::Point;
use ppife::C64;

/// Radius of the reference circular interface, `pi / 6.28` (not `pi / tau`).
#[allow(clippy::approx_constant)]
pub const R0: f64 = std::f64::consts::PI / 6.28;

/// 10-point Gauss-Legendre rule on [-1, 1].
pub const GAUSS10_X: [f64; 10] = [
    -0.9739065285171717,
    -0.8650633666889845,
    -0.6794095682990244,
    -0.4333953941292472,
    -0.1488743389816312,
    0.1488743389816312,
    0.4333953941292472,
    0.6794095682990244,
    0.8650633666889845,
    0.9739065285171717,
];
pub const GAUSS10_W: [f64; 10] = [
    0.0666713443086881,
    0.1494513491505806,
    0.219086362515982,
    0.2692667193099963,
    0.2955242247147529,
    0.2955242247147529,
    0.2692667193099963,
    0.219086362515982,
    0.1494513491505806,
    0.0666713443086881,
];

/// `int_a^b f` with the 10-point rule on each of `m` equal pieces.
pub fn gauss_segment<F: Fn(Point) -> f64>(a: Point, b: Point, m: usize, f: F) -> f64 {
    let len = a.distance(b);
    let mut s = 0.0;
    for k in 0..m {
        let (t0, t1) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
        for (x, w) in GAUSS10_X.iter().zip(GAUSS10_W) {
            let t = t0 + (t1 - t0) * 0.5 * (x + 1.0);
            s += w * 0.5 * (t1 - t0) * len * f(a.lerp(b, t));
        }
    }
    s
}

/// Collapsed (Duffy) 10x10 Gauss rule on a triangle: `(point, weight)`.
pub fn duffy_triangle(t: [Point; 3]) -> Vec<(Point, f64)> {
    let area2 = (t[1] - t[0]).cross(t[2] - t[0]).abs();
    let mut out = Vec::with_capacity(100);
    for (xu, wu) in GAUSS10_X.iter().zip(GAUSS10_W) {
        let u = 0.5 * (xu + 1.0);
        for (xv, wv) in GAUSS10_X.iter().zip(GAUSS10_W) {
            let v = 0.5 * (xv + 1.0);
            let (s, r) = (u, v * (1.0 - u));
            let p = t[0] + (t[1] - t[0]) * s + (t[2] - t[0]) * r;
            out.push((p, 0.25 * wu * wv * (1.0 - u) * area2));
        }
    }
    out
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact `int_P x^p y^q` over a simple counterclockwise polygon.
pub fn polygon_moment(poly: &[Point], p: u32, q: u32) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let cross = a.x * b.y - b.x * a.y;
        let mut inner = 0.0;
        for k in 0..=p {
            for l in 0..=q {
                inner += binom(k + l, l)
                    * binom(p - k + q - l, q - l)
                    * a.x.powi(k as i32)
                    * b.x.powi((p - k) as i32)
                    * a.y.powi(l as i32)
                    * b.y.powi((q - l) as i32);
            }
        }
        s += cross * inner;
    }
    s / ((p + q + 2) as f64 * (p + q + 1) as f64 * binom(p + q, p))
}

/// `int_P x^p y^q` evaluated in coordinates centred on the polygon's first
/// vertex and expanded binomially, which avoids cancellation for small
/// polygons far from the origin.
pub fn shifted_polygon_moment(poly: &[Point], p: u32, q: u32) -> f64 {
    let c = poly[0];
    let local: Vec<Point> = poly.iter().map(|&v| v - c).collect();
    let mut s = 0.0;
    for i in 0..=p {
        for j in 0..=q {
            s += binom(p, i)
                * binom(q, j)
                * c.x.powi((p - i) as i32)
                * c.y.powi((q - j) as i32)
                * polygon_moment(&local, i, j);
        }
    }
    s
}

pub trait Data {
    fn f(&self, p: Point) -> C64;
    fn g(&self, p: Point, n: Point) -> C64;
}

/// Dense Helmholtz-Robin system on the uniform `n x n` mesh of
/// `[x0, x1] x [y0, y1]`, standard P1 (cells split bottom-left to top-right)
/// or Q1 shapes, row-major node numbering. Closed-form element matrices.
pub struct Reference {
    pub n: usize,
    pub lo: Point,
    pub hi: Point,
    pub rectangles: bool,
}

impl Reference {
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        let hx = (self.hi.x - self.lo.x) / self.n as f64;
        let hy = (self.hi.y - self.lo.y) / self.n as f64;
        Point::new(self.lo.x + i as f64 * hx, self.lo.y + j as f64 * hy)
    }

    pub fn num_nodes(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    /// Element node lists.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..self.n {
                let (a, b, c, d) = (self.node(i, j), self.node(i + 1, j), self.node(i + 1, j + 1), self.node(i, j + 1));
                if self.rectangles {
                    out.push(vec![a, b, c, d]);
                } else {
                    out.push(vec![a, b, c]);
                    out.push(vec![a, c, d]);
                }
            }
        }
        out
    }

    fn coords(&self, g: usize) -> Point {
        self.point(g % (self.n + 1), g / (self.n + 1))
    }

    /// Shape values at `p` of the element with the given nodes.
    pub fn shapes(&self, nodes: &[usize], p: Point) -> (Vec<f64>, Vec<Point>) {
        let v: Vec<Point> = nodes.iter().map(|&g| self.coords(g)).collect();
        if self.rectangles {
            let (hx, hy) = (v[1].x - v[0].x, v[3].y - v[0].y);
            let (s, t) = ((p.x - v[0].x) / hx, (p.y - v[0].y) / hy);
            let vals = vec![(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
            let grads = vec![
                Point::new(-(1.0 - t) / hx, -(1.0 - s) / hy),
                Point::new((1.0 - t) / hx, -s / hy),
                Point::new(t / hx, s / hy),
                Point::new(-t / hx, (1.0 - s) / hy),
            ];
            (vals, grads)
        } else {
            let det = (v[1] - v[0]).cross(v[2] - v[0]);
            let mut vals = Vec::new();
            let mut grads = Vec::new();
            for i in 0..3 {
                let (b, c) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                vals.push((b - p).cross(c - p) / det);
                grads.push(Point::new(b.y - c.y, c.x - b.x) * (1.0 / det));
            }
            (vals, grads)
        }
    }

    fn element_points(&self, nodes: &[usize]) -> Vec<(Point, f64)> {
        let v: Vec<Point> = nodes.iter().map(|&g| self.coords(g)).collect();
        if self.rectangles {
            let mut out = Vec::new();
            for (xa, wa) in GAUSS10_X.iter().zip(GAUSS10_W) {
                for (xb, wb) in GAUSS10_X.iter().zip(GAUSS10_W) {
                    let hx = v[1].x - v[0].x;
                    let hy = v[3].y - v[0].y;
                    let p = Point::new(v[0].x + hx * 0.5 * (xa + 1.0), v[0].y + hy * 0.5 * (xb + 1.0));
                    out.push((p, wa * wb * 0.25 * hx * hy));
                }
            }
            out
        } else {
            duffy_triangle([v[0], v[1], v[2]])
        }
    }

    /// `(A, b)` for `-div(beta grad u) - k^2 u = f`, `beta du/dn + i k u = g`.
    pub fn assemble(&self, beta: f64, k: f64, data: &dyn Data) -> (Vec<C64>, Vec<C64>) {
        let nn = self.num_nodes();
        let mut a = vec![C64::new(0.0, 0.0); nn * nn];
        let mut b = vec![C64::new(0.0, 0.0); nn];
        for nodes in self.elements() {
            let v: Vec<Point> = nodes.iter().map(|&g| self.coords(g)).collect();
            let m = nodes.len();
            let (stiff, mass) = if self.rectangles {
                let (hx, hy) = (v[1].x - v[0].x, v[3].y - v[0].y);
                let kx = |i: usize, j: usize| if i == j { 1.0 / hx } else { -1.0 / hx };
                let ky = |i: usize, j: usize| if i == j { 1.0 / hy } else { -1.0 / hy };
                let mx = |i: usize, j: usize| if i == j { hx / 3.0 } else { hx / 6.0 };
                let my = |i: usize, j: usize| if i == j { hy / 3.0 } else { hy / 6.0 };
                let ij = [(0, 0), (1, 0), (1, 1), (0, 1)];
                let mut s = vec![0.0; 16];
                let mut ms = vec![0.0; 16];
                for p in 0..4 {
                    for q in 0..4 {
                        let ((ip, jp), (iq, jq)) = (ij[p], ij[q]);
                        s[p * 4 + q] = beta * (kx(ip, iq) * my(jp, jq) + mx(ip, iq) * ky(jp, jq));
                        ms[p * 4 + q] = mx(ip, iq) * my(jp, jq);
                    }
                }
                (s, ms)
            } else {
                let area = 0.5 * (v[1] - v[0]).cross(v[2] - v[0]);
                let (_, grads) = self.shapes(&nodes, v[0]);
                let mut s = vec![0.0; 9];
                let mut ms = vec![0.0; 9];
                for p in 0..3 {
                    for q in 0..3 {
                        s[p * 3 + q] = beta * area * grads[p].dot(grads[q]);
                        ms[p * 3 + q] = area / 12.0 * if p == q { 2.0 } else { 1.0 };
                    }
                }
                (s, ms)
            };
            for p in 0..m {
                for q in 0..m {
                    a[nodes[p] * nn + nodes[q]] += C64::new(stiff[p * m + q] - k * k * mass[p * m + q], 0.0);
                }
            }
            for (x, w) in self.element_points(&nodes) {
                let (vals, _) = self.shapes(&nodes, x);
                let f = data.f(x);
                for p in 0..m {
                    b[nodes[p]] += f * (w * vals[p]);
                }
            }
        }
        for (g0, g1, normal) in self.boundary_edges() {
            let (p0, p1) = (self.coords(g0), self.coords(g1));
            let h = p0.distance(p1);
            let pairs = [(g0, g0, h / 3.0), (g1, g1, h / 3.0), (g0, g1, h / 6.0), (g1, g0, h / 6.0)];
            for (i, j, m) in pairs {
                a[i * nn + j] += C64::new(0.0, k * m);
            }
            for (x, w) in GAUSS10_X.iter().zip(GAUSS10_W) {
                let t = 0.5 * (x + 1.0);
                let pt = p0.lerp(p1, t);
                let g = data.g(pt, normal);
                b[g0] += g * (0.5 * w * h * (1.0 - t));
                b[g1] += g * (0.5 * w * h * t);
            }
        }
        (a, b)
    }

    /// `(node, node, outward normal)` of each boundary segment.
    pub fn boundary_edges(&self) -> Vec<(usize, usize, Point)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            out.push((self.node(i, 0), self.node(i + 1, 0), Point::new(0.0, -1.0)));
            out.push((self.node(i, n), self.node(i + 1, n), Point::new(0.0, 1.0)));
            out.push((self.node(0, i), self.node(0, i + 1), Point::new(-1.0, 0.0)));
            out.push((self.node(n, i), self.node(n, i + 1), Point::new(1.0, 0.0)));
        }
        out
    }

    /// `(L2, H1 seminorm)` of `u - u_h` with a 10x10 Gauss rule per element.
    pub fn errors<U, G>(&self, coeffs: &[C64], u: U, grad: G) -> (f64, f64)
    where
        U: Fn(Point) -> C64,
        G: Fn(Point) -> [C64; 2],
    {
        let (mut l2, mut h1) = (0.0, 0.0);
        for nodes in self.elements() {
            for (x, w) in self.element_points(&nodes) {
                let (vals, grads) = self.shapes(&nodes, x);
                let mut uh = C64::new(0.0, 0.0);
                let mut gh = [C64::new(0.0, 0.0); 2];
                for (p, &g) in nodes.iter().enumerate() {
                    uh += coeffs[g] * vals[p];
                    gh[0] += coeffs[g] * grads[p].x;
                    gh[1] += coeffs[g] * grads[p].y;
                }
                let gu = grad(x);
                l2 += w * (u(x) - uh).norm_sqr();
                h1 += w * ((gu[0] - gh[0]).norm_sqr() + (gu[1] - gh[1]).norm_sqr());
            }
        }
        (l2.sqrt(), h1.sqrt())
    }
}

/// Dense LU solve.
pub fn dense_solve(n: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let m = DMatrix::from_row_slice(n, n, a);
    let rhs = DVector::from_column_slice(b);
    m.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}
