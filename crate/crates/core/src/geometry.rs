//! Small 2D point/vector type and polygon helpers.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Signed area (positive for counterclockwise vertex order), computed
/// relative to the first vertex so it stays accurate far from the origin.
pub fn signed_area(poly: &[Point]) -> f64 {
    let Some(&o) = poly.first() else { return 0.0 };
    let mut twice = 0.0;
    for w in poly.windows(2).skip(1) {
        twice += (w[0] - o).cross(w[1] - o);
    }
    0.5 * twice
}

pub fn centroid(poly: &[Point]) -> Point {
    let a = signed_area(poly);
    if a.abs() < f64::MIN_POSITIVE {
        // degenerate: fall back to the vertex average
        let s = poly.iter().fold(Point::default(), |acc, &p| acc + p);
        return s * (1.0 / poly.len() as f64);
    }
    let o = poly[0];
    let (mut cx, mut cy) = (0.0, 0.0);
    for w in poly.windows(2).skip(1) {
        let (p, q) = (w[0] - o, w[1] - o);
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    o + Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Whether `p` lies in the convex polygon `poly` (CCW), with an absolute
/// tolerance on the edge half-plane tests.
pub fn convex_contains(poly: &[Point], p: Point, tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let edge = b - a;
        edge.cross(p - a) >= -tol * edge.norm()
    })
}
