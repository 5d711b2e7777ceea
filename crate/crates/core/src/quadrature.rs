//! Volume, cut-element and edge quadrature rules in physical coordinates.
//!
//! Triangles use symmetric rules with positive weights, rectangles
//! tensor Gauss-Legendre. Cut elements fan-triangulate each side's
//! polygon and tag every point with that side. Edge rules split the edge
//! at interface crossing points so every integrand piece is a polynomial.

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point};
use crate::interface_geom::{CutElementGeometry, LevelSet, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub point: Point,
    pub weight: f64,
    /// Side of the cut line for cut-element rules; `None` otherwise.
    pub side: Option<Side>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<QuadPoint>,
}

impl QuadratureRule {
    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|q| q.weight).sum()
    }

    pub fn side_weight(&self, side: Side) -> f64 {
        self.points.iter().filter(|q| q.side == Some(side)).map(|q| q.weight).sum()
    }

    pub fn integrate<F: Fn(&QuadPoint) -> f64>(&self, f: F) -> f64 {
        self.points.iter().map(|q| q.weight * f(q)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Barycentric points `(l1, l2, l3)` and weights summing to 1 for a
/// symmetric triangle rule exact to `degree`.
type BaryRule = Vec<([f64; 3], f64)>;

fn orbit3(a: f64, w: f64, out: &mut BaryRule) {
    let b = 1.0 - 2.0 * a;
    out.push(([a, a, b], w));
    out.push(([a, b, a], w));
    out.push(([b, a, a], w));
}

fn orbit6(a: f64, b: f64, w: f64, out: &mut BaryRule) {
    let c = 1.0 - a - b;
    for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        out.push((l, w));
    }
}

/// Symmetric rules with positive weights (Strang-Fix / Dunavant).
fn triangle_bary_rule(order: usize) -> BaryRule {
    let mut r = Vec::new();
    match order {
        0..=2 => orbit3(1.0 / 6.0, 1.0 / 3.0, &mut r),
        3 | 4 => {
            orbit3(0.445_948_490_915_965, 0.223_381_589_678_011, &mut r);
            orbit3(0.091_576_213_509_771, 0.109_951_743_655_322, &mut r);
        }
        5 => {
            r.push(([1.0 / 3.0; 3], 0.225));
            orbit3(0.470_142_064_105_115, 0.132_394_152_788_506, &mut r);
            orbit3(0.101_286_507_323_456, 0.125_939_180_544_827, &mut r);
        }
        6 => {
            orbit3(0.249_286_745_170_910, 0.116_786_275_726_379, &mut r);
            orbit3(0.063_089_014_491_502, 0.050_844_906_370_207, &mut r);
            orbit6(0.053_145_049_844_817, 0.310_352_451_033_784, 0.082_851_075_618_374, &mut r);
        }
        _ => {
            r.push(([1.0 / 3.0; 3], 0.144_315_607_677_787));
            orbit3(0.459_292_588_292_723, 0.095_091_634_267_285, &mut r);
            orbit3(0.170_569_307_751_760, 0.103_217_370_534_718, &mut r);
            orbit3(0.050_547_228_317_031, 0.032_458_497_623_198, &mut r);
            orbit6(0.008_394_777_409_958, 0.263_112_829_634_638, 0.027_230_314_174_435, &mut r);
        }
    }
    // the tabulated weights carry 15 digits; renormalize so they sum to 1 exactly
    let s: f64 = r.iter().map(|(_, w)| w).sum();
    r.iter_mut().for_each(|(_, w)| *w /= s);
    r
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Number of 1D Gauss points exact for polynomials of degree `order`.
fn gauss_points_for(order: usize) -> usize {
    (order + 2) / 2
}

fn check_order(order: usize) -> Result<()> {
    if !(2..=8).contains(&order) {
        return Err(Error::InvalidArgument(format!("quadrature order {order} not in 2..=8")));
    }
    Ok(())
}

fn push_triangle(tri: [Point; 3], bary: &BaryRule, side: Option<Side>, out: &mut Vec<QuadPoint>) {
    let area = signed_area(&tri).abs();
    for &([l1, l2, l3], w) in bary {
        let p =
            Point::new(l1 * tri[0].x + l2 * tri[1].x + l3 * tri[2].x, l1 * tri[0].y + l2 * tri[1].y + l3 * tri[2].y);
        out.push(QuadPoint { point: p, weight: w * area, side });
    }
}

/// Rule on a triangle exact for total degree `order`.
pub fn triangle_rule(tri: [Point; 3], order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let mut points = Vec::new();
    push_triangle(tri, &triangle_bary_rule(order), None, &mut points);
    Ok(QuadratureRule { points })
}

/// Tensor Gauss rule on an axis-aligned rectangle given by opposite corners.
pub fn rectangle_rule(lo: Point, hi: Point, order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let (x, w) = gauss_legendre(gauss_points_for(order));
    let (cx, cy) = (0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let (hx, hy) = (0.5 * (hi.x - lo.x), 0.5 * (hi.y - lo.y));
    let mut points = Vec::with_capacity(x.len() * x.len());
    for j in 0..x.len() {
        for i in 0..x.len() {
            points.push(QuadPoint {
                point: Point::new(cx + hx * x[i], cy + hy * x[j]),
                weight: w[i] * w[j] * hx * hy,
                side: None,
            });
        }
    }
    Ok(QuadratureRule { points })
}

/// Volume rule for a mesh element (3 vertices: triangle; 4: axis-aligned rectangle).
pub fn element_rule(vertices: &[Point], order: usize) -> Result<QuadratureRule> {
    match vertices.len() {
        3 => triangle_rule([vertices[0], vertices[1], vertices[2]], order),
        4 => rectangle_rule(vertices[0], vertices[2], order),
        n => Err(Error::InvalidArgument(format!("unsupported element with {n} vertices"))),
    }
}

/// Fan triangulation of a convex polygon from its first vertex, dropping
/// triangles with area below `min_area`.
pub fn fan_triangles(poly: &[Point], min_area: f64) -> Vec<[Point; 3]> {
    (1..poly.len().saturating_sub(1))
        .map(|i| [poly[0], poly[i], poly[i + 1]])
        .filter(|t| signed_area(t).abs() >= min_area)
        .collect()
}

/// Rule on a cut element: each side's polygon is fan-triangulated and every
/// point is tagged with the polygon's side.
pub fn cut_element_rule(geom: &CutElementGeometry, order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let bary = triangle_bary_rule(order);
    let h = geom.diameter();
    let mut points = Vec::new();
    for side in [Side::Minus, Side::Plus] {
        for tri in fan_triangles(geom.piece(side), 1e-14 * h * h) {
            push_triangle(tri, &bary, Some(side), &mut points);
        }
    }
    Ok(QuadratureRule { points })
}

/// Like [`cut_element_rule`], but sub-triangles on which the level set
/// changes sign are refined by midpoint subdivision up to `depth` times,
/// so the curved interface is resolved for integrands that jump across it.
/// Point tags remain the side of the cut line.
pub fn curved_cut_rule(
    geom: &CutElementGeometry,
    ls: &dyn LevelSet,
    order: usize,
    depth: usize,
) -> Result<QuadratureRule> {
    check_order(order)?;
    let bary = triangle_bary_rule(order);
    let h = geom.diameter();
    let mut points = Vec::new();
    for side in [Side::Minus, Side::Plus] {
        for tri in fan_triangles(geom.piece(side), 1e-14 * h * h) {
            subdivide(tri, ls, depth, &bary, side, &mut points);
        }
    }
    Ok(QuadratureRule { points })
}

fn subdivide(tri: [Point; 3], ls: &dyn LevelSet, depth: usize, bary: &BaryRule, side: Side, out: &mut Vec<QuadPoint>) {
    let [a, b, c] = tri;
    let (ab, bc, ca) = (a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5));
    if depth > 0 {
        let probe = [a, b, c, ab, bc, ca, (a + b + c) * (1.0 / 3.0)];
        let first = ls.side(probe[0]);
        if probe.iter().any(|&p| ls.side(p) != first) {
            for child in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
                subdivide(child, ls, depth - 1, bary, side, out);
            }
            return;
        }
    }
    push_triangle(tri, bary, Some(side), out);
}

/// Gauss rule on the segment `a -> b`, split at the given points (which
/// must lie on the segment); each subsegment gets its own rule.
pub fn edge_rule(a: Point, b: Point, split_points: &[Point], order: usize) -> Result<QuadratureRule> {
    if order > 63 {
        return Err(Error::InvalidArgument(format!("edge quadrature order {order} too large")));
    }
    let len = a.distance(b);
    let dir = b - a;
    let mut ts: Vec<f64> = split_points
        .iter()
        .map(|&p| (p - a).dot(dir) / (len * len))
        .filter(|&t| t > 1e-14 && t < 1.0 - 1e-14)
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    let mut breaks = vec![0.0];
    breaks.extend(ts);
    breaks.push(1.0);

    let (x, w) = gauss_legendre(gauss_points_for(order.max(1)));
    let mut points = Vec::with_capacity((breaks.len() - 1) * x.len());
    for seg in breaks.windows(2) {
        let (t0, t1) = (seg[0], seg[1]);
        let half = 0.5 * (t1 - t0);
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (t0 + t1) + half * xi;
            points.push(QuadPoint { point: a.lerp(b, t), weight: wi * half * len, side: None });
        }
    }
    Ok(QuadratureRule { points })
}
