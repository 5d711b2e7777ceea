//! Local shape functions: standard linear/bilinear Lagrange shapes on
//! regular elements and piecewise IFE shapes on interface elements.
//!
//! On an interface element each shape is a pair of polynomials, one per
//! piece of the cut line `l`. Linear IFE shapes (triangles) satisfy
//!
//! ```text
//!   phi-(D) = phi+(D),  phi-(E) = phi+(E),
//!   beta+ d(phi+)/dn - beta- d(phi-)/dn = 0          (n normal to l)
//! ```
//!
//! plus the nodal conditions `phi_i(A_j) = delta_ij`. Bilinear shapes
//! (rectangles) share the `xy` coefficient between the pieces and impose
//! the flux condition in integral form along `DE`.
//!
//! All polynomials are stored in a local frame `(x - center) / scale` so the
//! local systems stay well scaled whatever the element size and position.

use rayon::prelude::*;

use crate::dense::DenseLu;
use crate::error::{Error, Result};
use crate::geometry::{convex_contains, Point};
use crate::interface_geom::{CutElementGeometry, ElementClass, InterfaceClassification, LevelSet, Side};
use crate::mesh::{ElementType, Mesh};
use crate::C64;

/// Local systems with a larger 1-norm condition number are rejected.
pub const MAX_LOCAL_CONDITION: f64 = 1e12;

/// Shapes are evaluated on `l` itself when within this fraction of the element size.
const ON_LINE_TOL: f64 = 1e-12;

/// `a x + b y + c + d x y` in local coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Poly {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Poly {
    pub fn value(&self, q: Point) -> f64 {
        self.a * q.x + self.b * q.y + self.c + self.d * q.x * q.y
    }

    /// Gradient with respect to the local coordinates.
    pub fn grad(&self, q: Point) -> Point {
        Point::new(self.a + self.d * q.y, self.b + self.d * q.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub center: Point,
    pub scale: f64,
}

impl LocalFrame {
    fn for_polygon(vertices: &[Point]) -> Self {
        let n = vertices.len() as f64;
        let center = vertices.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
        let scale = vertices.iter().flat_map(|&p| vertices.iter().map(move |&q| p.distance(q))).fold(0.0, f64::max);
        Self { center, scale }
    }

    pub fn to_local(&self, p: Point) -> Point {
        (p - self.center) * (1.0 / self.scale)
    }
}

/// One shape function: its polynomial on each side of the cut line (the
/// same polynomial twice on regular elements).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub minus: Poly,
    pub plus: Poly,
}

impl Shape {
    pub fn piece(&self, side: Side) -> &Poly {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }
}

/// IFE shape functions of one interface element.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIfeBasis {
    pub geometry: CutElementGeometry,
    pub frame: LocalFrame,
    /// One shape per element vertex.
    pub shapes: Vec<Shape>,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// 1-norm condition number of the local system.
    pub condition: f64,
}

impl LocalIfeBasis {
    pub fn element(&self) -> usize {
        self.geometry.element
    }

    pub fn eval(&self, i: usize, p: Point, side: Side) -> (f64, Point) {
        let q = self.frame.to_local(p);
        let poly = self.shapes[i].piece(side);
        (poly.value(q), poly.grad(q) * (1.0 / self.frame.scale))
    }

    /// `beta+ grad(phi+) . n - beta- grad(phi-) . n` at `p`.
    pub fn flux_jump(&self, i: usize, p: Point) -> f64 {
        let n = self.geometry.normal;
        let (_, gm) = self.eval(i, p, Side::Minus);
        let (_, gp) = self.eval(i, p, Side::Plus);
        self.beta_plus * gp.dot(n) - self.beta_minus * gm.dot(n)
    }
}

fn check_betas(beta_minus: f64, beta_plus: f64) -> Result<()> {
    if !(beta_minus > 0.0 && beta_plus > 0.0 && beta_minus.is_finite() && beta_plus.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "coefficients must be positive, got beta- = {beta_minus}, beta+ = {beta_plus}"
        )));
    }
    Ok(())
}

/// Shared assembly of the local IFE system. `bilinear` adds the common `d`
/// unknown (column 6) and switches the flux row to its integral form.
fn build_ife(geom: &CutElementGeometry, beta_minus: f64, beta_plus: f64, bilinear: bool) -> Result<LocalIfeBasis> {
    check_betas(beta_minus, beta_plus)?;
    let nv = geom.vertices.len();
    let expect = if bilinear { 4 } else { 3 };
    if nv != expect {
        return Err(Error::InvalidArgument(format!(
            "{} IFE basis needs {expect} vertices, got {nv}",
            if bilinear { "bilinear" } else { "linear" }
        )));
    }
    let frame = LocalFrame::for_polygon(&geom.vertices);
    let nu = if bilinear { 7 } else { 6 };
    let mut m = vec![0.0; nu * nu];
    let mut row = 0;
    for (v, side) in geom.vertices.iter().zip(&geom.vertex_sides) {
        let q = frame.to_local(*v);
        let off = if *side == Side::Minus { 0 } else { 3 };
        m[row * nu + off] = q.x;
        m[row * nu + off + 1] = q.y;
        m[row * nu + off + 2] = 1.0;
        if bilinear {
            m[row * nu + 6] = q.x * q.y;
        }
        row += 1;
    }
    for p in [geom.d, geom.e] {
        let q = frame.to_local(p);
        m[row * nu..row * nu + 6].copy_from_slice(&[q.x, q.y, 1.0, -q.x, -q.y, -1.0]);
        row += 1;
    }
    // flux row, scaled by the larger coefficient
    let n = geom.normal;
    let scale = beta_minus.max(beta_plus);
    let (bm, bp) = (beta_minus / scale, beta_plus / scale);
    m[row * nu..row * nu + 6].copy_from_slice(&[-bm * n.x, -bm * n.y, 0.0, bp * n.x, bp * n.y, 0.0]);
    if bilinear {
        // the integrand is linear along DE: its mean is the midpoint value
        let mid = frame.to_local(geom.d.lerp(geom.e, 0.5));
        m[row * nu + 6] = (bp - bm) * (mid.y * n.x + mid.x * n.y);
    }

    let lu =
        DenseLu::factor(nu, &m).ok_or(Error::IllConditioned { element: geom.element, condition: f64::INFINITY })?;
    let condition = lu.condition();
    if condition.is_nan() || condition > MAX_LOCAL_CONDITION {
        return Err(Error::IllConditioned { element: geom.element, condition });
    }
    let shapes = (0..nv)
        .map(|i| {
            let mut rhs = vec![0.0; nu];
            rhs[i] = 1.0;
            let x = lu.solve(&rhs);
            let d = if bilinear { x[6] } else { 0.0 };
            Shape { minus: Poly { a: x[0], b: x[1], c: x[2], d }, plus: Poly { a: x[3], b: x[4], c: x[5], d } }
        })
        .collect();
    Ok(LocalIfeBasis { geometry: geom.clone(), frame, shapes, beta_minus, beta_plus, condition })
}

/// Piecewise linear IFE shapes on a triangular interface element.
pub fn build_linear_ife_basis(geom: &CutElementGeometry, beta_minus: f64, beta_plus: f64) -> Result<LocalIfeBasis> {
    build_ife(geom, beta_minus, beta_plus, false)
}

/// Piecewise bilinear IFE shapes on a rectangular interface element.
pub fn build_bilinear_ife_basis(geom: &CutElementGeometry, beta_minus: f64, beta_plus: f64) -> Result<LocalIfeBasis> {
    build_ife(geom, beta_minus, beta_plus, true)
}

/// Standard Lagrange shapes on a triangle (linear) or axis-aligned rectangle (bilinear).
pub fn standard_shapes(vertices: &[Point]) -> (LocalFrame, Vec<Poly>) {
    let frame = LocalFrame::for_polygon(vertices);
    let q: Vec<Point> = vertices.iter().map(|&p| frame.to_local(p)).collect();
    let shapes = match q.len() {
        3 => {
            let twice_area = (q[1] - q[0]).cross(q[2] - q[0]);
            (0..3)
                .map(|i| {
                    let (qj, qk) = (q[(i + 1) % 3], q[(i + 2) % 3]);
                    Poly {
                        a: (qj.y - qk.y) / twice_area,
                        b: (qk.x - qj.x) / twice_area,
                        c: qj.cross(qk) / twice_area,
                        d: 0.0,
                    }
                })
                .collect()
        }
        _ => (0..4)
            .map(|i| {
                // (x - xo)(y - yo) / ((xi - xo)(yi - yo)) with the opposite corner o
                let (qi, qo) = (q[i], q[(i + 2) % 4]);
                let den = (qi.x - qo.x) * (qi.y - qo.y);
                Poly { a: -qo.y / den, b: -qo.x / den, c: qo.x * qo.y / den, d: 1.0 / den }
            })
            .collect(),
    };
    (frame, shapes)
}

/// Shape functions of one element.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementBasis {
    Standard {
        vertices: Vec<Point>,
        frame: LocalFrame,
        shapes: Vec<Poly>,
        /// Side of the interface the element lies on (selects its coefficient).
        side: Side,
    },
    Ife(Box<LocalIfeBasis>),
}

impl ElementBasis {
    pub fn standard(vertices: Vec<Point>, side: Side) -> Self {
        let (frame, shapes) = standard_shapes(&vertices);
        ElementBasis::Standard { vertices, frame, shapes, side }
    }

    pub fn vertices(&self) -> &[Point] {
        match self {
            ElementBasis::Standard { vertices, .. } => vertices,
            ElementBasis::Ife(b) => &b.geometry.vertices,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ife(&self) -> Option<&LocalIfeBasis> {
        match self {
            ElementBasis::Ife(b) => Some(b),
            ElementBasis::Standard { .. } => None,
        }
    }

    /// Piece selector at `p`: the side of the cut line on interface
    /// elements, the element's own side otherwise.
    pub fn side_at(&self, p: Point) -> Side {
        match self {
            ElementBasis::Standard { side, .. } => *side,
            ElementBasis::Ife(b) => b.geometry.line_side(p),
        }
    }

    /// Value and gradient of shape `i` at `p`, using the piece on `side`
    /// (ignored on regular elements). No containment check.
    pub fn eval(&self, i: usize, p: Point, side: Side) -> (f64, Point) {
        match self {
            ElementBasis::Standard { frame, shapes, .. } => {
                let q = frame.to_local(p);
                (shapes[i].value(q), shapes[i].grad(q) * (1.0 / frame.scale))
            }
            ElementBasis::Ife(b) => b.eval(i, p, side),
        }
    }

    /// Checked evaluation. The piece is chosen by the cut line; `side_hint`
    /// only matters for points on the line itself.
    pub fn eval_shape(&self, element: usize, i: usize, p: Point, side_hint: Option<Side>) -> Result<(f64, Point)> {
        let verts = self.vertices();
        let scale = match self {
            ElementBasis::Standard { frame, .. } => frame.scale,
            ElementBasis::Ife(b) => b.frame.scale,
        };
        if i >= verts.len() {
            return Err(Error::InvalidArgument(format!("shape index {i} out of range")));
        }
        if !convex_contains(verts, p, 1e-12 * scale) {
            return Err(Error::OutsideElement { element, x: p.x, y: p.y });
        }
        let side = match self {
            ElementBasis::Standard { side, .. } => *side,
            ElementBasis::Ife(b) => {
                let off = b.geometry.line_offset(p);
                if off.abs() <= ON_LINE_TOL * scale {
                    side_hint.unwrap_or(Side::Plus)
                } else if off < 0.0 {
                    Side::Minus
                } else {
                    Side::Plus
                }
            }
        };
        Ok(self.eval(i, p, side))
    }
}

/// Shape functions on every element of a mesh plus the interior edges the
/// scheme penalizes.
#[derive(Debug, Clone, PartialEq)]
pub struct FeSpace {
    pub element_type: ElementType,
    pub bases: Vec<ElementBasis>,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// Interior edges with at least one adjacent interface element.
    pub interface_edges: Vec<usize>,
    /// Crossing points on each of `interface_edges`, for splitting edge rules.
    pub edge_splits: Vec<Vec<Point>>,
}

impl FeSpace {
    /// IFE space: IFE shapes on interface elements, standard shapes elsewhere.
    pub fn ife(mesh: &Mesh, classes: &InterfaceClassification, beta_minus: f64, beta_plus: f64) -> Result<Self> {
        check_betas(beta_minus, beta_plus)?;
        let bases = (0..mesh.num_elements())
            .into_par_iter()
            .map(|el| match &classes.classes[el] {
                ElementClass::Regular(side) => Ok(ElementBasis::standard(mesh.element_vertices(el), *side)),
                ElementClass::Cut(geom) => {
                    let b = match mesh.element_type {
                        ElementType::Triangle => build_linear_ife_basis(geom, beta_minus, beta_plus)?,
                        ElementType::Rectangle => build_bilinear_ife_basis(geom, beta_minus, beta_plus)?,
                    };
                    Ok(ElementBasis::Ife(Box::new(b)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let interface_edges = classes.interface_edges(mesh);
        let edge_splits = interface_edges.iter().map(|&e| classes.edge_split_points(mesh, e)).collect();
        Ok(Self { element_type: mesh.element_type, bases, beta_minus, beta_plus, interface_edges, edge_splits })
    }

    /// Standard Lagrange space on every element; no penalized edges.
    pub fn standard(mesh: &Mesh, beta: f64) -> Result<Self> {
        check_betas(beta, beta)?;
        let bases =
            (0..mesh.num_elements()).map(|el| ElementBasis::standard(mesh.element_vertices(el), Side::Plus)).collect();
        Ok(Self {
            element_type: mesh.element_type,
            bases,
            beta_minus: beta,
            beta_plus: beta,
            interface_edges: Vec::new(),
            edge_splits: Vec::new(),
        })
    }

    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }

    /// Value and gradient of the discrete function with nodal values
    /// `coeffs` on element `el` at `p`, using the piece on `side`.
    pub fn eval(&self, mesh: &Mesh, coeffs: &[C64], el: usize, p: Point, side: Side) -> (C64, [C64; 2]) {
        let basis = &self.bases[el];
        let mut val = C64::new(0.0, 0.0);
        let mut grad = [C64::new(0.0, 0.0); 2];
        for (i, &node) in mesh.element(el).iter().enumerate() {
            let (v, g) = basis.eval(i, p, side);
            let c = coeffs[node];
            val += c * v;
            grad[0] += c * g.x;
            grad[1] += c * g.y;
        }
        (val, grad)
    }
}

/// Nodal values of a side-aware function; a node on the interface takes its plus-side value.
pub fn interpolate_ife<F>(mesh: &Mesh, ls: &dyn LevelSet, u: F) -> Vec<C64>
where
    F: Fn(Point, Side) -> C64,
{
    mesh.nodes.iter().map(|&p| u(p, ls.side(p))).collect()
}

/// Nodal values of a function defined everywhere.
pub fn interpolate_nodal<F>(mesh: &Mesh, v: F) -> Vec<C64>
where
    F: Fn(Point) -> C64,
{
    mesh.nodes.iter().map(|&p| v(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface_geom::line_partition;

    fn unit_triangle_cut() -> CutElementGeometry {
        let verts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let sides = vec![Side::Minus, Side::Plus, Side::Plus];
        line_partition(0, &verts, &sides, (0, Point::new(0.5, 0.0)), (2, Point::new(0.0, 0.5))).unwrap()
    }

    fn unit_square_cut() -> CutElementGeometry {
        let verts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let sides = vec![Side::Minus, Side::Plus, Side::Plus, Side::Plus];
        line_partition(0, &verts, &sides, (0, Point::new(0.3, 0.0)), (3, Point::new(0.0, 0.7))).unwrap()
    }

    #[test]
    fn standard_triangle_shapes_are_nodal() {
        let verts = vec![Point::new(0.2, 0.1), Point::new(1.0, 0.3), Point::new(0.4, 0.9)];
        let b = ElementBasis::standard(verts.clone(), Side::Plus);
        for i in 0..3 {
            for (j, &v) in verts.iter().enumerate() {
                let (val, _) = b.eval_shape(0, i, v, None).unwrap();
                assert!((val - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn standard_rectangle_shapes_are_nodal() {
        let verts = vec![Point::new(1.0, 2.0), Point::new(1.5, 2.0), Point::new(1.5, 2.25), Point::new(1.0, 2.25)];
        let b = ElementBasis::standard(verts.clone(), Side::Plus);
        for i in 0..4 {
            for (j, &v) in verts.iter().enumerate() {
                let (val, _) = b.eval_shape(0, i, v, None).unwrap();
                assert!((val - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn equal_coefficients_recover_standard_shapes() {
        for geom in [unit_triangle_cut(), unit_square_cut()] {
            let b = build_ife(&geom, 3.0, 3.0, geom.vertices.len() == 4).unwrap();
            let (frame, std) = standard_shapes(&geom.vertices);
            assert_eq!(frame, b.frame);
            for (s, p) in b.shapes.iter().zip(&std) {
                for piece in [s.minus, s.plus] {
                    assert!((piece.a - p.a).abs() < 1e-12);
                    assert!((piece.b - p.b).abs() < 1e-12);
                    assert!((piece.c - p.c).abs() < 1e-12);
                    assert!((piece.d - p.d).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        for geom in [unit_triangle_cut(), unit_square_cut()] {
            let b = build_ife(&geom, 1.0, 10.0, geom.vertices.len() == 4).unwrap();
            for side in [Side::Minus, Side::Plus] {
                let sum = b.shapes.iter().fold(Poly::default(), |acc, s| {
                    let p = s.piece(side);
                    Poly { a: acc.a + p.a, b: acc.b + p.b, c: acc.c + p.c, d: acc.d + p.d }
                });
                assert!(sum.a.abs() < 1e-12 && sum.b.abs() < 1e-12 && sum.d.abs() < 1e-12);
                assert!((sum.c - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_basis_conditions() {
        let geom = unit_triangle_cut();
        let b = build_linear_ife_basis(&geom, 1.0, 10.0).unwrap();
        for i in 0..3 {
            for (j, v) in geom.vertices.iter().enumerate() {
                let (val, _) = b.eval(i, *v, geom.vertex_sides[j]);
                assert!((val - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
            for p in [geom.d, geom.e] {
                assert!((b.eval(i, p, Side::Minus).0 - b.eval(i, p, Side::Plus).0).abs() < 1e-12);
            }
            assert!(b.flux_jump(i, Point::new(0.3, 0.3)).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_shares_xy_coefficient() {
        let b = build_bilinear_ife_basis(&unit_square_cut(), 1.0, 5.0).unwrap();
        for s in &b.shapes {
            assert_eq!(s.minus.d, s.plus.d);
        }
    }

    #[test]
    fn wrong_vertex_count_and_bad_beta_rejected() {
        assert!(build_bilinear_ife_basis(&unit_triangle_cut(), 1.0, 2.0).is_err());
        assert!(build_linear_ife_basis(&unit_square_cut(), 1.0, 2.0).is_err());
        assert!(build_linear_ife_basis(&unit_triangle_cut(), 0.0, 2.0).is_err());
    }

    #[test]
    fn outside_point_is_a_domain_error() {
        let geom = unit_triangle_cut();
        let b = ElementBasis::Ife(Box::new(build_linear_ife_basis(&geom, 1.0, 10.0).unwrap()));
        assert!(matches!(
            b.eval_shape(7, 0, Point::new(0.8, 0.8), None),
            Err(Error::OutsideElement { element: 7, .. })
        ));
    }

    #[test]
    fn side_hint_applies_on_the_line_only() {
        let geom = unit_triangle_cut();
        let b = ElementBasis::Ife(Box::new(build_linear_ife_basis(&geom, 1.0, 10.0).unwrap()));
        let on_line = geom.d.lerp(geom.e, 0.5);
        let (_, gm) = b.eval_shape(0, 0, on_line, Some(Side::Minus)).unwrap();
        let (_, gp) = b.eval_shape(0, 0, on_line, Some(Side::Plus)).unwrap();
        assert!((gm - gp).norm() > 1e-3);
        let off = Point::new(0.1, 0.1);
        assert_eq!(b.eval_shape(0, 0, off, Some(Side::Plus)).unwrap(), b.eval_shape(0, 0, off, None).unwrap());
    }
}
