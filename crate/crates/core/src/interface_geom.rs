//! Level-set interfaces and their intersection with mesh elements.
//!
//! The interface is the zero set of `phi`; `phi < 0` is the minus side and
//! `phi >= 0` the plus side (a vertex with `|phi| <= 1e-14` counts as plus).
//! Each element the interface cuts gets a [`CutElementGeometry`]: the
//! crossing points `D`, `E` on two distinct edges, the unit normal of the
//! line through them, and the two polygons that line cuts the element into.

use std::fmt;

use crate::error::{Error, HypothesisKind, Result};
use crate::geometry::{signed_area, Point};
use crate::mesh::Mesh;

/// Level-set values this close to zero count as the plus side.
pub const ZERO_TOL: f64 = 1e-14;

/// Relative area below which a cut piece is treated as empty.
pub const SLIVER_FRACTION: f64 = 1e-10;

/// Samples per edge when counting interface crossings.
const EDGE_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn of(phi: f64) -> Side {
        if phi < -ZERO_TOL {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

pub trait LevelSet: Send + Sync {
    fn phi(&self, p: Point) -> f64;
    fn grad(&self, p: Point) -> Point;

    fn describe(&self) -> String {
        "level set".to_string()
    }

    fn side(&self, p: Point) -> Side {
        Side::of(self.phi(p))
    }
}

/// `phi = |x - c|^2 - r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Circle of radius `r0` about the origin.
    pub fn centered(r0: f64) -> Self {
        Self::new(Point::default(), r0)
    }
}

impl LevelSet for Circle {
    fn phi(&self, p: Point) -> f64 {
        let d = p - self.center;
        d.dot(d) - self.radius * self.radius
    }

    fn grad(&self, p: Point) -> Point {
        (p - self.center) * 2.0
    }

    fn describe(&self) -> String {
        format!("circle(center=({}, {}), r={})", self.center.x, self.center.y, self.radius)
    }
}

/// `phi = a x + b y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineLevelSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineLevelSet {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Line through `p` whose plus side lies along `normal`.
    pub fn through(p: Point, normal: Point) -> Self {
        Self::new(normal.x, normal.y, -normal.dot(p))
    }
}

impl LevelSet for LineLevelSet {
    fn phi(&self, p: Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    fn grad(&self, _p: Point) -> Point {
        Point::new(self.a, self.b)
    }

    fn describe(&self) -> String {
        format!("line({} x + {} y + {})", self.a, self.b, self.c)
    }
}

/// Level set from a pair of closures.
pub struct FnLevelSet<F, G> {
    pub phi: F,
    pub grad: G,
    pub tag: String,
}

impl<F, G> LevelSet for FnLevelSet<F, G>
where
    F: Fn(Point) -> f64 + Send + Sync,
    G: Fn(Point) -> Point + Send + Sync,
{
    fn phi(&self, p: Point) -> f64 {
        (self.phi)(p)
    }

    fn grad(&self, p: Point) -> Point {
        (self.grad)(p)
    }

    fn describe(&self) -> String {
        self.tag.clone()
    }
}

/// Root of `phi` on the segment `a -> b`, which must have endpoints on
/// opposite sides. Bracketed bisection with Illinois-style secant steps;
/// stops once the bracket is shorter than `tol`.
pub fn edge_root(ls: &dyn LevelSet, a: Point, b: Point, tol: f64) -> Option<Point> {
    let len = a.distance(b);
    let f = |t: f64| ls.phi(a.lerp(b, t));
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if Side::of(flo) == Side::of(fhi) {
        return None;
    }
    if flo == 0.0 {
        return Some(a);
    }
    if fhi == 0.0 {
        return Some(b);
    }
    let t_tol = (tol / len).max(f64::EPSILON);
    // last endpoint replaced: -1 = lo, 1 = hi
    let mut last = 0i8;
    for iter in 0..400 {
        if hi - lo <= t_tol {
            break;
        }
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        let t = if iter % 4 != 3 && secant > lo && secant < hi { secant } else { 0.5 * (lo + hi) };
        let ft = f(t);
        if ft == 0.0 {
            return Some(a.lerp(b, t));
        }
        if (ft < 0.0) == (flo < 0.0) {
            lo = t;
            flo = ft;
            if last == -1 {
                fhi *= 0.5;
            }
            last = -1;
        } else {
            hi = t;
            fhi = ft;
            if last == 1 {
                flo *= 0.5;
            }
            last = 1;
        }
    }
    Some(a.lerp(b, 0.5 * (lo + hi)))
}

/// Geometry of one interface element cut by the straight line `l` through `D` and `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutElementGeometry {
    pub element: usize,
    /// Element vertices, counterclockwise.
    pub vertices: Vec<Point>,
    pub vertex_sides: Vec<Side>,
    pub d: Point,
    pub e: Point,
    /// Local edge indices holding `D` and `E`, in that order.
    pub cut_edges: [usize; 2],
    /// Global mesh edge indices holding `D` and `E`, when built from a mesh.
    pub cut_mesh_edges: Option<[usize; 2]>,
    /// Unit normal of `l`, pointing from the minus piece into the plus piece.
    pub normal: Point,
    pub sub_minus: Vec<Point>,
    pub sub_plus: Vec<Point>,
}

impl CutElementGeometry {
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn piece(&self, side: Side) -> &[Point] {
        match side {
            Side::Minus => &self.sub_minus,
            Side::Plus => &self.sub_plus,
        }
    }

    /// Signed distance of `p` from `l`, positive on the plus side.
    pub fn line_offset(&self, p: Point) -> f64 {
        self.normal.dot(p - self.d)
    }

    /// Side of `l` containing `p`; points on the line resolve to plus.
    pub fn line_side(&self, p: Point) -> Side {
        if self.line_offset(p) < 0.0 {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &p) in self.vertices.iter().enumerate() {
            for &q in &self.vertices[i + 1..] {
                d = d.max(p.distance(q));
            }
        }
        d
    }

    /// Vertex indices on side `s` (the index split of the element).
    pub fn vertices_on(&self, s: Side) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.vertex_sides[i] == s).collect()
    }
}

fn push_distinct(poly: &mut Vec<Point>, p: Point, tol: f64) {
    if poly.last().is_none_or(|&q| q.distance(p) > tol) {
        poly.push(p);
    }
}

/// Split a convex element by the segment `D`-`E`, where `D` lies on local
/// edge `edge_d` and `E` on local edge `edge_e`. The pieces are labelled by
/// the sides of the element vertices they contain.
pub fn line_partition(
    element: usize,
    vertices: &[Point],
    vertex_sides: &[Side],
    (edge_d, d): (usize, Point),
    (edge_e, e): (usize, Point),
) -> Result<CutElementGeometry> {
    let n = vertices.len();
    let diam = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| vertices[i].distance(vertices[j]))
        .fold(0.0, f64::max);
    if edge_d == edge_e || edge_d >= n || edge_e >= n {
        return Err(Error::DegenerateCut { element, reason: "D and E must lie on distinct edges".into() });
    }
    if d.distance(e) < 1e-12 * diam {
        return Err(Error::DegenerateCut { element, reason: "D and E coincide".into() });
    }
    let ((k1, p1), (k2, p2)) = if edge_d < edge_e { ((edge_d, d), (edge_e, e)) } else { ((edge_e, e), (edge_d, d)) };
    let tol = 1e-14 * diam;

    // piece A: p1, v[k1+1] ..= v[k2], p2 ; piece B: p2, v[k2+1] ..= v[k1], p1
    let mut a = Vec::with_capacity(n + 2);
    push_distinct(&mut a, p1, tol);
    for v in &vertices[k1 + 1..=k2] {
        push_distinct(&mut a, *v, tol);
    }
    push_distinct(&mut a, p2, tol);
    let mut b = Vec::with_capacity(n + 2);
    push_distinct(&mut b, p2, tol);
    for idx in (k2 + 1..n).chain(0..=k1) {
        push_distinct(&mut b, vertices[idx], tol);
    }
    push_distinct(&mut b, p1, tol);
    if b.len() > 1 && b[0].distance(*b.last().unwrap()) <= tol {
        b.pop();
    }

    let side_a = vertex_sides[k1 + 1];
    let side_b = vertex_sides[(k2 + 1) % n];
    let consistent = (k1 + 1..=k2).all(|i| vertex_sides[i] == side_a)
        && (k2 + 1..n).chain(0..=k1).all(|i| vertex_sides[i] == side_b)
        && side_a != side_b;
    if !consistent {
        return Err(Error::DegenerateCut {
            element,
            reason: "vertex sides are not separated by the cut segment".into(),
        });
    }
    let (sub_minus, sub_plus) = if side_a == Side::Minus { (a, b) } else { (b, a) };

    let dir = e - d;
    let mut normal = dir.perp() * (1.0 / dir.norm());
    let plus_vertex = vertices[vertex_sides.iter().position(|&s| s == Side::Plus).unwrap()];
    if normal.dot(plus_vertex - d) < 0.0 {
        normal = -normal;
    }

    Ok(CutElementGeometry {
        element,
        vertices: vertices.to_vec(),
        vertex_sides: vertex_sides.to_vec(),
        d,
        e,
        cut_edges: [edge_d, edge_e],
        cut_mesh_edges: None,
        normal,
        sub_minus,
        sub_plus,
    })
}

/// How an element relates to the interface.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementClass {
    /// Entirely on one side (including cuts too thin to resolve).
    Regular(Side),
    Cut(Box<CutElementGeometry>),
}

impl ElementClass {
    pub fn cut(&self) -> Option<&CutElementGeometry> {
        match self {
            ElementClass::Cut(g) => Some(g),
            ElementClass::Regular(_) => None,
        }
    }
}

/// Per-edge crossing information from classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeCrossing {
    None,
    /// Single crossing at this point.
    Single(Point),
    /// More than one crossing: hypothesis violation.
    Multiple,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HypothesisReport {
    /// Elements whose cut was thinner than the sliver threshold.
    pub slivers: Vec<usize>,
    pub interface_elements: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceClassification {
    pub classes: Vec<ElementClass>,
    pub node_sides: Vec<Side>,
    pub edge_crossings: Vec<EdgeCrossing>,
    pub report: HypothesisReport,
}

impl InterfaceClassification {
    pub fn is_interface(&self, el: usize) -> bool {
        matches!(self.classes[el], ElementClass::Cut(_))
    }

    pub fn interface_elements(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&el| self.is_interface(el)).collect()
    }

    pub fn noninterface_elements(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&el| !self.is_interface(el)).collect()
    }

    /// Interior edges with at least one adjacent interface element.
    pub fn interface_edges(&self, mesh: &Mesh) -> Vec<usize> {
        mesh.edges
            .iter()
            .enumerate()
            .filter(|(_, edge)| edge.second.is_some() && edge.elements().any(|el| self.is_interface(el)))
            .map(|(e, _)| e)
            .collect()
    }

    /// Crossing points of the cut lines of the elements adjacent to edge `e`.
    pub fn edge_split_points(&self, mesh: &Mesh, e: usize) -> Vec<Point> {
        let mut pts = Vec::new();
        for el in mesh.edges[e].elements() {
            if let Some(g) = self.classes[el].cut() {
                if let Some([ed, ee]) = g.cut_mesh_edges {
                    if ed == e {
                        pts.push(g.d);
                    }
                    if ee == e {
                        pts.push(g.e);
                    }
                }
            }
        }
        pts
    }
}

/// Classify every element of `mesh` against the interface.
pub fn classify_elements(mesh: &Mesh, ls: &dyn LevelSet) -> Result<InterfaceClassification> {
    let h = mesh.h();
    let node_sides: Vec<Side> = mesh.nodes.iter().map(|&p| ls.side(p)).collect();

    let edge_crossings: Vec<EdgeCrossing> = mesh
        .edges
        .iter()
        .map(|edge| {
            let [i, j] = edge.nodes;
            let (a, b) = (mesh.nodes[i], mesh.nodes[j]);
            let mut changes = 0;
            let mut prev = node_sides[i];
            for s in 1..=EDGE_SAMPLES {
                let cur =
                    if s == EDGE_SAMPLES { node_sides[j] } else { ls.side(a.lerp(b, s as f64 / EDGE_SAMPLES as f64)) };
                if cur != prev {
                    changes += 1;
                }
                prev = cur;
            }
            match changes {
                0 => EdgeCrossing::None,
                1 => edge_root(ls, a, b, 1e-13 * h).map_or(EdgeCrossing::None, EdgeCrossing::Single),
                _ => EdgeCrossing::Multiple,
            }
        })
        .collect();

    let mut classes = Vec::with_capacity(mesh.num_elements());
    let mut report = HypothesisReport::default();
    for el in 0..mesh.num_elements() {
        let verts = mesh.element_vertices(el);
        let sides: Vec<Side> = mesh.element(el).iter().map(|&i| node_sides[i]).collect();
        let edges = mesh.element_edges(el);
        if edges.iter().any(|&e| edge_crossings[e] == EdgeCrossing::Multiple) {
            return Err(Error::Hypothesis { element: el, kind: HypothesisKind::MultipleEdgeCrossings });
        }
        if sides.iter().all(|&s| s == sides[0]) {
            classes.push(ElementClass::Regular(sides[0]));
            continue;
        }
        let cut: Vec<(usize, usize, Point)> = edges
            .iter()
            .enumerate()
            .filter_map(|(k, &e)| match edge_crossings[e] {
                EdgeCrossing::Single(p) => Some((e, k, p)),
                _ => None,
            })
            .collect();
        if cut.len() != 2 {
            return Err(Error::Hypothesis { element: el, kind: HypothesisKind::CrossingCount });
        }
        let (mut first, mut second) = (cut[0], cut[1]);
        if first.0 > second.0 {
            std::mem::swap(&mut first, &mut second);
        }
        let (ge_d, k_d, d) = first;
        let (ge_e, k_e, e) = second;
        let area = signed_area(&verts);
        let majority = |minus_area: f64| if minus_area > 0.5 * area { Side::Minus } else { Side::Plus };

        let class = if d.distance(e) < 1e-12 * h {
            let minus = sides.iter().filter(|&&s| s == Side::Minus).count();
            let side = if 2 * minus > sides.len() { Side::Minus } else { Side::Plus };
            report.slivers.push(el);
            ElementClass::Regular(side)
        } else {
            let mut geom = line_partition(el, &verts, &sides, (k_d, d), (k_e, e))?;
            geom.cut_mesh_edges = Some([ge_d, ge_e]);
            let minus_area = signed_area(&geom.sub_minus);
            let plus_area = signed_area(&geom.sub_plus);
            if minus_area.min(plus_area) < SLIVER_FRACTION * area {
                report.slivers.push(el);
                ElementClass::Regular(majority(minus_area))
            } else {
                ElementClass::Cut(Box::new(geom))
            }
        };
        if matches!(class, ElementClass::Cut(_)) && mesh.is_boundary_element(el) {
            return Err(Error::Hypothesis { element: el, kind: HypothesisKind::BoundaryElementCut });
        }
        if matches!(class, ElementClass::Cut(_)) {
            report.interface_elements += 1;
        }
        classes.push(class);
    }

    Ok(InterfaceClassification { classes, node_sides, edge_crossings, report })
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} interface elements, {} slivers", self.interface_elements, self.slivers.len())
    }
}
