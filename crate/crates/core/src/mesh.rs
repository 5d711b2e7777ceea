//! Uniform Cartesian meshes of an axis-aligned rectangle.
//!
//! Nodes are numbered row-major from the lower-left corner, node `(i, j)`
//! having index `j * (N + 1) + i`. Cell `(i, j)` has index `c = j * N + i`;
//! a rectangular mesh uses it directly as the element index, a triangular
//! mesh splits it along the lower-left to upper-right diagonal into
//! elements `2c` (below the diagonal) and `2c + 1` (above it).
//!
//! ```text
//!   (i,j+1) *-------* (i+1,j+1)
//!           |     / |
//!           | 2c+1  |
//!           |  /    |
//!           | /  2c |
//!     (i,j) *-------* (i+1,j)
//! ```

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementType {
    Triangle,
    Rectangle,
}

impl ElementType {
    pub fn vertex_count(self) -> usize {
        match self {
            ElementType::Triangle => 3,
            ElementType::Rectangle => 4,
        }
    }
}

impl std::str::FromStr for ElementType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tri" | "triangle" | "triangular" => Ok(ElementType::Triangle),
            "rect" | "rectangle" | "rectangular" | "quad" => Ok(ElementType::Rectangle),
            other => Err(Error::InvalidArgument(format!("unknown element type `{other}`"))),
        }
    }
}

impl std::fmt::Display for ElementType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ElementType::Triangle => "tri",
            ElementType::Rectangle => "rect",
        })
    }
}

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Domain {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let d = Self { x_min, x_max, y_min, y_max };
        if !(d.width() > 0.0 && d.height() > 0.0) || !d.width().is_finite() || !d.height().is_finite() {
            return Err(Error::InvalidArgument(format!("degenerate domain {d:?}")));
        }
        Ok(d)
    }

    /// The square `(-1, 1)^2`.
    pub fn symmetric_unit() -> Self {
        Self { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// A mesh edge with its (one or two) adjacent elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints, lower node index first.
    pub nodes: [usize; 2],
    /// Lower-indexed adjacent element.
    pub first: usize,
    /// Higher-indexed adjacent element; `None` on the outer boundary.
    pub second: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.second.is_none()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.first).chain(self.second)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub domain: Domain,
    /// Subdivisions per axis.
    pub n: usize,
    pub element_type: ElementType,
    pub nodes: Vec<Point>,
    /// Flat connectivity, `element_type.vertex_count()` entries per element.
    connectivity: Vec<usize>,
    pub edges: Vec<Edge>,
    /// Per element, the edge index of local edge `k` (vertex `k` to `k+1`).
    element_edges: Vec<usize>,
}

impl Mesh {
    pub fn cartesian(domain: Domain, n: usize, element_type: ElementType) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need N >= 2 subdivisions, got {n}")));
        }
        let domain = Domain::new(domain.x_min, domain.x_max, domain.y_min, domain.y_max)?;
        let (hx, hy) = (domain.width() / n as f64, domain.height() / n as f64);
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            // pin the last row/column to the exact domain bounds
            let y = if j == n { domain.y_max } else { domain.y_min + j as f64 * hy };
            for i in 0..=n {
                let x = if i == n { domain.x_max } else { domain.x_min + i as f64 * hx };
                nodes.push(Point::new(x, y));
            }
        }

        let node = |i: usize, j: usize| j * (n + 1) + i;
        let nv = element_type.vertex_count();
        let mut connectivity = Vec::with_capacity(n * n * nv * 2);
        for j in 0..n {
            for i in 0..n {
                let (p00, p10, p11, p01) = (node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
                match element_type {
                    ElementType::Triangle => {
                        connectivity.extend_from_slice(&[p00, p10, p11]);
                        connectivity.extend_from_slice(&[p00, p11, p01]);
                    }
                    ElementType::Rectangle => connectivity.extend_from_slice(&[p00, p10, p11, p01]),
                }
            }
        }

        let n_elements = connectivity.len() / nv;
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut element_edges = Vec::with_capacity(connectivity.len());
        for el in 0..n_elements {
            let verts = &connectivity[el * nv..(el + 1) * nv];
            for k in 0..nv {
                let (a, b) = (verts[k], verts[(k + 1) % nv]);
                let key = if a < b { [a, b] } else { [b, a] };
                let idx = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { nodes: key, first: el, second: None });
                    edges.len() - 1
                });
                if edges[idx].first != el {
                    edges[idx].second = Some(el);
                }
                element_edges.push(idx);
            }
        }

        Ok(Self { domain, n, element_type, nodes, connectivity, edges, element_edges })
    }

    /// Cell side length `max(hx, hy)`.
    pub fn h(&self) -> f64 {
        (self.domain.width() / self.n as f64).max(self.domain.height() / self.n as f64)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.connectivity.len() / self.element_type.vertex_count()
    }

    /// Node indices of element `el`, counterclockwise.
    pub fn element(&self, el: usize) -> &[usize] {
        let nv = self.element_type.vertex_count();
        &self.connectivity[el * nv..(el + 1) * nv]
    }

    pub fn element_vertices(&self, el: usize) -> Vec<Point> {
        self.element(el).iter().map(|&i| self.nodes[i]).collect()
    }

    /// Edge indices of element `el`, local edge `k` joining vertices `k` and `k+1`.
    pub fn element_edges(&self, el: usize) -> &[usize] {
        let nv = self.element_type.vertex_count();
        &self.element_edges[el * nv..(el + 1) * nv]
    }

    pub fn element_area(&self, el: usize) -> f64 {
        signed_area(&self.element_vertices(el))
    }

    /// Whether element `el` has an edge on the outer boundary.
    pub fn is_boundary_element(&self, el: usize) -> bool {
        self.element_edges(el).iter().any(|&e| self.edges[e].is_boundary())
    }

    pub fn edge_points(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].nodes;
        (self.nodes[a], self.nodes[b])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edge_points(e);
        a.distance(b)
    }

    /// Unit normal of edge `e` pointing out of its first (lower-indexed) element.
    pub fn edge_normal(&self, e: usize) -> Point {
        let edge = &self.edges[e];
        let (a, b) = self.edge_points(e);
        let n = (b - a).perp() * (1.0 / a.distance(b));
        // perp() of a CCW-traversed edge points inward; orient by the element
        let verts = self.element_vertices(edge.first);
        let c = verts.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / verts.len() as f64);
        if n.dot(c - a) > 0.0 {
            -n
        } else {
            n
        }
    }

    /// Split of the edges into interior and boundary index lists.
    pub fn edge_tables(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.edges.len()).partition(|&e| !self.edges[e].is_boundary())
    }

    /// Plain-text listing of nodes and element connectivity, one record per line.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# nodes {}", self.num_nodes())?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "node {i} {:.17e} {:.17e}", p.x, p.y)?;
        }
        writeln!(w, "# elements {} {}", self.num_elements(), self.element_type)?;
        for el in 0..self.num_elements() {
            let ids: Vec<String> = self.element(el).iter().map(|i| i.to_string()).collect();
            writeln!(w, "element {el} {}", ids.join(" "))?;
        }
        Ok(())
    }
}
