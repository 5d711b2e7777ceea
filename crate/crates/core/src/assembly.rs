//! Global system of the symmetric PPIFE scheme.
//!
//! With real shape functions every piece of the sesquilinear form is a real
//! symmetric matrix, and the complex system is
//!
//! ```text
//!   A = K + C - k^2 M + i (P + k B)
//! ```
//!
//! where `K` is the coefficient-weighted stiffness, `C` the two flux
//! consistency terms on penalized edges, `M` the mass, `P` the edge jump
//! penalty `sigma0 / |e| * int [u][v]` and `B` the boundary mass of the
//! absorbing condition. The load is `int f v + int_{boundary} g v`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{centroid, Point};
use crate::ife_basis::{ElementBasis, FeSpace};
use crate::interface_geom::{LevelSet, Side};
use crate::mesh::Mesh;
use crate::quadrature::{cut_element_rule, edge_rule, element_rule};
use crate::sparse::SparseMatrix;
use crate::C64;

/// Physical and penalty parameters of the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    /// Wave number.
    pub k: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    /// Edge penalty `sigma_e^0`, uniform over edges.
    pub sigma0: f64,
}

impl ProblemParams {
    /// Parameters with the default penalty `30 max(beta-, beta+)`.
    pub fn new(k: f64, beta_minus: f64, beta_plus: f64) -> Result<Self> {
        Self::with_sigma0(k, beta_minus, beta_plus, 30.0 * beta_minus.max(beta_plus))
    }

    pub fn with_sigma0(k: f64, beta_minus: f64, beta_plus: f64, sigma0: f64) -> Result<Self> {
        let p = Self { k, beta_minus, beta_plus, sigma0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wave number must be positive, got {}", self.k)));
        }
        if !(self.beta_minus > 0.0 && self.beta_plus > 0.0) {
            return Err(Error::InvalidArgument("coefficients must be positive".into()));
        }
        if !(self.sigma0 >= 0.0 && self.sigma0.is_finite()) {
            return Err(Error::InvalidArgument(format!("penalty must be non-negative, got {}", self.sigma0)));
        }
        Ok(())
    }

    pub fn beta(&self, side: Side) -> f64 {
        match side {
            Side::Minus => self.beta_minus,
            Side::Plus => self.beta_plus,
        }
    }
}

/// Source and boundary data.
pub trait ProblemData: Sync {
    /// `f` at `p`, on the given side of the interface.
    fn source(&self, p: Point, side: Side) -> C64;
    /// `g` at a boundary point with the given outward unit normal.
    fn boundary(&self, p: Point, outward_normal: Point) -> C64;
}

/// `f = 0`, `g = 0`.
pub struct ZeroData;

impl ProblemData for ZeroData {
    fn source(&self, _p: Point, _side: Side) -> C64 {
        C64::new(0.0, 0.0)
    }
    fn boundary(&self, _p: Point, _n: Point) -> C64 {
        C64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrders {
    pub volume: usize,
    pub edge: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self { volume: 4, edge: 4 }
    }
}

/// Dense local blocks of one element, row-major over `dofs`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementContribution {
    pub dofs: Vec<usize>,
    /// `int beta grad(phi_j) . grad(phi_i)`
    pub stiffness: Vec<f64>,
    /// `int phi_j phi_i`
    pub mass: Vec<f64>,
    /// `int f phi_i`
    pub load: Vec<C64>,
}

impl ElementContribution {
    /// `stiffness - k^2 mass`.
    pub fn matrix(&self, k: f64) -> Vec<f64> {
        self.stiffness.iter().zip(&self.mass).map(|(s, m)| s - k * k * m).collect()
    }
}

pub fn element_contribution(
    mesh: &Mesh,
    space: &FeSpace,
    ls: &dyn LevelSet,
    data: &dyn ProblemData,
    el: usize,
    order: usize,
) -> Result<ElementContribution> {
    let basis = &space.bases[el];
    let rule = match basis {
        ElementBasis::Standard { vertices, .. } => element_rule(vertices, order)?,
        ElementBasis::Ife(b) => cut_element_rule(&b.geometry, order)?,
    };
    let n = basis.len();
    let mut stiffness = vec![0.0; n * n];
    let mut mass = vec![0.0; n * n];
    let mut load = vec![C64::new(0.0, 0.0); n];
    let mut vals = vec![0.0; n];
    let mut grads = vec![Point::default(); n];
    for q in &rule.points {
        let side = q.side.unwrap_or_else(|| basis.side_at(q.point));
        let beta = space.beta(side);
        for i in 0..n {
            (vals[i], grads[i]) = basis.eval(i, q.point, side);
        }
        let f = data.source(q.point, ls.side(q.point));
        for i in 0..n {
            for j in 0..n {
                stiffness[i * n + j] += q.weight * beta * grads[i].dot(grads[j]);
                mass[i * n + j] += q.weight * vals[i] * vals[j];
            }
            load[i] += f * (q.weight * vals[i]);
        }
    }
    Ok(ElementContribution { dofs: mesh.element(el).to_vec(), stiffness, mass, load })
}

/// Dense coupling blocks of one penalized interior edge, row-major over `dofs`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeContribution {
    pub edge: usize,
    pub dofs: Vec<usize>,
    /// `-int {beta grad(phi_j).n}[phi_i] - int {beta grad(phi_i).n}[phi_j]`
    pub consistency: Vec<f64>,
    /// `sigma0 / |e| int [phi_j][phi_i]` (enters the system multiplied by `i`)
    pub penalty: Vec<f64>,
    /// `|e| / sigma0 int {beta grad(phi_j).n}{beta grad(phi_i).n}` (norm only)
    pub flux_norm: Vec<f64>,
}

impl EdgeContribution {
    /// The block added to the system matrix.
    pub fn block(&self) -> Vec<C64> {
        self.consistency.iter().zip(&self.penalty).map(|(&c, &p)| C64::new(c, p)).collect()
    }
}

/// Jumps `[phi_g]` and flux averages `{beta grad(phi_g) . n}` of every
/// local dof of an interior edge at each point of its rule. The jump is
/// taken first-element minus second-element and `n` points from the first
/// element into the second.
pub(crate) struct EdgeTraces {
    pub dofs: Vec<usize>,
    pub points: Vec<(Point, f64)>,
    pub jumps: Vec<Vec<f64>>,
    pub averages: Vec<Vec<f64>>,
    pub normal: Point,
    pub length: f64,
}

pub(crate) fn edge_traces(mesh: &Mesh, space: &FeSpace, slot: usize, order: usize) -> Result<EdgeTraces> {
    let e = space.interface_edges[slot];
    let edge = &mesh.edges[e];
    let second = edge.second.ok_or_else(|| Error::Internal(format!("edge {e} is not interior")))?;
    let (a, b) = mesh.edge_points(e);
    let normal = mesh.edge_normal(e);
    if normal.dot(centroid(&mesh.element_vertices(second)) - a) <= 0.0 {
        return Err(Error::Internal(format!("normal of edge {e} does not point into element {second}")));
    }
    let (n1, n2) = (mesh.element(edge.first), mesh.element(second));
    let mut dofs: Vec<usize> = n1.to_vec();
    dofs.extend(n2.iter().filter(|g| !n1.contains(g)));
    let local = |nodes: &[usize], g: usize| nodes.iter().position(|&x| x == g);
    let map1: Vec<Option<usize>> = dofs.iter().map(|&g| local(n1, g)).collect();
    let map2: Vec<Option<usize>> = dofs.iter().map(|&g| local(n2, g)).collect();

    let rule = edge_rule(a, b, &space.edge_splits[slot], order)?;
    let (b1, b2) = (&space.bases[edge.first], &space.bases[second]);
    let mut jumps = Vec::with_capacity(rule.len());
    let mut averages = Vec::with_capacity(rule.len());
    for q in &rule.points {
        let (s1, s2) = (b1.side_at(q.point), b2.side_at(q.point));
        let (beta1, beta2) = (space.beta(s1), space.beta(s2));
        let mut jump = vec![0.0; dofs.len()];
        let mut avg = vec![0.0; dofs.len()];
        for g in 0..dofs.len() {
            if let Some(i) = map1[g] {
                let (v, grad) = b1.eval(i, q.point, s1);
                jump[g] += v;
                avg[g] += 0.5 * beta1 * grad.dot(normal);
            }
            if let Some(i) = map2[g] {
                let (v, grad) = b2.eval(i, q.point, s2);
                jump[g] -= v;
                avg[g] += 0.5 * beta2 * grad.dot(normal);
            }
        }
        jumps.push(jump);
        averages.push(avg);
    }
    let points = rule.points.iter().map(|q| (q.point, q.weight)).collect();
    Ok(EdgeTraces { dofs, points, jumps, averages, normal, length: a.distance(b) })
}

/// Contribution of the `slot`-th penalized edge of `space`.
pub fn interface_edge_contribution(
    mesh: &Mesh,
    space: &FeSpace,
    params: &ProblemParams,
    slot: usize,
    order: usize,
) -> Result<EdgeContribution> {
    let tr = edge_traces(mesh, space, slot, order)?;
    let n = tr.dofs.len();
    let mut consistency = vec![0.0; n * n];
    let mut penalty = vec![0.0; n * n];
    let mut flux_norm = vec![0.0; n * n];
    let pen = params.sigma0 / tr.length;
    let fluxw = if params.sigma0 > 0.0 { tr.length / params.sigma0 } else { 0.0 };
    for (q, &(_, w)) in tr.points.iter().enumerate() {
        let (jump, avg) = (&tr.jumps[q], &tr.averages[q]);
        for i in 0..n {
            for j in 0..n {
                consistency[i * n + j] -= w * (avg[j] * jump[i] + avg[i] * jump[j]);
                penalty[i * n + j] += w * pen * jump[i] * jump[j];
                flux_norm[i * n + j] += w * fluxw * avg[i] * avg[j];
            }
        }
    }
    Ok(EdgeContribution { edge: space.interface_edges[slot], dofs: tr.dofs, consistency, penalty, flux_norm })
}

/// Blocks of one outer boundary edge, over its two end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryContribution {
    pub dofs: [usize; 2],
    /// `int_e phi_j phi_i ds` (enters the system multiplied by `i k`)
    pub mass: [f64; 4],
    /// `int_e g phi_i ds`
    pub load: [C64; 2],
}

impl BoundaryContribution {
    pub fn block(&self, k: f64) -> [C64; 4] {
        self.mass.map(|m| C64::new(0.0, k * m))
    }
}

pub fn boundary_contribution(
    mesh: &Mesh,
    space: &FeSpace,
    data: &dyn ProblemData,
    e: usize,
    order: usize,
) -> Result<BoundaryContribution> {
    let edge = &mesh.edges[e];
    if !edge.is_boundary() {
        return Err(Error::InvalidArgument(format!("edge {e} is not on the boundary")));
    }
    let el = edge.first;
    let basis = &space.bases[el];
    let nodes = mesh.element(el);
    let li = edge.nodes.map(|g| nodes.iter().position(|&x| x == g).expect("edge node in element"));
    let (a, b) = mesh.edge_points(e);
    let normal = mesh.edge_normal(e);
    let rule = edge_rule(a, b, &[], order)?;
    let mut mass = [0.0; 4];
    let mut load = [C64::new(0.0, 0.0); 2];
    for q in &rule.points {
        let side = basis.side_at(q.point);
        let v = li.map(|i| basis.eval(i, q.point, side).0);
        let g = data.boundary(q.point, normal);
        for i in 0..2 {
            for j in 0..2 {
                mass[2 * i + j] += q.weight * v[i] * v[j];
            }
            load[i] += g * (q.weight * v[i]);
        }
    }
    Ok(BoundaryContribution { dofs: edge.nodes, mass, load })
}

/// The real symmetric pieces of the scheme and the load vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledParts {
    pub stiffness: SparseMatrix<f64>,
    pub consistency: SparseMatrix<f64>,
    pub penalty: SparseMatrix<f64>,
    pub mass: SparseMatrix<f64>,
    pub boundary_mass: SparseMatrix<f64>,
    /// Gram matrix of the flux-average term of the energy norm.
    pub flux_norm: SparseMatrix<f64>,
    pub load: Vec<C64>,
}

/// Complex symmetric system `A x = b` over nodal unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSparseSystem {
    pub matrix: SparseMatrix<C64>,
    pub rhs: Vec<C64>,
}

impl ComplexSparseSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        self.matrix.max_asymmetry(|a, b| (a - b).norm())
    }
}

impl AssembledParts {
    pub fn dim(&self) -> usize {
        self.load.len()
    }

    /// `A = K + C - k^2 M + i (P + k B)`.
    pub fn system(&self, k: f64) -> ComplexSparseSystem {
        let re = |s: f64| move |v: f64| C64::new(s * v, 0.0);
        let im = |s: f64| move |v: f64| C64::new(0.0, s * v);
        let pieces = [
            self.stiffness.map(re(1.0)),
            self.consistency.map(re(1.0)),
            self.mass.map(re(-k * k)),
            self.penalty.map(im(1.0)),
            self.boundary_mass.map(im(k)),
        ];
        let triplets: Vec<_> = pieces.iter().flat_map(|m| m.triplets()).collect();
        let n = self.dim();
        ComplexSparseSystem { matrix: SparseMatrix::from_triplets(n, n, &triplets), rhs: self.load.clone() }
    }

    /// The real bilinear form `K + C` (everything in `a_h` but the penalty).
    pub fn a_tilde(&self) -> SparseMatrix<f64> {
        &self.stiffness + &self.consistency
    }
}

fn scatter(dofs: &[usize], block: &[f64], out: &mut Vec<(usize, usize, f64)>) {
    let n = dofs.len();
    for i in 0..n {
        for j in 0..n {
            out.push((dofs[i], dofs[j], block[i * n + j]));
        }
    }
}

/// Assemble every piece. Local contributions are computed in parallel and
/// scattered in ascending element, then edge, order.
pub fn assemble_parts(
    mesh: &Mesh,
    ls: &dyn LevelSet,
    space: &FeSpace,
    params: &ProblemParams,
    data: &dyn ProblemData,
    orders: QuadratureOrders,
) -> Result<AssembledParts> {
    params.validate()?;
    let n = mesh.num_nodes();
    let elements = (0..mesh.num_elements())
        .into_par_iter()
        .map(|el| element_contribution(mesh, space, ls, data, el, orders.volume))
        .collect::<Result<Vec<_>>>()?;
    let edges = (0..space.interface_edges.len())
        .into_par_iter()
        .map(|slot| interface_edge_contribution(mesh, space, params, slot, orders.edge))
        .collect::<Result<Vec<_>>>()?;
    let (_, boundary_edges) = mesh.edge_tables();
    let boundary = boundary_edges
        .par_iter()
        .map(|&e| boundary_contribution(mesh, space, data, e, orders.edge))
        .collect::<Result<Vec<_>>>()?;

    let mut load = vec![C64::new(0.0, 0.0); n];
    let (mut k_t, mut m_t) = (Vec::new(), Vec::new());
    for c in &elements {
        scatter(&c.dofs, &c.stiffness, &mut k_t);
        scatter(&c.dofs, &c.mass, &mut m_t);
        for (&g, &l) in c.dofs.iter().zip(&c.load) {
            load[g] += l;
        }
    }
    let (mut c_t, mut p_t, mut f_t) = (Vec::new(), Vec::new(), Vec::new());
    for c in &edges {
        scatter(&c.dofs, &c.consistency, &mut c_t);
        scatter(&c.dofs, &c.penalty, &mut p_t);
        scatter(&c.dofs, &c.flux_norm, &mut f_t);
    }
    let mut b_t = Vec::new();
    for c in &boundary {
        scatter(&c.dofs, &c.mass, &mut b_t);
        for (&g, &l) in c.dofs.iter().zip(&c.load) {
            load[g] += l;
        }
    }
    let build = |t: &[(usize, usize, f64)]| SparseMatrix::from_triplets(n, n, t);
    Ok(AssembledParts {
        stiffness: build(&k_t),
        consistency: build(&c_t),
        penalty: build(&p_t),
        mass: build(&m_t),
        boundary_mass: build(&b_t),
        flux_norm: build(&f_t),
        load,
    })
}

/// Assemble the complex system of the scheme.
pub fn assemble(
    mesh: &Mesh,
    ls: &dyn LevelSet,
    space: &FeSpace,
    params: &ProblemParams,
    data: &dyn ProblemData,
    orders: QuadratureOrders,
) -> Result<ComplexSparseSystem> {
    Ok(assemble_parts(mesh, ls, space, params, data, orders)?.system(params.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface_geom::{classify_elements, Circle};
    use crate::mesh::{Domain, ElementType};

    struct UnitBoundary;
    impl ProblemData for UnitBoundary {
        fn source(&self, _p: Point, _s: Side) -> C64 {
            C64::new(0.0, 0.0)
        }
        fn boundary(&self, _p: Point, _n: Point) -> C64 {
            C64::new(1.0, 0.0)
        }
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn far() -> Circle {
        Circle::new(Point::new(10.0, 10.0), 1.0)
    }

    #[test]
    fn p1_stiffness_of_right_triangle() {
        let mesh = Mesh::cartesian(Domain::new(0.0, 2.0, 0.0, 2.0).unwrap(), 2, ElementType::Triangle).unwrap();
        let space = FeSpace::standard(&mesh, 1.0).unwrap();
        let c = element_contribution(&mesh, &space, &far(), &ZeroData, 0, 4).unwrap();
        // element 0 is (0,0), (1,0), (1,1) with the right angle at local vertex 1
        let perm = [1, 0, 2];
        let k: Vec<f64> = (0..9).map(|ij| c.stiffness[perm[ij / 3] * 3 + perm[ij % 3]]).collect();
        assert!(close(&k, &[1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5], 1e-14), "{k:?}");
        assert!(close(&c.matrix(0.0), &c.stiffness, 0.0));
    }

    #[test]
    fn equal_coefficients_give_standard_blocks() {
        for t in [ElementType::Triangle, ElementType::Rectangle] {
            let mesh = Mesh::cartesian(Domain::symmetric_unit(), 10, t).unwrap();
            let ls = Circle::centered(0.5);
            let cls = classify_elements(&mesh, &ls).unwrap();
            let ife = FeSpace::ife(&mesh, &cls, 2.0, 2.0).unwrap();
            let std = FeSpace::standard(&mesh, 2.0).unwrap();
            let params = ProblemParams::new(3.0, 2.0, 2.0).unwrap();
            for el in cls.interface_elements() {
                let a = element_contribution(&mesh, &ife, &ls, &ZeroData, el, 4).unwrap();
                let b = element_contribution(&mesh, &std, &ls, &ZeroData, el, 4).unwrap();
                assert!(close(&a.matrix(3.0), &b.matrix(3.0), 1e-12), "{t} element {el}");
            }
            for slot in 0..ife.interface_edges.len() {
                let c = interface_edge_contribution(&mesh, &ife, &params, slot, 4).unwrap();
                assert!(c.penalty.iter().all(|v| v.abs() <= 1e-12));
                assert!(c.consistency.iter().all(|v| v.abs() <= 1e-10));
            }
        }
    }

    #[test]
    fn local_blocks_are_symmetric() {
        let mesh = Mesh::cartesian(Domain::symmetric_unit(), 10, ElementType::Triangle).unwrap();
        let ls = Circle::centered(crate::study::REFERENCE_R0);
        let cls = classify_elements(&mesh, &ls).unwrap();
        let space = FeSpace::ife(&mesh, &cls, 1.0, 10.0).unwrap();
        let params = ProblemParams::new(10.0, 1.0, 10.0).unwrap();
        let sym = |m: &[f64], n: usize| (0..n).all(|i| (0..n).all(|j| (m[i * n + j] - m[j * n + i]).abs() <= 1e-13));
        for el in 0..mesh.num_elements() {
            let c = element_contribution(&mesh, &space, &ls, &ZeroData, el, 4).unwrap();
            assert!(sym(&c.matrix(10.0), c.dofs.len()));
        }
        for slot in 0..space.interface_edges.len() {
            let c = interface_edge_contribution(&mesh, &space, &params, slot, 4).unwrap();
            let n = c.dofs.len();
            assert!(sym(&c.consistency, n) && sym(&c.penalty, n) && sym(&c.flux_norm, n));
            assert!(c.block().iter().zip(&c.penalty).all(|(b, p)| b.im == *p));
        }
    }

    #[test]
    fn boundary_edge_mass_and_load() {
        let mesh = Mesh::cartesian(Domain::symmetric_unit(), 4, ElementType::Triangle).unwrap();
        let space = FeSpace::standard(&mesh, 1.0).unwrap();
        let (_, boundary) = mesh.edge_tables();
        for &e in &boundary {
            let h = mesh.edge_length(e);
            let c = boundary_contribution(&mesh, &space, &UnitBoundary, e, 4).unwrap();
            assert!(close(&c.mass, &[h / 3.0, h / 6.0, h / 6.0, h / 3.0], 1e-15));
            assert!(c.load.iter().all(|l| (l - C64::new(h / 2.0, 0.0)).norm() < 1e-15));
            let k = 2.5;
            let b = c.block(k);
            assert!((b[1] - C64::new(0.0, k * h / 6.0)).norm() < 1e-15);
            assert!(c.block(0.0).iter().all(|z| z.norm() == 0.0));
        }
        let (interior, _) = mesh.edge_tables();
        assert!(boundary_contribution(&mesh, &space, &UnitBoundary, interior[0], 4).is_err());
    }

    #[test]
    fn global_system_structure() {
        let mesh = Mesh::cartesian(Domain::symmetric_unit(), 10, ElementType::Rectangle).unwrap();
        let ls = Circle::centered(0.45);
        let cls = classify_elements(&mesh, &ls).unwrap();
        let space = FeSpace::ife(&mesh, &cls, 1.0, 100.0).unwrap();
        let params = ProblemParams::new(5.0, 1.0, 100.0).unwrap();
        let parts = assemble_parts(&mesh, &ls, &space, &params, &UnitBoundary, QuadratureOrders::default()).unwrap();
        let sys = parts.system(params.k);
        assert!(sys.max_asymmetry() <= 1e-12);
        let total: C64 = sys.rhs.iter().sum();
        assert!((total - C64::new(8.0, 0.0)).norm() < 1e-12);
        let abs = |a: f64, b: f64| (a - b).abs();
        assert!(parts.penalty.max_asymmetry(abs) == 0.0 || parts.penalty.max_asymmetry(abs) < 1e-12);
        assert_eq!(parts.a_tilde().nrows, mesh.num_nodes());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(ProblemParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(1.0, -1.0, 1.0).is_err());
        assert!(ProblemParams::with_sigma0(1.0, 1.0, 1.0, -3.0).is_err());
        assert_eq!(ProblemParams::new(1.0, 1.0, 10.0).unwrap().sigma0, 300.0);
    }
}
