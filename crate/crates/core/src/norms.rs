//! Discretization errors against a side-aware exact solution.
//!
//! With `e = u - u_h`:
//!
//! ```text
//!   |e|_h^2   = sum_T int_T beta |grad e|^2 + sum_e sigma0/|e| int_e |[u_h]|^2
//!   |||e|||_h^2 = |e|_h^2 + sum_e |e|/sigma0 int_e |{beta grad e . n}|^2
//!   |||e|||_H^2 = |||e|||_h^2 + k^2 |e|_{L2}^2
//! ```
//!
//! Edge sums run over the penalized edges of the space. The exact solution
//! is continuous across the interface, so `[e] = -[u_h]` on every edge.

use rayon::prelude::*;

use crate::assembly::{edge_traces, ProblemParams};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ife_basis::{ElementBasis, FeSpace};
use crate::interface_geom::{LevelSet, Side};
use crate::mesh::Mesh;
use crate::quadrature::{curved_cut_rule, element_rule};
use crate::C64;

/// An exact solution given piecewise on the two sides of the interface.
pub trait ExactSolution: Sync {
    fn value(&self, p: Point, side: Side) -> C64;
    /// `None` if no gradient is available.
    fn gradient(&self, p: Point, side: Side) -> Option<[C64; 2]>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    pub volume_order: usize,
    pub edge_order: usize,
    /// Subdivision depth for sub-triangles the curved interface crosses.
    pub depth: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { volume_order: 4, edge_order: 4, depth: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub l2: f64,
    /// Broken `H^1` seminorm.
    pub h1_semi: f64,
    pub energy_h: f64,
    pub energy_tri_h: f64,
    /// `|||e|||_H`, the norm of the error analysis.
    pub energy: f64,
    pub residual: f64,
    pub solve_seconds: f64,
}

#[derive(Default, Clone, Copy)]
struct Sums {
    l2: f64,
    h1: f64,
    weighted_h1: f64,
    jump: f64,
    flux: f64,
}

impl std::ops::Add for Sums {
    type Output = Sums;
    fn add(self, o: Sums) -> Sums {
        Sums {
            l2: self.l2 + o.l2,
            h1: self.h1 + o.h1,
            weighted_h1: self.weighted_h1 + o.weighted_h1,
            jump: self.jump + o.jump,
            flux: self.flux + o.flux,
        }
    }
}

fn gradient(exact: &dyn ExactSolution, p: Point, side: Side) -> Result<[C64; 2]> {
    exact.gradient(p, side).ok_or_else(|| Error::InvalidArgument("exact solution has no gradient".into()))
}

fn element_sums(
    mesh: &Mesh,
    ls: &dyn LevelSet,
    space: &FeSpace,
    coeffs: &[C64],
    exact: &dyn ExactSolution,
    opts: &NormOptions,
    el: usize,
) -> Result<Sums> {
    let basis = &space.bases[el];
    let rule = match basis {
        ElementBasis::Standard { vertices, .. } => element_rule(vertices, opts.volume_order)?,
        ElementBasis::Ife(b) => curved_cut_rule(&b.geometry, ls, opts.volume_order, opts.depth)?,
    };
    let mut s = Sums::default();
    for q in &rule.points {
        let true_side = ls.side(q.point);
        let piece = q.side.unwrap_or_else(|| basis.side_at(q.point));
        let (uh, guh) = space.eval(mesh, coeffs, el, q.point, piece);
        let u = exact.value(q.point, true_side);
        let gu = gradient(exact, q.point, true_side)?;
        let g2 = (gu[0] - guh[0]).norm_sqr() + (gu[1] - guh[1]).norm_sqr();
        s.l2 += q.weight * (u - uh).norm_sqr();
        s.h1 += q.weight * g2;
        s.weighted_h1 += q.weight * space.beta(true_side) * g2;
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn edge_sums(
    mesh: &Mesh,
    ls: &dyn LevelSet,
    space: &FeSpace,
    coeffs: &[C64],
    exact: &dyn ExactSolution,
    params: &ProblemParams,
    opts: &NormOptions,
    slot: usize,
) -> Result<Sums> {
    let tr = edge_traces(mesh, space, slot, opts.edge_order)?;
    let e = space.interface_edges[slot];
    let edge = &mesh.edges[e];
    let second = edge.second.expect("penalized edges are interior");
    let pen = params.sigma0 / tr.length;
    let fluxw = if params.sigma0 > 0.0 { tr.length / params.sigma0 } else { 0.0 };
    let mut s = Sums::default();
    for (q, &(x, w)) in tr.points.iter().enumerate() {
        let jump: C64 = tr.jumps[q].iter().zip(&tr.dofs).map(|(&j, &g)| coeffs[g] * j).sum();
        let true_side = ls.side(x);
        let beta = space.beta(true_side);
        let gu = gradient(exact, x, true_side)?;
        let mut avg = C64::new(0.0, 0.0);
        for el in [edge.first, second] {
            let (_, guh) = space.eval(mesh, coeffs, el, x, space.bases[el].side_at(x));
            avg += ((gu[0] - guh[0]) * tr.normal.x + (gu[1] - guh[1]) * tr.normal.y) * (0.5 * beta);
        }
        s.jump += w * pen * jump.norm_sqr();
        s.flux += w * fluxw * avg.norm_sqr();
    }
    Ok(s)
}

/// All error norms of `u - u_h`, where `u_h` has nodal values `coeffs`.
/// `residual` and `solve_seconds` of the record are left at zero.
pub fn error_norms(
    mesh: &Mesh,
    ls: &dyn LevelSet,
    space: &FeSpace,
    coeffs: &[C64],
    exact: &dyn ExactSolution,
    params: &ProblemParams,
    opts: &NormOptions,
) -> Result<ErrorRecord> {
    if coeffs.len() != mesh.num_nodes() {
        return Err(Error::InvalidArgument(format!("{} coefficients for {} nodes", coeffs.len(), mesh.num_nodes())));
    }
    let vol = (0..mesh.num_elements())
        .into_par_iter()
        .map(|el| element_sums(mesh, ls, space, coeffs, exact, opts, el))
        .collect::<Result<Vec<_>>>()?;
    let edges = (0..space.interface_edges.len())
        .into_par_iter()
        .map(|slot| edge_sums(mesh, ls, space, coeffs, exact, params, opts, slot))
        .collect::<Result<Vec<_>>>()?;
    let s = vol.into_iter().chain(edges).fold(Sums::default(), |a, b| a + b);
    let energy_h2 = s.weighted_h1 + s.jump;
    let tri_h2 = energy_h2 + s.flux;
    Ok(ErrorRecord {
        n: mesh.n,
        h: mesh.h(),
        dofs: mesh.num_nodes(),
        l2: s.l2.sqrt(),
        h1_semi: s.h1.sqrt(),
        energy_h: energy_h2.sqrt(),
        energy_tri_h: tri_h2.sqrt(),
        energy: (tri_h2 + params.k * params.k * s.l2).sqrt(),
        residual: 0.0,
        solve_seconds: 0.0,
    })
}

/// Observed orders between consecutive records; `None` on the first row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateRow {
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub energy: Option<f64>,
}

/// `log2(coarse / fine)`.
pub fn rate(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Rates per norm for records whose `n` doubles from one to the next.
pub fn convergence_rates(records: &[ErrorRecord]) -> Result<Vec<RateRow>> {
    let mut rows = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if i == 0 {
            rows.push(RateRow::default());
            continue;
        }
        let p = &records[i - 1];
        if r.n != 2 * p.n {
            return Err(Error::InvalidArgument(format!("refinement {} -> {} does not double", p.n, r.n)));
        }
        rows.push(RateRow {
            l2: Some(rate(p.l2, r.l2)),
            h1: Some(rate(p.h1_semi, r.h1_semi)),
            energy: Some(rate(p.energy, r.energy)),
        });
    }
    Ok(rows)
}
