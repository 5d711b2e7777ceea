//! Symmetric partially penalized immersed finite elements (PPIFE) for
//! Helmholtz interface problems
//!
//! ```text
//!   -div(beta grad u) - k^2 u = f      in  Omega- and Omega+
//!   beta du/dn + i k u        = g      on  the outer boundary
//!   [u] = 0,  [beta du/dn] = 0         across the interface
//! ```
//!
//! on uniform Cartesian triangular or rectangular meshes that do not fit the
//! interface. The interface is described by a level set; elements it cuts
//! carry piecewise linear (or bilinear) IFE shape functions, and the scheme
//! adds flux-consistency and penalty terms on the edges of those elements.
//!
//! The pipeline for one mesh is
//! [`Mesh::cartesian`] → [`classify_elements`] → [`FeSpace::ife`] →
//! [`assemble`] → [`solve`] → [`error_norms`]; [`study::run_study`] strings
//! it together over a sequence of refinements.

pub mod assembly;
mod dense;
pub mod error;
pub mod geometry;
pub mod ife_basis;
pub mod interface_geom;
pub mod linear_solver;
pub mod mesh;
pub mod norms;
pub mod quadrature;
pub mod sparse;
pub mod study;

pub use assembly::{
    assemble, assemble_parts, AssembledParts, ComplexSparseSystem, ProblemData, ProblemParams, QuadratureOrders,
};
pub use error::{Error, Result};
pub use geometry::Point;
pub use ife_basis::{ElementBasis, FeSpace, LocalIfeBasis, Shape};
pub use interface_geom::{
    classify_elements, Circle, CutElementGeometry, ElementClass, InterfaceClassification, LevelSet, LineLevelSet, Side,
};
pub use linear_solver::{solve, SolveReport, SolverConfig, SolverMethod};
pub use mesh::{Domain, ElementType, Mesh};
pub use norms::{convergence_rates, error_norms, ErrorRecord, ExactSolution, NormOptions};
pub use sparse::SparseMatrix;
pub use study::{run_study, ConvergenceReport, StudyConfig};

/// Double-precision complex scalar used for all discrete unknowns.
pub type C64 = num_complex::Complex64;
