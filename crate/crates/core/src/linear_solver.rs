//! Sparse complex solves: direct LU (faer) or unpreconditioned BiCGStab.

use std::time::Instant;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::assembly::ComplexSparseSystem;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverMethod {
    /// Sparse LU with partial pivoting.
    Direct,
    /// BiCGStab without preconditioning.
    BiCgStab { max_iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: SolverMethod,
    /// Largest acceptable relative residual `|b - Ax| / |b|`.
    pub tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: SolverMethod::Direct, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<C64>,
    pub relative_residual: f64,
    /// Nonzeros of the system matrix.
    pub nnz: usize,
    /// Iterations taken (iterative methods only).
    pub iterations: Option<usize>,
    pub seconds: f64,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|b - A x| / |b|` (absolute residual when `b = 0`).
pub fn relative_residual(system: &ComplexSparseSystem, x: &[C64]) -> f64 {
    let ax = system.matrix.mul_vec(x);
    let r: Vec<C64> = system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let nb = norm(&system.rhs);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

/// Sparse LU with the default tolerance.
pub fn solve_direct(system: &ComplexSparseSystem) -> Result<SolveReport> {
    solve(system, &SolverConfig::default())
}

pub fn solve(system: &ComplexSparseSystem, config: &SolverConfig) -> Result<SolveReport> {
    let n = system.dim();
    if system.matrix.nrows != n || system.matrix.ncols != n {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{} but the right-hand side has length {n}",
            system.matrix.nrows, system.matrix.ncols
        )));
    }
    let start = Instant::now();
    let (solution, iterations) = match config.method {
        SolverMethod::Direct => (direct(system)?, None),
        SolverMethod::BiCgStab { max_iterations } => {
            let (x, it) = bicgstab(system, config.tolerance, max_iterations);
            (x, Some(it))
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    if solution.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSystem("solution has non-finite entries".into()));
    }
    let relative_residual = relative_residual(system, &solution);
    if relative_residual.is_nan() || relative_residual > config.tolerance {
        return Err(Error::NotConverged { residual: relative_residual, tolerance: config.tolerance });
    }
    Ok(SolveReport { solution, relative_residual, nnz: system.matrix.nnz(), iterations, seconds })
}

fn direct(system: &ComplexSparseSystem) -> Result<Vec<C64>> {
    let n = system.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let triplets: Vec<Triplet<usize, usize, C64>> =
        system.matrix.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Internal(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::SingularSystem(format!("LU factorization failed: {e:?}")))?;
    let mut b = Mat::<C64>::zeros(n, 1);
    for (i, &v) in system.rhs.iter().enumerate() {
        b[(i, 0)] = v;
    }
    let x = lu.solve(&b);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn bicgstab(system: &ComplexSparseSystem, tol: f64, max_iterations: usize) -> (Vec<C64>, usize) {
    let n = system.dim();
    let a = &system.matrix;
    let zero = C64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let mut r = system.rhs.clone();
    let bnorm = norm(&r).max(f64::MIN_POSITIVE);
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for it in 0..max_iterations {
        if norm(&r) / bnorm <= tol {
            return (x, it);
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() == 0.0 || omega.norm() == 0.0 {
            return (x, it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        v = a.mul_vec(&p);
        alpha = rho / dot(&r_hat, &v);
        let s: Vec<C64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm(&s) / bnorm <= tol {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return (x, it + 1);
        }
        let t = a.mul_vec(&s);
        let tt = dot(&t, &t);
        omega = if tt.norm() > 0.0 { dot(&t, &s) / tt } else { zero };
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    (x, max_iterations)
}
