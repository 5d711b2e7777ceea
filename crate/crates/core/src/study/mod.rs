//! Convergence studies over a sequence of uniformly refined meshes.

pub mod config;
pub mod problem;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{parse_n_list, ProblemKind, StudyConfig, REFERENCE_R0};
pub use problem::{manufactured_problem, RadialProblem, SineProblem, TestProblem};

use crate::assembly::{assemble_parts, AssembledParts, ComplexSparseSystem, ProblemParams};
use crate::error::Result;
use crate::ife_basis::FeSpace;
use crate::interface_geom::{classify_elements, Circle, HypothesisReport};
use crate::linear_solver::{solve, SolveReport};
use crate::mesh::Mesh;
use crate::norms::{convergence_rates, error_norms, ErrorRecord, NormOptions, RateRow};

/// Everything produced for one mesh size.
pub struct MeshRun {
    pub mesh: Mesh,
    pub interface: Circle,
    pub hypotheses: HypothesisReport,
    pub space: FeSpace,
    pub params: ProblemParams,
    pub parts: AssembledParts,
    pub system: ComplexSparseSystem,
    pub solve: SolveReport,
    pub record: ErrorRecord,
}

impl StudyConfig {
    pub fn params(&self) -> Result<ProblemParams> {
        ProblemParams::with_sigma0(self.k, self.beta_minus, self.beta_plus, self.sigma0())
    }

    pub fn interface(&self) -> Circle {
        Circle::new(self.center, self.r0)
    }

    /// The exact solution and data selected by the configuration.
    pub fn test_problem(&self) -> Result<Box<dyn TestProblem>> {
        Ok(match self.problem {
            ProblemKind::RadialAlpha => {
                Box::new(RadialProblem::new(self.alpha, self.r0, self.center, self.beta_minus, self.beta_plus, self.k)?)
            }
            ProblemKind::Sine => Box::new(SineProblem { beta: self.beta_minus, k: self.k }),
        })
    }

    pub fn norm_options(&self) -> NormOptions {
        NormOptions { volume_order: self.orders.volume, edge_order: self.orders.edge, depth: self.norm_depth }
    }
}

/// Mesh, classify, build shapes, assemble, solve and measure for one `n`.
/// Errors are tagged with the failing stage.
pub fn run_mesh(config: &StudyConfig, n: usize) -> Result<MeshRun> {
    let params = config.params().map_err(|e| e.at_stage("configure", n))?;
    let problem = config.test_problem().map_err(|e| e.at_stage("configure", n))?;
    let interface = config.interface();
    let mesh = Mesh::cartesian(config.domain, n, config.element_type).map_err(|e| e.at_stage("mesh", n))?;
    let classes = classify_elements(&mesh, &interface).map_err(|e| e.at_stage("classify", n))?;
    let space =
        FeSpace::ife(&mesh, &classes, params.beta_minus, params.beta_plus).map_err(|e| e.at_stage("basis", n))?;
    let parts = assemble_parts(&mesh, &interface, &space, &params, problem.as_ref(), config.orders)
        .map_err(|e| e.at_stage("assemble", n))?;
    let system = parts.system(params.k);
    if let Some(path) = &config.dump_matrix {
        dump_matrix(path, n, &system).map_err(|e| e.at_stage("dump", n))?;
    }
    let report = solve(&system, &config.solver).map_err(|e| e.at_stage("solve", n))?;
    let mut record =
        error_norms(&mesh, &interface, &space, &report.solution, problem.as_ref(), &params, &config.norm_options())
            .map_err(|e| e.at_stage("error_norms", n))?;
    record.residual = report.relative_residual;
    record.solve_seconds = report.seconds;
    Ok(MeshRun { mesh, interface, hypotheses: classes.report, space, params, parts, system, solve: report, record })
}

/// `path` with `_N<n>` inserted before its extension.
pub fn per_mesh_path(path: &Path, n: usize) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_N{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}_N{n}"),
    };
    path.with_file_name(name)
}

fn dump_matrix(path: &Path, n: usize, system: &ComplexSparseSystem) -> Result<()> {
    let mut w = BufWriter::new(File::create(per_mesh_path(path, n))?);
    system.matrix.write_coordinate(&mut w)?;
    w.flush()?;
    Ok(())
}

pub struct ConvergenceReport {
    pub config: StudyConfig,
    pub records: Vec<ErrorRecord>,
    pub rates: Vec<RateRow>,
    pub total_seconds: f64,
}

/// Run every mesh size of the configuration in order, then write the CSV
/// if an output path is set.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    run_study_with(config, |_| {})
}

/// Like [`run_study`], calling `progress` after each mesh.
pub fn run_study_with(config: &StudyConfig, mut progress: impl FnMut(&ErrorRecord)) -> Result<ConvergenceReport> {
    config.validate()?;
    let start = Instant::now();
    let mut records = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let run = run_mesh(config, n)?;
        progress(&run.record);
        records.push(run.record);
    }
    let rates = convergence_rates(&records)?;
    let report =
        ConvergenceReport { config: config.clone(), records, rates, total_seconds: start.elapsed().as_secs_f64() };
    if let Some(path) = &config.output {
        let mut w = BufWriter::new(File::create(path)?);
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(report)
}

pub const CSV_HEADER: &str = "N,h,dofs,L2_err,L2_rate,H1_err,H1_rate,energy_err,energy_rate,residual,solve_seconds";

/// Mantissa with four decimals and a signed two-digit exponent: `1.3425e-03`.
pub fn format_error(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.4e}");
    }
    let s = format!("{x:.4e}");
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub fn format_rate(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.4}")).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        let opt = |r: Option<f64>| r.map(|r| format!("{r:e}")).unwrap_or_default();
        for (r, rate) in self.records.iter().zip(&self.rates) {
            writeln!(
                w,
                "{},{:e},{},{:e},{},{:e},{},{:e},{},{:e},{:e}",
                r.n,
                r.h,
                r.dofs,
                r.l2,
                opt(rate.l2),
                r.h1_semi,
                opt(rate.h1),
                r.energy,
                opt(rate.energy),
                r.residual,
                r.solve_seconds
            )?;
        }
        Ok(())
    }

    /// Console table of errors and rates.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>6} {:>9} {:>12} {:>8} {:>12} {:>8} {:>12} {:>8} {:>10}",
            "N", "dofs", "L2 error", "rate", "H1 error", "rate", "energy", "rate", "residual"
        );
        for (r, rate) in self.records.iter().zip(&self.rates) {
            let _ = writeln!(
                s,
                "{:>6} {:>9} {:>12} {:>8} {:>12} {:>8} {:>12} {:>8} {:>10.1e}",
                r.n,
                r.dofs,
                format_error(r.l2),
                format_rate(rate.l2),
                format_error(r.h1_semi),
                format_rate(rate.h1),
                format_error(r.energy),
                format_rate(rate.energy),
                r.residual
            );
        }
        s
    }
}
