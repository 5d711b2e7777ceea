use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use ppife::study::{format_error, parse_n_list, run_study_with, StudyConfig};
use ppife::ElementType;

/// Convergence study of the symmetric PPIFE method for a Helmholtz
/// interface problem on uniform Cartesian meshes.
#[derive(Parser, Debug)]
#[command(version, about, allow_negative_numbers = true)]
struct Cli {
    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mesh sizes, each double the previous (e.g. `10,20,40`).
    #[arg(long = "N", value_name = "LIST")]
    n_list: Option<String>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    beta_minus: Option<f64>,
    #[arg(long)]
    beta_plus: Option<f64>,
    /// Edge penalty; defaults to 30 max(beta-, beta+).
    #[arg(long)]
    sigma0: Option<f64>,
    /// `tri` or `rect`.
    #[arg(long)]
    element_type: Option<ElementType>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Radius of the circular interface.
    #[arg(long)]
    r0: Option<f64>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (1 gives bit-reproducible runs).
    #[arg(long)]
    threads: Option<usize>,
    /// Write each system matrix in coordinate form to PATH with `_N<n>` appended.
    #[arg(long, value_name = "PATH")]
    dump_matrix: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<StudyConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            StudyConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => StudyConfig::default(),
    };
    if let Some(list) = &cli.n_list {
        cfg.n_list = parse_n_list(list)?;
    }
    if let Some(v) = cli.k {
        cfg.k = v;
    }
    if let Some(v) = cli.beta_minus {
        cfg.beta_minus = v;
    }
    if let Some(v) = cli.beta_plus {
        cfg.beta_plus = v;
    }
    if cli.sigma0.is_some() {
        cfg.sigma0 = cli.sigma0;
    }
    if let Some(v) = cli.element_type {
        cfg.element_type = v;
    }
    if let Some(v) = cli.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = cli.r0 {
        cfg.r0 = v;
    }
    if cli.out.is_some() {
        cfg.output = cli.out.clone();
    }
    if cli.dump_matrix.is_some() {
        cfg.dump_matrix = cli.dump_matrix.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = build_config(&cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().context("building thread pool")?;

    println!(
        "{} mesh, k = {}, beta = ({}, {}), sigma0 = {}, r0 = {}",
        cfg.element_type,
        cfg.k,
        cfg.beta_minus,
        cfg.beta_plus,
        cfg.sigma0(),
        cfg.r0
    );
    let report = pool.install(|| {
        run_study_with(&cfg, |r| {
            eprintln!(
                "N = {:>5}: L2 {}  H1 {}  ({:.2}s solve)",
                r.n,
                format_error(r.l2),
                format_error(r.h1_semi),
                r.solve_seconds
            )
        })
    })?;
    print!("{}", report.table());
    println!("total {:.2}s", report.total_seconds);
    if let Some(path) = &cfg.output {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
