//! Command-line interface: construct certified polynomials/tensors,
//! re-verify files from scratch, list eigenpairs, compute best rank-one
//! approximations and export plot grids.
//!
//! Exit codes: 0 success, 1 certification failure, 2 bad input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eigenreal::construct::{construct, ConstructError, ConstructionParams};
use eigenreal::io::{self, ConstructionDoc, InputDoc};
use eigenreal::poly::HomogeneousPolynomial;
use eigenreal::solver::{self, SolveReport, SolverConfig};
use eigenreal::tensor::{best_rank_one, poly_to_tensor, tensor_to_poly, SymmetricTensor};

const EXIT_CERT_FAILURE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "eigenreal", version, about = "Symmetric tensors with only real eigenpoints: construction and certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolveFlags {
    /// Newton starts per expected critical point.
    #[arg(long, default_value_t = 50)]
    starts: usize,
    /// Seed for all randomness.
    #[arg(long, default_value_t = solver::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the certified polynomial/tensor for the given degree and dimension.
    Construct {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps_start: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps_floor: f64,
        #[arg(long, default_value_t = solver::DEFAULT_SEED)]
        seed: u64,
        /// Output file for the construction result (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-certify a polynomial, tensor or construction file from scratch.
    Verify {
        path: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Like verify, additionally listing the eigenpairs.
    Eigen {
        path: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Best rank-one approximation of a certified tensor.
    Rank1 {
        path: PathBuf,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Export |f| on a θ/φ grid over S² with critical-point markers.
    Plotdata {
        path: PathBuf,
        #[arg(long, default_value_t = 90)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Construct { d, n, eps_start, eps_floor, seed, out } => {
            cmd_construct(d, n, eps_start, eps_floor, seed, out)
        }
        Command::Verify { path, solve } => cmd_verify(&path, &solve, false),
        Command::Eigen { path, solve } => cmd_verify(&path, &solve, true),
        Command::Rank1 { path, solve } => cmd_rank1(&path, &solve),
        Command::Plotdata { path, grid, out, solve } => cmd_plotdata(&path, grid, out, &solve),
    }
}

fn solver_config(flags: &SolveFlags) -> SolverConfig {
    SolverConfig {
        starts_per_expected_point: flags.starts,
        seed: flags.seed,
        ..SolverConfig::default()
    }
}

fn cmd_construct(
    d: u32,
    n: usize,
    eps_start: f64,
    eps_floor: f64,
    seed: u64,
    out: Option<PathBuf>,
) -> ExitCode {
    let mut params = ConstructionParams::new(d, n);
    params.eps_start = eps_start;
    params.eps_floor = eps_floor;
    params.seed = seed;
    match construct(&params) {
        Ok(result) => {
            for level in &result.levels {
                let eps = level
                    .epsilon
                    .map(|e| format!(", epsilon {e}"))
                    .unwrap_or_default();
                println!(
                    "level n={}: {}/{} critical points certified{eps} (min margin {:.3e}, max residual {:.3e})",
                    level.n,
                    level.certificate.count,
                    level.certificate.expected,
                    level.certificate.min_margin,
                    level.certificate.max_residual,
                );
            }
            if let Some(path) = out {
                let doc = ConstructionDoc::from_result(&result);
                if let Err(e) = io::write_json(&path, &doc) {
                    eprintln!("failed to write {}: {e}", path.display());
                    return ExitCode::from(EXIT_BAD_INPUT);
                }
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ ConstructError::Argument(_)) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CERT_FAILURE)
        }
    }
}

/// Polynomials to re-certify from a parsed input document, with the level
/// label they came from.
fn polynomials_of(doc: &InputDoc) -> Result<Vec<(String, HomogeneousPolynomial)>, String> {
    match doc {
        InputDoc::Construction(c) => c
            .levels
            .iter()
            .map(|l| {
                l.polynomial
                    .to_poly()
                    .map(|p| (format!("level n={}", l.n), p))
                    .map_err(|e| e.to_string())
            })
            .collect(),
        InputDoc::Poly(p) => Ok(vec![("polynomial".into(), p.to_poly().map_err(|e| e.to_string())?)]),
        InputDoc::Tensor(t) => {
            let tensor = t.to_tensor().map_err(|e| e.to_string())?;
            Ok(vec![("tensor".into(), tensor_to_poly(&tensor))])
        }
    }
}

fn index_census(report: &SolveReport) -> String {
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &report.points {
        *census.entry(p.morse_index).or_insert(0) += 1;
    }
    census
        .iter()
        .map(|(i, c)| format!("index {i}: {c}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_verify(path: &PathBuf, flags: &SolveFlags, list_pairs: bool) -> ExitCode {
    let doc = match io::read_input(path) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let polys = match polynomials_of(&doc) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("invalid input: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let cfg = solver_config(flags);
    let mut all_certified = true;
    for (label, f) in polys {
        let report = match solver::find_critical_points(&f, &cfg) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{label}: {e}");
                return ExitCode::from(EXIT_BAD_INPUT);
            }
        };
        let status = if report.certified { "certified" } else { "NOT certified" };
        println!(
            "{label}: {}/{} {status}; {}; euler sum {}",
            report.found_count,
            report.expected_count,
            index_census(&report),
            report.euler_sum
        );
        if !report.certified {
            println!("{label}: {}", report.diagnostics);
            all_certified = false;
        }
        if list_pairs && report.certified {
            let a = poly_to_tensor(&f);
            match solver::certify(&report, &a) {
                Ok(pairs) => {
                    for p in &pairs {
                        println!(
                            "  lambda {:+.12e}  x {:?}  residual {:.3e}",
                            p.lambda, p.x, p.residual
                        );
                    }
                }
                Err(e) => {
                    eprintln!("{label}: {e}");
                    all_certified = false;
                }
            }
        }
    }
    if all_certified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CERT_FAILURE)
    }
}

/// Tensor plus polynomial view of any input document; for construction
/// files the final level is used.
fn tensor_of(doc: &InputDoc) -> Result<(SymmetricTensor, HomogeneousPolynomial), String> {
    match doc {
        InputDoc::Construction(c) => {
            let last = c.levels.last().ok_or("construction file has no levels")?;
            let f = last.polynomial.to_poly().map_err(|e| e.to_string())?;
            Ok((poly_to_tensor(&f), f))
        }
        InputDoc::Poly(p) => {
            let f = p.to_poly().map_err(|e| e.to_string())?;
            Ok((poly_to_tensor(&f), f))
        }
        InputDoc::Tensor(t) => {
            let tensor = t.to_tensor().map_err(|e| e.to_string())?;
            let f = tensor_to_poly(&tensor);
            Ok((tensor, f))
        }
    }
}

fn cmd_rank1(path: &PathBuf, flags: &SolveFlags) -> ExitCode {
    let doc = match io::read_input(path) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let (tensor, f) = match tensor_of(&doc) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("invalid input: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let cfg = solver_config(flags);
    let report = match solver::find_critical_points(&f, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    if !report.certified {
        eprintln!("input is not certified: {}", report.diagnostics);
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let pairs = match solver::certify(&report, &tensor) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CERT_FAILURE);
        }
    };
    match best_rank_one(&tensor, &pairs) {
        Ok(r) => {
            println!("best lambda {:+.12e}", r.lambda);
            println!("x* {:?}", r.x);
            println!("dist {:.12e} (direct {:.12e})", r.dist, r.dist_direct);
            if r.tie {
                println!("note: |lambda| tie, lexicographically smallest x chosen");
            }
            let mut table: Vec<_> = pairs.iter().map(|p| p.canonical(tensor.order())).collect();
            table.sort_by(|a, b| {
                b.lambda
                    .abs()
                    .partial_cmp(&a.lambda.abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            table.dedup_by(|a, b| {
                a.x.iter()
                    .zip(&b.x)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum::<f64>()
                    .sqrt()
                    < 1e-8
            });
            println!("eigenvalue table ({} antipodal classes):", table.len());
            for p in &table {
                println!("  lambda {:+.12e}  x {:?}", p.lambda, p.x);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_CERT_FAILURE)
        }
    }
}

fn cmd_plotdata(path: &PathBuf, grid: usize, out: Option<PathBuf>, flags: &SolveFlags) -> ExitCode {
    if grid == 0 {
        eprintln!("--grid must be positive");
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let doc = match io::read_input(path) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    let (_, f) = match tensor_of(&doc) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("invalid input: {e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    };
    if f.n_vars() != 3 {
        eprintln!("plot export is 2-sphere only (polynomial has {} variables)", f.n_vars());
        return ExitCode::from(EXIT_BAD_INPUT);
    }
    let mut text = String::from("theta phi absf\n");
    let pi = std::f64::consts::PI;
    for i in 0..grid {
        let theta = if grid == 1 { 0.0 } else { i as f64 * pi / (grid - 1) as f64 };
        for j in 0..2 * grid {
            let phi = j as f64 * pi / grid as f64;
            let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let v = f.eval(&x).unwrap().abs();
            text.push_str(&format!("{theta:.12e} {phi:.12e} {v:.12e}\n"));
        }
    }
    let cfg = solver_config(flags);
    match solver::find_critical_points(&f, &cfg) {
        Ok(report) => {
            text.push_str("# critical_points x1 x2 x3 value morse_index\n");
            for p in &report.points {
                text.push_str(&format!(
                    "{:.17e} {:.17e} {:.17e} {:.12e} {}\n",
                    p.x[0], p.x[1], p.x[2], p.value, p.morse_index
                ));
            }
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_BAD_INPUT);
        }
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("failed to write {}: {e}", path.display());
                return ExitCode::from(EXIT_BAD_INPUT);
            }
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
