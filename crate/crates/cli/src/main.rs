//! `heptainv` — command-line front end for the seven-diagonal (near)
//! Toeplitz inverse toolkit.
//!
//! Exit status: 0 on success, 1 on verification failures, 2 on usage errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heptainv::solver::Forcing;
use heptainv::{
    bound_breakdown, bound_value,
    beam_fixed_point, BeamProblem, SystemSpec, Variant,
};

mod render;

use render::{fmt_f64, write_artifact};

#[derive(Parser)]
#[command(
    name = "heptainv",
    version,
    about = "Explicit inverses, norm bounds and O(n) solvers for two seven-diagonal (near) Toeplitz families"
)]
struct Cli {
    /// Write the command's artifact to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArgs {
    /// Matrix family: `toeplitz` or `near`.
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,

    /// Matrix dimension (n >= 7).
    #[arg(long)]
    n: usize,
}

impl FamilyArgs {
    fn spec(&self) -> Result<SystemSpec, CliError> {
        SystemSpec::new(self.variant, self.n).map_err(usage)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the sequence value γ_k.
    Gamma {
        #[arg(long)]
        k: usize,
        /// Exact integer arithmetic (arbitrary precision) instead of f64.
        #[arg(long)]
        exact: bool,
    },
    /// Emit the system matrix A_n.
    Matrix {
        #[command(flatten)]
        family: FamilyArgs,
        /// Output format.
        #[arg(long, default_value = "dense-csv", value_parser = ["dense-csv", "banded-json"])]
        emit: String,
    },
    /// Closed-form inverse entries of A_n.
    Inverse {
        #[command(flatten)]
        family: FamilyArgs,
        /// Single entry `i,j` (1-based).
        #[arg(long, value_name = "I,J", conflicts_with = "emit")]
        entry: Option<String>,
        /// Emit the full inverse.
        #[arg(long, value_parser = ["dense-csv"])]
        emit: Option<String>,
    },
    /// Closed-form norm bound (optionally with its π-decomposition).
    Bound {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        breakdown: bool,
    },
    /// Sweep n, emitting `n,exact_norm,bound` rows.
    NormSweep {
        /// Matrix family: `toeplitz` or `near`.
        #[arg(long, value_parser = parse_variant)]
        variant: Variant,
        /// Dimensions: comma list and/or `start:stop:step` ranges.
        #[arg(long = "n-list")]
        n_list: String,
        /// Output format.
        #[arg(long, default_value = "csv", value_parser = ["csv"])]
        emit: String,
    },
    /// Solve A x = rhs in O(n).
    Solve {
        #[command(flatten)]
        family: FamilyArgs,
        /// Right-hand side: `ones`, `e1`, or a CSV file (one value per line).
        #[arg(long)]
        rhs: String,
    },
    /// Fixed-point iteration for the clamped-beam problem (near family).
    Beam {
        /// Number of interior grid points (n >= 7).
        #[arg(long)]
        n: usize,
        /// Forcing term: `zero`, `const:<c>`, or `sin-plus-x`.
        #[arg(long)]
        forcing: String,
        /// Physical constant multiplying h^4 f.
        #[arg(long, default_value_t = 6.0)]
        cei: f64,
        /// Stopping tolerance on successive iterates.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Iteration cap.
        #[arg(long = "max-iter", default_value_t = 50)]
        max_iter: usize,
        /// Write the iteration trace (`iter,residual` CSV) to this path.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
    },
    /// Run the oracle verification suite.
    Verify {
        /// `toeplitz`, `near`, or `both`.
        #[arg(long, default_value = "both")]
        variant: String,
        /// Dimensions: comma list and/or `start:stop:step` ranges.
        #[arg(long = "n-list")]
        n_list: String,
        /// Write the JSON report to this path.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
    },
}

/// Command failures split by exit status.
enum CliError {
    /// Bad arguments or inputs — exit 2.
    Usage(String),
    /// A verification or numerical failure — exit 1.
    Failure(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    heptainv::configure_threads_from_env();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output;
    match cli.command {
        Command::Gamma { k, exact } => {
            let body = if exact {
                let table = heptainv::GammaTable::new(k);
                format!("{}\n", table.gamma(k).map_err(usage)?)
            } else {
                format!("{}\n", fmt_f64(gamma_f64(k)))
            };
            write_artifact(&out, &body)
        }
        Command::Matrix { family, emit } => {
            let spec = family.spec()?;
            let body = match emit.as_str() {
                "dense-csv" => matrix_dense_csv(spec),
                "banded-json" => matrix_banded_json(spec)?,
                _ => unreachable!("clap validates emit"),
            };
            write_artifact(&out, &body)
        }
        Command::Inverse {
            family,
            entry,
            emit: _,
        } => {
            let spec = family.spec()?;
            let body = match entry {
                Some(raw) => {
                    let (i, j) = parse_entry(&raw)?;
                    let v = heptainv::a_inv_entry(spec, i, j).map_err(usage)?;
                    format!("{}\n", fmt_f64(v))
                }
                None => {
                    let inv = heptainv::assemble_inverse(spec).map_err(usage)?;
                    let mut s = String::new();
                    for row in inv {
                        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
                        writeln!(s, "{}", line.join(",")).unwrap();
                    }
                    s
                }
            };
            write_artifact(&out, &body)
        }
        Command::Bound { family, breakdown } => {
            let spec = family.spec()?;
            let body = if breakdown {
                let b = bound_breakdown(spec).map_err(usage)?;
                let mut s = String::new();
                writeln!(s, "n,{}", spec.n).unwrap();
                writeln!(s, "bound,{}", fmt_f64(b.bound)).unwrap();
                writeln!(s, "exact_norm,{}", fmt_f64(b.exact_norm)).unwrap();
                writeln!(s, "pi1,{}", fmt_f64(b.pi1)).unwrap();
                writeln!(s, "pi2,{}", fmt_f64(b.pi2)).unwrap();
                writeln!(s, "pi3,{}", fmt_f64(b.pi3)).unwrap();
                writeln!(s, "schur_sum,{}", fmt_f64(b.schur_sum)).unwrap();
                s
            } else {
                format!("{}\n", fmt_f64(bound_value(spec)))
            };
            write_artifact(&out, &body)
        }
        Command::NormSweep {
            variant,
            n_list,
            emit: _,
        } => {
            let ns = parse_n_list(&n_list)?;
            norm_sweep(variant, &ns, &out)
        }
        Command::Solve { family, rhs } => {
            let spec = family.spec()?;
            let rhs = parse_rhs(&rhs, spec.n)?;
            let x = heptainv::solve(spec, &rhs).map_err(usage)?;
            let mut s = String::new();
            for v in x {
                writeln!(s, "{}", fmt_f64(v)).unwrap();
            }
            write_artifact(&out, &s)
        }
        Command::Beam {
            n,
            forcing,
            cei,
            tol,
            max_iter,
            emit,
        } => {
            let (f, lipschitz): (Forcing, Option<f64>) = parse_forcing(&forcing)?;
            let mut problem = BeamProblem::new(n, cei, f).map_err(usage)?;
            if let Some(l) = lipschitz {
                problem = problem.with_lipschitz(l);
            }
            let u0 = vec![0.0; n];
            let trace = beam_fixed_point(&problem, &u0, tol, max_iter).map_err(usage)?;
            if let Some(path) = emit {
                let mut csv = String::from("iter,residual\n");
                for (i, r) in trace.residuals.iter().enumerate() {
                    writeln!(csv, "{},{}", i + 1, fmt_f64(*r)).unwrap();
                }
                std::fs::write(&path, csv)
                    .map_err(|e| failure(format!("writing {}: {e}", path.display())))?;
            }
            let mut s = String::new();
            writeln!(s, "converged,{}", trace.converged).unwrap();
            writeln!(s, "iterations,{}", trace.iterations()).unwrap();
            writeln!(
                s,
                "final_residual,{}",
                fmt_f64(trace.residuals.last().copied().unwrap_or(0.0))
            )
            .unwrap();
            writeln!(s, "predicted_rate,{}", fmt_f64(trace.predicted_rate)).unwrap();
            if lipschitz.is_some() {
                let rho = heptainv::contraction_predictor(&problem).map_err(usage)?;
                writeln!(s, "rho_bound,{}", fmt_f64(rho)).unwrap();
            }
            write_artifact(&out, &s)
        }
        Command::Verify {
            variant,
            n_list,
            emit,
        } => {
            let variants: Vec<Variant> = match variant.as_str() {
                "both" => Variant::ALL.to_vec(),
                other => vec![Variant::parse(other).map_err(usage)?],
            };
            let ns = parse_n_list(&n_list)?;
            let reports = heptainv::full_suite(&variants, &ns).map_err(usage)?;
            if let Some(path) = emit {
                let json = serde_json::to_string_pretty(&reports)
                    .map_err(|e| failure(format!("serializing report: {e}")))?;
                std::fs::write(&path, json)
                    .map_err(|e| failure(format!("writing {}: {e}", path.display())))?;
            }
            let mut s = String::new();
            let mut failed = 0usize;
            for r in &reports {
                let status = if r.pass { "PASS" } else { "FAIL" };
                if !r.pass {
                    failed += 1;
                }
                writeln!(
                    s,
                    "{status} {} :: {} (max_abs={}, max_rel={})",
                    r.case,
                    r.check,
                    fmt_f64(r.max_abs_error),
                    fmt_f64(r.max_rel_error)
                )
                .unwrap();
            }
            writeln!(s, "{} checks, {} failed", reports.len(), failed).unwrap();
            write_artifact(&out, &s)?;
            if failed > 0 {
                return Err(failure(format!("{failed} verification checks failed")));
            }
            Ok(())
        }
    }
}

fn gamma_f64(k: usize) -> f64 {
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    if k == 0 {
        return 0.0;
    }
    for _ in 1..k {
        let next = 8.0 * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn matrix_dense_csv(spec: SystemSpec) -> String {
    let a = heptainv::build_a(spec);
    let mut s = String::new();
    for i in 1..=spec.n {
        let row: Vec<String> = (1..=spec.n).map(|j| a.entry(i, j).to_string()).collect();
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    s
}

#[derive(serde::Serialize)]
struct BandedJson {
    n: usize,
    offsets: Vec<i64>,
    diagonals: Vec<Vec<i64>>,
}

fn matrix_banded_json(spec: SystemSpec) -> Result<String, CliError> {
    let a = heptainv::build_a(spec);
    let hb = a.half_bandwidth() as i64;
    let mut offsets = Vec::new();
    let mut diagonals = Vec::new();
    for off in -hb..=hb {
        offsets.push(off);
        diagonals.push(a.diagonals()[off.unsigned_abs() as usize].clone());
    }
    let doc = BandedJson {
        n: spec.n,
        offsets,
        diagonals,
    };
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| failure(format!("serializing matrix: {e}")))
}

fn norm_sweep(variant: Variant, ns: &[usize], out: &Option<PathBuf>) -> Result<(), CliError> {
    let rows = heptainv::bounds::norm_sweep_rows(variant, ns).map_err(usage)?;
    let mut s = String::from("n,exact_norm,bound\n");
    let mut violations = 0usize;
    for (n, exact, bound) in &rows {
        writeln!(s, "{},{},{}", n, fmt_f64(*exact), fmt_f64(*bound)).unwrap();
        if exact > bound {
            violations += 1;
            eprintln!("DOMINANCE VIOLATION at n={n}: exact {exact} > bound {bound}");
        }
        if *n >= 50 && bound / exact > 10.0 {
            eprintln!("note: bound/exact ratio {} exceeds 10 at n={n}", bound / exact);
        }
    }
    write_artifact(out, &s)?;
    if violations > 0 {
        return Err(failure(format!("{violations} bound dominance violations")));
    }
    Ok(())
}

fn parse_entry(raw: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 2 {
        return Err(usage(format!("--entry expects `i,j`, got `{raw}`")));
    }
    let i = parts[0].trim().parse::<usize>().map_err(usage)?;
    let j = parts[1].trim().parse::<usize>().map_err(usage)?;
    Ok((i, j))
}

/// `start:stop:step` ranges (inclusive) and comma lists, e.g. `7,8,16` or
/// `7:512:5` or `7,10:20:2`.
fn parse_n_list(raw: &str) -> Result<Vec<usize>, CliError> {
    let mut ns = Vec::new();
    for item in raw.split(',').filter(|s| !s.is_empty()) {
        if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(usage(format!(
                    "range `{item}` must be start:stop:step"
                )));
            }
            let start = parts[0].trim().parse::<usize>().map_err(usage)?;
            let stop = parts[1].trim().parse::<usize>().map_err(usage)?;
            let step = parts[2].trim().parse::<usize>().map_err(usage)?;
            if step == 0 {
                return Err(usage("range step must be positive"));
            }
            let mut n = start;
            while n <= stop {
                ns.push(n);
                n += step;
            }
        } else {
            ns.push(item.trim().parse::<usize>().map_err(usage)?);
        }
    }
    if ns.is_empty() {
        return Err(usage("empty n-list"));
    }
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

fn parse_rhs(raw: &str, n: usize) -> Result<Vec<f64>, CliError> {
    match raw {
        "ones" => Ok(vec![1.0; n]),
        "e1" => {
            let mut v = vec![0.0; n];
            v[0] = 1.0;
            Ok(v)
        }
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("reading rhs file {path}: {e}")))?;
            let vals: Result<Vec<f64>, _> = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::parse::<f64>)
                .collect();
            let vals = vals.map_err(|e| usage(format!("parsing rhs file {path}: {e}")))?;
            if vals.len() != n {
                return Err(usage(format!(
                    "rhs file has {} values, expected {n}",
                    vals.len()
                )));
            }
            Ok(vals)
        }
    }
}

fn parse_forcing(raw: &str) -> Result<(Forcing, Option<f64>), CliError> {
    if raw == "zero" {
        return Ok((Box::new(|_, _| 0.0), Some(0.0)));
    }
    if raw == "sin-plus-x" {
        return Ok((Box::new(|x: f64, u: f64| u.sin() + x), Some(1.0)));
    }
    if let Some(c) = raw.strip_prefix("const:") {
        let c: f64 = c.parse().map_err(usage)?;
        return Ok((Box::new(move |_, _| c), Some(0.0)));
    }
    Err(usage(format!(
        "unknown forcing `{raw}` (expected zero, const:<c>, sin-plus-x)"
    )))
}
