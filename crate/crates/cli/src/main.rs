//! `realrad`: truncated real radicals and maximum-rank moment matrices from
//! the command line.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use realrad::examples;
use realrad::facialred::ExposingSearch;
use realrad::polysys::system_degree;
use realrad::radical::run_real_radical;
use realrad::report::{history_csv, radical_table, render_table, trace_row, TABLE_HEADER};
use realrad::{
    build_moment_problem, find_exposing_vector, first_exposing_vector, numerical_nullspace, parse_system,
    restrict_operator, solve_max_rank, EigenDecomposition, Error, FRTrace, Polynomial, SolverConfig,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "realrad",
    version,
    about = "Truncated real radicals via maximum-rank moment matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of the degree-bounded real radical of a system.
    Radical {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Apply the completeness test for a real positive-dimensional variety.
        #[arg(long)]
        positive_dim: bool,
    },
    /// Maximum-rank moment matrix of the system as given, via facial reduction.
    Maxrank {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// One auxiliary solve on the face exposed by the coefficient matrix.
    Aux {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Runs the built-in reference systems.
    Examples {
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// System file: polynomials separated by `;` or newlines, `#` comments.
    #[arg(long, value_name = "FILE")]
    system: PathBuf,
    /// Number of variables (x, y, z or x1..xn). Inferred when omitted.
    #[arg(long, value_name = "N")]
    nvars: Option<usize>,
    /// Degree bound. Defaults to the system degree.
    #[arg(long, value_name = "D")]
    degree: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    /// DR residual tolerance.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
    /// DR iteration budget per solve.
    #[arg(long, value_name = "K")]
    max_iters: Option<usize>,
    /// Seed for DR initial points.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Rank tried first for the auxiliary solve of reduction step STEP (≥ 2).
    #[arg(long, value_name = "STEP:R", value_parser = parse_override)]
    rank_override: Vec<(usize, usize)>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Writes the DR residual history as `iter,residual` CSV.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn parse_override(s: &str) -> Result<(usize, usize), String> {
    let (step, rank) = s.split_once(':').ok_or("expected STEP:R")?;
    let step = step.trim().parse().map_err(|e| format!("step: {e}"))?;
    let rank = rank.trim().parse().map_err(|e| format!("rank: {e}"))?;
    Ok((step, rank))
}

/// Failure with its exit code.
enum Failure {
    Input(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut root = &e;
        while let Error::Stage { source, .. } = root {
            root = source;
        }
        match root {
            Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::BadExponent { .. }
            | Error::DegreeOverflow { .. }
            | Error::EmptySystem
            | Error::DegreeTooLow { .. }
            | Error::ZeroCoefficientMatrix
            | Error::Config(_) => Failure::Input(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg.res_tol = t;
        }
        if let Some(k) = self.max_iters {
            cfg.max_dr_iters = k;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.rank_overrides = self.rank_override.clone();
        cfg.validate()?;
        Ok(cfg)
    }

    fn write_trace(&self, history: &[f64]) -> Result<(), Failure> {
        match &self.trace {
            Some(path) => fs::write(path, history_csv(history))
                .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
            None => Ok(()),
        }
    }
}

/// Largest variable count named in `text`: `x`, `y`, `z` count as 1, 2, 3
/// and `xN` as `N`.
fn infer_nvars(text: &str) -> usize {
    let mut n = 1;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        let mut chars = line.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            if !c.is_ascii_alphabetic() {
                continue;
            }
            let mut end = start + c.len_utf8();
            while let Some(&(i, c)) = chars.peek() {
                if !c.is_ascii_alphanumeric() {
                    break;
                }
                end = i + c.len_utf8();
                chars.next();
            }
            let name = &line[start..end];
            let idx = match name {
                "x" => Some(1),
                "y" => Some(2),
                "z" => Some(3),
                _ => name.strip_prefix('x').and_then(|s| s.parse().ok()),
            };
            n = n.max(idx.unwrap_or(0));
        }
    }
    n
}

struct Input {
    polys: Vec<Polynomial<f64>>,
    degree: usize,
}

fn read_system(args: &SystemArgs) -> Result<Input, Failure> {
    let text = fs::read_to_string(&args.system)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.system.display())))?;
    let nvars = args.nvars.unwrap_or_else(|| infer_nvars(&text));
    if nvars == 0 {
        return Err(Failure::Input("--nvars must be at least 1".into()));
    }
    let polys: Vec<Polynomial<f64>> = parse_system(&text, nvars)?;
    if polys.iter().all(Polynomial::is_zero) {
        return Err(Error::EmptySystem.into());
    }
    let degree = args.degree.unwrap_or_else(|| system_degree(&polys).max(1));
    if degree == 0 {
        return Err(Failure::Input("--degree must be at least 1".into()));
    }
    Ok(Input { polys, degree })
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn print_json<S: Serialize>(value: &S) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Failure::Solver(e.to_string()))?;
    emit(&format!("{s}\n"));
    Ok(())
}

fn radical(system: &SystemArgs, solver: &SolverArgs, positive_dim: bool) -> Result<(), Failure> {
    let input = read_system(system)?;
    let cfg = solver.config()?;
    let run = run_real_radical(&input.polys, input.degree, &cfg, positive_dim)?;
    solver.write_trace(&run.history)?;
    match solver.format {
        Format::Table => emit(&radical_table(&run.report)),
        Format::Json => print_json(&run.report)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct MaxRankReport {
    name: String,
    nvars: usize,
    degree: usize,
    #[serde(flatten)]
    trace: FRTrace,
    /// Spectrum of the lifted moment matrix, descending.
    eigenvalues: Vec<f64>,
}

fn max_rank(
    name: &str,
    polys: &[Polynomial<f64>],
    degree: usize,
    cfg: &SolverConfig,
) -> Result<(MaxRankReport, Vec<f64>), Error> {
    let problem = build_moment_problem(polys, degree)?;
    let sol = solve_max_rank(&problem, cfg)?;
    let report = MaxRankReport {
        name: name.to_string(),
        nvars: problem.basis.nvars(),
        degree,
        trace: sol.trace,
        eigenvalues: EigenDecomposition::new(&sol.x).values.iter().copied().collect(),
    };
    Ok((report, sol.history))
}

fn maxrank(system: &SystemArgs, solver: &SolverArgs) -> Result<(), Failure> {
    let input = read_system(system)?;
    let cfg = solver.config()?;
    let (report, history) = max_rank(&file_label(&system.system), &input.polys, input.degree, &cfg)?;
    solver.write_trace(&history)?;
    match solver.format {
        Format::Table => emit(&render_table(&TABLE_HEADER, &[trace_row(&report.name, &report.trace)])),
        Format::Json => print_json(&report)?,
    }
    Ok(())
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(Serialize)]
struct AuxReport {
    /// Dimension of the face exposed by the coefficient matrix.
    face_dim: usize,
    found: bool,
    residual: f64,
    iterations: usize,
    total_iterations: usize,
    rank: usize,
    /// Dimension of the next face when an exposing vector was found.
    next_face_dim: Option<usize>,
}

fn aux(system: &SystemArgs, solver: &SolverArgs) -> Result<(), Failure> {
    let input = read_system(system)?;
    let cfg = solver.config()?;
    let problem = build_moment_problem(&input.polys, input.degree)?;
    let z1 = first_exposing_vector(&problem.coeffs)?;
    let u = numerical_nullspace(&z1, cfg.nullspace_tol);
    if u.ncols() == 0 {
        return Err(Error::FaceCollapsed.into());
    }
    let op = restrict_operator(&problem.op, &u)?.compressed(cfg.compress_tol)?;
    let ExposingSearch {
        z,
        residual,
        iterations,
        total_iterations,
        rank,
        history,
    } = find_exposing_vector(&op, &cfg, 2)?;
    solver.write_trace(&history)?;
    let report = AuxReport {
        face_dim: u.ncols(),
        found: z.is_some(),
        residual,
        iterations,
        total_iterations,
        rank,
        next_face_dim: z.map(|z| numerical_nullspace(&z, cfg.nullspace_tol).ncols()),
    };
    match solver.format {
        Format::Table => {
            let header = [
                "face dim",
                "exposing vector",
                "rank",
                "residual",
                "DR iterations",
                "next face dim",
            ];
            let row = vec![
                report.face_dim.to_string(),
                if report.found { "found" } else { "none" }.to_string(),
                report.rank.to_string(),
                format!("{:.1e}", report.residual),
                report.total_iterations.to_string(),
                report.next_face_dim.map_or("-".into(), |d| d.to_string()),
            ];
            emit(&render_table(&header, &[row]));
        }
        Format::Json => print_json(&report)?,
    }
    Ok(())
}

fn examples(solver: &SolverArgs) -> Result<(), Failure> {
    let cfg = solver.config()?;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = examples::ALL
            .iter()
            .map(|ex| {
                let cfg = &cfg;
                s.spawn(move || max_rank(ex.name, &ex.polys(), ex.degree, cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("example thread panicked"))
            .collect()
    });
    let mut reports = Vec::new();
    let mut history = Vec::new();
    for (ex, res) in examples::ALL.iter().zip(results) {
        let (report, h) = res.map_err(|e| Failure::Solver(format!("{}: {e}", ex.name)))?;
        history.extend(h);
        reports.push(report);
    }
    solver.write_trace(&history)?;
    match solver.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = reports.iter().map(|r| trace_row(&r.name, &r.trace)).collect();
            emit(&render_table(&TABLE_HEADER, &rows));
        }
        Format::Json => print_json(&reports)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Radical {
            system,
            solver,
            positive_dim,
        } => radical(system, solver, *positive_dim),
        Command::Maxrank { system, solver } => maxrank(system, solver),
        Command::Aux { system, solver } => aux(system, solver),
        Command::Examples { solver } => examples(solver),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(1)
        }
    }
}
