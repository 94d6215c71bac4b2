//! `utm` — half-line evolution-system solver front end.
//!
//! Modes: `solve` writes a solution CSV; `verify` also runs the independent
//! finite-difference oracle and writes an agreement report; `inspect` writes
//! a report on branches, symmetries, the inaccessible region, and the number
//! of boundary conditions the problem needs.
//!
//! Exit codes: 0 success, 1 config error, 2 unsupported case, 3 tolerance
//! failure beyond a threshold fraction of grid points.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::ProblemConfig;
use utm_core::symmetry::find_symmetries;
use utm_core::{
    count_required_bcs, fd_reference, generic_solve, in_d_plus, pde_residual, solve_fn_neumann,
    solve_kg_dirichlet, solve_wave_family, BVProblem, BoundaryKind, BranchSet, FDConfig, Grid,
    Region, SolutionField, UtmError,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_UNSUPPORTED: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

/// Fraction of grid points allowed to miss the tolerance before the run is
/// reported as a tolerance failure.
const FAILURE_FRACTION: f64 = 0.1;

#[derive(Parser)]
#[command(name = "utm", version, about = "Contour-integral solver for half-line evolution systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the solution on the configured grid and write a CSV
    Solve(RunArgs),
    /// Solve, run the finite-difference oracle, and write an agreement report
    Verify(RunArgs),
    /// Report branches, symmetries, D+ geometry, and boundary-condition count
    Inspect(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem description (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output path; verify and inspect derive sibling files from it
    #[arg(long)]
    out: PathBuf,
    /// Override the tolerance from the config
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads (default: UTM_WORKERS, then available parallelism)
    #[arg(long)]
    workers: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

fn solver_failure(e: UtmError) -> Failure {
    let code = match e {
        UtmError::InvalidData(_) | UtmError::BoundaryCountMismatch { .. } => EXIT_CONFIG,
        _ => EXIT_UNSUPPORTED,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Solve(a) => ("solve", a),
        Command::Verify(a) => ("verify", a),
        Command::Inspect(a) => ("inspect", a),
    };
    match run(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("utm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(mode: &str, args: &RunArgs) -> Result<(), Failure> {
    init_workers(args.workers)?;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = ProblemConfig::parse(&text).map_err(Failure::config)?;
    if let Some(declared) = &cfg.mode {
        if declared != mode {
            return Err(Failure::config(format!(
                "config declares mode '{declared}' but the '{mode}' subcommand was invoked"
            )));
        }
    }
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(Failure::config("--tol must be positive"));
        }
    }
    let problem = cfg.problem(args.tol).map_err(Failure::config)?;
    let grid = cfg.grid();

    match mode {
        "solve" => {
            let field = dispatch_solve(&cfg, &problem, &grid).map_err(solver_failure)?;
            write_out(
                &args.out,
                &output::solution_csv(&grid, &field, problem.system.component_names()),
            )?;
            check_tolerance(&grid, &field, problem.tol)
        }
        "verify" => verify(&cfg, &problem, &grid, args),
        "inspect" => {
            let report = inspect(&cfg, &problem).map_err(solver_failure)?;
            write_out(&args.out, &report)
        }
        _ => unreachable!("clap restricts the subcommands"),
    }
}

fn init_workers(flag: Option<usize>) -> Result<(), Failure> {
    let from_env = std::env::var("UTM_WORKERS")
        .ok()
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| Failure::config(format!("UTM_WORKERS must be an integer, got '{v}'")))
        })
        .transpose()?;
    if let Some(n) = flag.or(from_env) {
        if n == 0 {
            return Err(Failure::config("worker count must be positive"));
        }
        // a later duplicate build (e.g. in tests) keeps the first pool; the
        // point count per run makes this harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_out(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn dispatch_solve(
    cfg: &ProblemConfig,
    p: &BVProblem,
    grid: &Grid,
) -> utm_core::Result<SolutionField> {
    let bc = p.boundary.first();
    match (cfg.system.id.as_deref(), bc) {
        (Some("klein-gordon"), Some(b))
            if matches!(b.kind, BoundaryKind::Dirichlet) && b.component == 0 =>
        {
            solve_kg_dirichlet(
                cfg.system.alpha.unwrap_or_default(),
                &p.initial[0],
                &p.initial[1],
                &b.data,
                grid,
                p.tol,
            )
        }
        (Some("fitzhugh-nagumo"), Some(b))
            if matches!(b.kind, BoundaryKind::Neumann) && b.component == 0 =>
        {
            solve_fn_neumann(
                cfg.system.beta.unwrap_or_default(),
                &p.initial[0],
                &p.initial[1],
                &b.data,
                grid,
                p.tol,
            )
        }
        (Some("wave-family"), Some(b)) => solve_wave_family(
            cfg.system.a.unwrap_or_default(),
            &p.initial[0],
            &p.initial[1],
            b,
            grid,
            p.tol,
        ),
        _ => generic_solve(p, grid),
    }
}

fn check_tolerance(grid: &Grid, field: &SolutionField, tol: f64) -> Result<(), Failure> {
    let total = grid.xs.len() * grid.ts.len();
    let mut failing = 0usize;
    for ix in 0..grid.xs.len() {
        for it in 0..grid.ts.len() {
            if field.error(ix, it) > tol {
                failing += 1;
            }
        }
    }
    if (failing as f64) > FAILURE_FRACTION * (total as f64) {
        return Err(Failure {
            code: EXIT_TOLERANCE,
            message: format!(
                "{failing} of {total} points exceed the error tolerance {tol:.3e}"
            ),
        });
    }
    Ok(())
}

fn verify(
    cfg: &ProblemConfig,
    problem: &BVProblem,
    grid: &Grid,
    args: &RunArgs,
) -> Result<(), Failure> {
    let names = problem.system.component_names().to_vec();
    let field = dispatch_solve(cfg, problem, grid).map_err(solver_failure)?;
    write_out(&args.out, &output::solution_csv(grid, &field, &names))?;

    let oracle = fd_reference(problem, &FDConfig::default(), grid).map_err(solver_failure)?;
    let oracle_path = sibling(&args.out, "oracle.csv");
    write_out(&oracle_path, &output::solution_csv(grid, &oracle, &names))?;

    // a point counts as disagreeing when the gap exceeds what the solver
    // tolerance plus the oracle's own certified discretization error allow
    let point_tol = 10.0 * problem.tol + 3.0 * oracle.max_error();
    let agreement = output::compare_fields(grid, &field, &oracle, names.len(), point_tol);

    let mut report = String::new();
    report.push_str("verification report\n");
    report.push_str(&format!("grid points: {}\n", agreement.total));
    report.push_str(&format!("solver tolerance: {:.3e}\n", problem.tol));
    report.push_str(&format!(
        "oracle richardson error bound: {:.3e}\n",
        oracle.max_error()
    ));
    report.push_str(&format!(
        "max disagreement: {:.3e}\n",
        agreement.max_disagreement
    ));
    report.push_str(&format!(
        "points beyond {:.3e}: {} of {}\n",
        point_tol, agreement.failing, agreement.total
    ));
    match pde_residual(&field, &problem.system) {
        Ok(r) => report.push_str(&format!("solution pde residual: {r:.3e}\n")),
        Err(e) => report.push_str(&format!("solution pde residual: skipped ({e})\n")),
    }
    match pde_residual(&oracle, &problem.system) {
        Ok(r) => report.push_str(&format!("oracle pde residual: {r:.3e}\n")),
        Err(e) => report.push_str(&format!("oracle pde residual: skipped ({e})\n")),
    }
    let verdict = (agreement.failing as f64) <= FAILURE_FRACTION * (agreement.total as f64);
    report.push_str(&format!(
        "verdict: {}\n",
        if verdict { "agree" } else { "disagree" }
    ));
    write_out(&sibling(&args.out, "report.txt"), &report)?;

    if !verdict {
        return Err(Failure {
            code: EXIT_TOLERANCE,
            message: format!(
                "{} of {} points disagree with the oracle beyond {:.3e}",
                agreement.failing, agreement.total, point_tol
            ),
        });
    }
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out");
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn inspect(cfg: &ProblemConfig, problem: &BVProblem) -> utm_core::Result<String> {
    let m = &problem.system;
    let branches = BranchSet::build(m)?;
    let symmetries = find_symmetries(m, &branches)?;
    let bc = count_required_bcs(m, &symmetries)?;

    let mut report = String::new();
    report.push_str("inspection report\n");
    if let Some(id) = cfg.system.id.as_deref() {
        report.push_str(&format!("system: {id}\n"));
    } else {
        report.push_str("system: explicit symbol\n");
    }
    report.push_str(&format!(
        "components: {}\n",
        m.component_names().join(", ")
    ));

    report.push_str(&format!("dispersion branches: {}\n", m.size()));
    for p in branches.branch_points() {
        report.push_str(&format!(
            "branch point at {:.6} ({:?})\n",
            p.location, p.kind
        ));
    }

    report.push_str(&format!("symmetries: {}\n", symmetries.len()));
    for sym in symmetries.symmetries() {
        if sym.is_identity() {
            report.push_str(&format!(
                "  identity (multiplicity {})\n",
                sym.multiplicity()
            ));
        } else if let Some(nu) = sym.linear_coefficient() {
            report.push_str(&format!("  k -> ({:.12}) k\n", nu));
        } else {
            report.push_str("  non-linear family\n");
        }
    }

    let region = Region::new(branches.clone());
    let mut inside = 0usize;
    let samples = 60usize;
    for i in 0..samples {
        for j in 0..samples {
            let kr = -3.0 + 6.0 * (i as f64 + 0.5) / (samples as f64);
            let ki = 3.0 * (j as f64 + 0.5) / (samples as f64);
            if in_d_plus(&region, Complex64::new(kr, ki))? {
                inside += 1;
            }
        }
    }
    report.push_str(&format!(
        "D+ coverage on [-3,3]x(0,3]: {inside} of {} samples\n",
        samples * samples
    ));

    report.push_str(&format!(
        "required boundary conditions: {} (data component {})\n",
        bc.count, bc.data_component
    ));
    report.push_str(&format!(
        "unknown boundary transforms: {}, eliminated through symmetries: {}\n",
        bc.total_unknowns, bc.usable_relations
    ));
    report.push_str(&format!(
        "boundary conditions supplied: {}\n",
        problem.boundary.len()
    ));
    Ok(report)
}
