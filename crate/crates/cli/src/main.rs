//! `mixhardy`: sharp Hardy constants with mixed cylindrical-spherical weights.

mod output;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixhardy::rayleigh::{GeneralOptions, MeshSpec};
use mixhardy::solver::{BStarMethod, BStarOptions, Flag, ScanAxis, Sweep};
use mixhardy::suites::{run_suite, Suite, SuiteOptions};
use mixhardy::{compute_bstar, compute_constant, scan, HardyError, ProblemParams, RefineOptions, SolveOptions};

use crate::output::Format;

const EXIT_INVALID: u8 = 1;
const EXIT_NONCONVERGENCE: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mixhardy", version, about = "Sharp constants of Hardy inequalities with mixed weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Best constant S_{b,gamma} for one parameter set.
    Constant {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        numeric: Numeric,
        /// Also solve closed-form cases numerically and check the bounds.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Bracket the threshold b_* where the bottom constant leaves Lambda_0^p.
    Bstar {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long, value_enum, default_value_t = MethodArg::Oscillation)]
        method: MethodArg,
        /// Width at which the bisection stops.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Minimum margin for the rayleigh-margin predicate.
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Sweep gamma, b, or b with gamma = b; emits one row per point plus diagnostics.
    Scan {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        numeric: Numeric,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Run the identity, bound and scaling checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = SuiteOptions::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = SuiteOptions::default().seed)]
        seed: u64,
        #[command(flatten)]
        numeric: Numeric,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
struct Problem {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Spherical exponent (defaults to 0 for `bstar`).
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Denominator exponent (defaults to b).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
}

#[derive(Debug, Args)]
struct Numeric {
    /// Nested mesh levels.
    #[arg(long, default_value_t = 4)]
    levels: u32,
    /// Smallest angle of the coarsest mesh.
    #[arg(long, default_value_t = MeshSpec::default().theta_min)]
    theta_min: f64,
    /// Cells of the coarsest mesh.
    #[arg(long, default_value_t = MeshSpec::default().n_cells)]
    cells: usize,
    /// Relative stopping tolerance of the p != 2 minimizer.
    #[arg(long, default_value_t = GeneralOptions::default().tol)]
    solver_tol: f64,
    #[arg(long, default_value_t = GeneralOptions::default().max_iter)]
    max_iter: usize,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl Numeric {
    fn refine(&self) -> RefineOptions {
        let base = MeshSpec { theta_min: self.theta_min, n_cells: self.cells, ..MeshSpec::default() };
        let general = GeneralOptions { tol: self.solver_tol, max_iter: self.max_iter, ..GeneralOptions::default() };
        RefineOptions { levels: self.levels, base, general }
    }
}

#[derive(Debug, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Oscillation,
    RayleighMargin,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Gamma,
    B,
    Bottom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Bounds,
    Scaling,
    All,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<HardyError> for Failure {
    fn from(e: HardyError) -> Self {
        let code = match e {
            HardyError::NonConvergence(_) | HardyError::Inconclusive(_) => EXIT_NONCONVERGENCE,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INVALID, message: message.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let workers = match &cli.command {
        Command::Constant { numeric, .. }
        | Command::Bstar { numeric, .. }
        | Command::Scan { numeric, .. }
        | Command::Verify { numeric, .. } => numeric.workers,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    let written = match &out.output {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    written.map_err(|e| invalid(format!("cannot write output: {e}")))
}

fn dispatch(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Constant { problem, numeric, verify, out } => {
            let b = problem.b.ok_or_else(|| invalid("constant needs --b"))?;
            let params = ProblemParams::new(problem.d, problem.k, problem.p, problem.a, b, problem.gamma.unwrap_or(b));
            let est = compute_constant(&params, &SolveOptions { refine: numeric.refine(), verify })?;
            emit(&out, &output::constant(out.format, &est))?;
            if est.has_flag(Flag::NotConverged) {
                eprintln!("warning: minimizer did not converge on every level");
                return Ok(EXIT_NONCONVERGENCE);
            }
            Ok(0)
        }
        Command::Bstar { problem, numeric, method, tol, margin, out } => {
            let b = problem.b.unwrap_or(0.0);
            let params = ProblemParams::bottom(problem.d, problem.k, problem.p, problem.a, b);
            let method = match method {
                MethodArg::Oscillation => BStarMethod::Oscillation,
                MethodArg::RayleighMargin => BStarMethod::RayleighMargin,
            };
            let est = compute_bstar(&params, &BStarOptions { method, tol, margin, refine: numeric.refine() })?;
            emit(&out, &output::bstar(out.format, &est))?;
            Ok(0)
        }
        Command::Scan { problem, numeric, axis, from, to, count, verify, out } => {
            let axis = match axis {
                AxisArg::Gamma => ScanAxis::Gamma,
                AxisArg::B => ScanAxis::B,
                AxisArg::Bottom => ScanAxis::Bottom,
            };
            let b = match (axis, problem.b) {
                (ScanAxis::Gamma, None) => return Err(invalid("a gamma sweep needs --b")),
                (_, b) => b.unwrap_or(from),
            };
            let gamma = match (axis, problem.gamma) {
                (ScanAxis::B, None) => return Err(invalid("a b sweep needs --gamma")),
                (_, g) => g.unwrap_or(b),
            };
            let template = ProblemParams::new(problem.d, problem.k, problem.p, problem.a, b, gamma);
            let sweep = Sweep { axis, from, to, count };
            let res = scan(&template, &sweep, &SolveOptions { refine: numeric.refine(), verify })?;
            emit(&out, &output::scan(out.format, &res))?;
            Ok(0)
        }
        Command::Verify { suite, samples, seed, numeric, out } => {
            let suite = match suite {
                SuiteArg::Identities => Suite::Identities,
                SuiteArg::Bounds => Suite::Bounds,
                SuiteArg::Scaling => Suite::Scaling,
                SuiteArg::All => Suite::All,
            };
            let checks = run_suite(suite, &SuiteOptions { samples, seed, refine: numeric.refine() })?;
            emit(&out, &output::checks(out.format, &checks))?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", checks.len());
                return Ok(EXIT_VERIFICATION);
            }
            Ok(0)
        }
    }
}
