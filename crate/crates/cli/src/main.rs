use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use opmeans_cli::{
    compute, max_dim_from_env, phi_rows, to_csv, CliError, InitName, ProblemFile, Result, TGrid, EXIT_INPUT,
    EXIT_NOT_CONVERGED, EXIT_OK, EXIT_VERIFY_FAILED,
};
use opmeans_core::verify::run_suite;
use opmeans_core::{registry_get, CheckParams, SolverConfig, Suite};

/// Weighted operator means of SPD matrices.
///
/// Exit status: 0 success, 1 invalid input, 2 solver did not converge,
/// 3 a theorem-backed verification check failed.
#[derive(Debug, Parser)]
#[command(name = "opmeans", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for the verification suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Samples per verification check.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Matrix dimensions drawn by the verification suites.
    #[arg(long, global = true, value_delimiter = ',', default_values_t = [2, 3, 4])]
    dims: Vec<usize>,
    /// Gradient-norm tolerance of the solver.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Iteration limit of the solver.
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Starting point of the solver.
    #[arg(long, global = true, value_enum)]
    init: Option<InitName>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and print the mean as JSON.
    Compute {
        /// Problem file, or '-' for stdin.
        path: PathBuf,
    },
    /// Tabulate the two-matrix representing function as CSV.
    PhiTable {
        #[arg(long)]
        generator: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Weight of the first matrix; the closed form needs 0.5.
        #[arg(long, default_value_t = 0.5)]
        weight: f64,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e3)]
        t_max: f64,
        /// Number of log-spaced intervals between t-min and t-max.
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Explicit points; replaces the range.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
    },
    /// Run a property suite and print its JSON report.
    Verify {
        /// One of: majorization, congruence, bounds, geodesic-convexity,
        /// gradient, monotonicity-search, convexity-probe, all.
        suite: String,
    },
}

impl Cli {
    fn solver_config(&self, base: SolverConfig) -> SolverConfig {
        let mut config = base;
        if let Some(tol) = self.tol {
            config.grad_tol = tol;
        }
        if let Some(iters) = self.max_iters {
            config.max_iters = iters;
        }
        if let Some(init) = self.init {
            config.init = init.into();
        }
        config
    }
}

fn read_problem(path: &Path) -> Result<ProblemFile> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        return ProblemFile::from_json(&text, "<stdin>");
    }
    ProblemFile::read(path)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn run(cli: &Cli) -> Result<i32> {
    let max_dim = max_dim_from_env()?;
    match &cli.command {
        Command::Compute { path } => {
            let file = read_problem(path)?;
            let problem = file.to_problem(max_dim)?;
            let config = cli.solver_config(file.solver_config(SolverConfig::default()));
            config.validate()?;
            let out = compute(&problem, &config)?;
            println!("{}", to_json(&out));
            if !out.converged {
                eprintln!(
                    "solver stopped without converging ({:?}, gradient norm {:e})",
                    out.termination, out.grad_norm
                );
                return Ok(EXIT_NOT_CONVERGED);
            }
            Ok(EXIT_OK)
        }
        Command::PhiTable { generator, p, lambda, weight, t_min, t_max, steps, t } => {
            let g = registry_get(generator, *p, *lambda)?;
            if !(0.0..=1.0).contains(weight) {
                return Err(CliError::Usage(format!("weight must lie in [0, 1], got {weight}")));
            }
            let grid = match t {
                Some(ts) => TGrid::Points(ts.clone()),
                None => TGrid::Range { lo: *t_min, hi: *t_max, steps: *steps },
            };
            let rows = phi_rows(&g, *weight, &grid.points()?)?;
            if rows.iter().any(|r| r.closed_form.is_none()) {
                eprintln!("no closed form for '{}' at weight {weight}; column omitted", g.name());
            }
            print!("{}", to_csv(&rows));
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let params = CheckParams {
                samples: cli.samples,
                seed: cli.seed,
                dims: cli.dims.clone(),
                max_dim,
                solver: cli.solver_config(SolverConfig::default()),
                ..CheckParams::default()
            };
            let report = run_suite(suite, &params)?;
            println!("{}", to_json(&report));
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { EXIT_OK } else { EXIT_INPUT } as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
