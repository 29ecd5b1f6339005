//! Command-line surface. The `bgpc` binary is a thin shell over the library:
//! `solve` runs one solver on `cmatrix` files, `experiment` /
//! `phase-transition` drive the Monte-Carlo harness from a TOML config,
//! `init` runs the spectral initializer, `sh-basis` evaluates the
//! spherical-harmonic lighting basis, and `convert` translates between the
//! `cmatrix` text format and header-less CSV pairs.
//!
//! Exit codes: 0 on success, 1 on usage/parse/config errors, 2 on numerical
//! failures (degenerate operators, diverging solvers, singular systems).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::baselines::{l1_admm, l21_admm, least_squares, AdmmConfig};
use crate::harness::{self, ExperimentSpec, RunOptions};
use crate::initializer::{initialize_with_mode, SupportMode};
use crate::matrix::ComplexMatrix;
use crate::metrics::rsnr;
use crate::model::{pack_eta, unpack_eta, EtaVector, ProblemInstance};
use crate::projections::SparsityMode;
use crate::solvers::{
    phase_informed_eta0, power_iteration, truncated_power_iteration, AlphaMode, BetaMode,
    SolverConfig,
};
use crate::synth::gen_instance;
use crate::{Error, Result, C64};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "bgpc",
    version,
    about = "Blind gain and phase calibration: solvers, initializers and Monte-Carlo experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance from cmatrix files and write lambda/X estimates.
    Solve(SolveArgs),
    /// Run a success-rate sweep described by a TOML config.
    Experiment(ExperimentArgs),
    /// Run a 2-D phase-transition grid described by a TOML config.
    PhaseTransition(PhaseTransitionArgs),
    /// Run the spectral initializer and write eta0 plus a support report.
    Init(InitArgs),
    /// Evaluate the first 9 real spherical harmonics at surface normals.
    ShBasis(ShBasisArgs),
    /// Convert between cmatrix text files and CSV re,im pairs.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Pi,
    Tpi,
    Ls,
    L1,
    L21,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InitKind {
    /// eta0 = [0; ones/sqrt(n)]
    Ones,
    /// Phase estimates from --phases FILE (n x 1 real cmatrix, radians)
    Phases,
    /// Spectral initialization (needs --s1)
    Alg3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TpiModeKind {
    PerColumn,
    Joint,
    Hybrid,
}

#[derive(Args)]
struct SolveArgs {
    /// Measurement matrix A (cmatrix, n x m)
    #[arg(long)]
    a: PathBuf,
    /// Observations Y (cmatrix, n x N)
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Truncation level for tpi (and alg3 initialization)
    #[arg(long)]
    s1: Option<usize>,
    #[arg(long, value_enum, default_value = "ones")]
    init: InitKind,
    /// Phase estimates file, required with --init phases
    #[arg(long)]
    phases: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "per-column")]
    tpi_mode: TpiModeKind,
    /// Hybrid projection switch point as a fraction of max iterations
    #[arg(long, default_value_t = 0.5)]
    switch_fraction: f64,
    /// "sqrt-n" or an explicit positive value
    #[arg(long, default_value = "sqrt-n")]
    alpha: String,
    /// "estimated" (padded), "spectral" (raw ||B|| estimate), "theory" (3/2),
    /// or an explicit positive value
    #[arg(long, default_value = "estimated")]
    beta: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Output prefix; writes PREFIX.lambda.cmat, PREFIX.x.cmat, PREFIX.report.json
    #[arg(long)]
    out: PathBuf,
    /// Optional ground-truth eta (cmatrix, (N*m+n) x 1) for an RSNR report
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment config (schema = 1)
    #[arg(long)]
    config: PathBuf,
    /// Output prefix; writes PREFIX.csv and PREFIX.trials.csv
    #[arg(long)]
    out: PathBuf,
    /// Reduce trials per cell to 20 for quick runs
    #[arg(long, conflicts_with = "full")]
    fast: bool,
    /// Force the full protocol of 100 trials per cell
    #[arg(long)]
    full: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// Instead of sweeping, generate the base ensemble instance and write
    /// PREFIX.a.cmat, PREFIX.y.cmat, PREFIX.eta.cmat
    #[arg(long)]
    emit_instance: bool,
}

#[derive(Args)]
struct PhaseTransitionArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, conflicts_with = "full")]
    fast: bool,
    /// Force the full protocol of 100 trials per cell
    #[arg(long)]
    full: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct InitArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    s1: usize,
    /// Estimate one shared row support instead of per-snapshot supports
    #[arg(long)]
    joint: bool,
    #[arg(long, default_value = "sqrt-n")]
    alpha: String,
    /// Output prefix; writes PREFIX.eta0.cmat and PREFIX.init.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShBasisArgs {
    /// Surface normals (cmatrix, n x 3, real)
    #[arg(long)]
    normals: PathBuf,
    /// Output basis matrix (cmatrix, n x 9)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertTarget {
    Cmat,
    Csv,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Target format; the input is parsed as the other one
    #[arg(long, value_enum)]
    to: ConvertTarget,
}

/// Parse args and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_)
        | Error::Diverged(_)
        | Error::SingularSystem(_)
        | Error::NonUnitNorm { .. }
        | Error::DenseCapExceeded { .. } => 2,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::PhaseTransition(args) => cmd_phase_transition(args),
        Command::Init(args) => cmd_init(args),
        Command::ShBasis(args) => cmd_sh_basis(args),
        Command::Convert(args) => cmd_convert(args),
    }
}

fn parse_alpha(text: &str) -> Result<AlphaMode> {
    if text == "sqrt-n" {
        return Ok(AlphaMode::SqrtN);
    }
    let value: f64 = text.parse().map_err(|_| Error::Config(format!(
        "--alpha must be \"sqrt-n\" or a positive number, got `{text}`"
    )))?;
    Ok(AlphaMode::Explicit { value })
}

fn parse_beta(text: &str) -> Result<BetaMode> {
    match text {
        "estimated" => Ok(BetaMode::Estimated),
        "spectral" => Ok(BetaMode::SpectralNorm),
        "theory" => Ok(BetaMode::Theory),
        _ => {
            let value: f64 = text.parse().map_err(|_| Error::Config(format!(
                "--beta must be \"estimated\", \"spectral\", \"theory\", or a positive number, got `{text}`"
            )))?;
            Ok(BetaMode::Explicit { value })
        }
    }
}

fn read_phases(path: &Path, n: usize) -> Result<Vec<f64>> {
    let m = ComplexMatrix::read_cmatrix_file(path)?;
    if m.cols() != 1 || m.rows() != n {
        return Err(Error::DimensionMismatch {
            field: "phases",
            expected: n,
            got: m.rows() * m.cols(),
        });
    }
    Ok((0..n).map(|k| m.get(k, 0).re).collect())
}

/// Gains from the trailing eta block: `gamma = -alpha * tail`, inverted
/// entrywise with (near-)zeros reported as zero gain.
fn lambda_from_eta(eta: &EtaVector) -> Vec<C64> {
    let gamma: Vec<C64> = eta.gamma_part().iter().map(|&t| -t * eta.alpha()).collect();
    invert_gamma(&gamma)
}

fn invert_gamma(gamma: &[C64]) -> Vec<C64> {
    let max = gamma.iter().map(|z| z.norm()).fold(0.0, f64::max);
    gamma
        .iter()
        .map(|&g| {
            if g.norm() < 1e-12 * max {
                C64::new(0.0, 0.0)
            } else {
                C64::new(1.0, 0.0) / g
            }
        })
        .collect()
}

fn json_db(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let a = ComplexMatrix::read_cmatrix_file(&args.a)?;
    let y = ComplexMatrix::read_cmatrix_file(&args.y)?;
    let instance = ProblemInstance::new(a, y)?;
    let dims = instance.dims;
    let alpha_mode = parse_alpha(&args.alpha)?;
    let beta_mode = parse_beta(&args.beta)?;
    let alpha = match alpha_mode {
        AlphaMode::SqrtN => (dims.n as f64).sqrt(),
        AlphaMode::Explicit { value } => value,
    };

    if args.solver == SolverKind::Tpi && args.s1.is_none() {
        return Err(Error::Config("--solver tpi requires --s1".into()));
    }
    if args.init == InitKind::Phases && args.phases.is_none() {
        return Err(Error::Config("--init phases requires --phases FILE".into()));
    }
    if args.init == InitKind::Alg3 && args.s1.is_none() {
        return Err(Error::Config("--init alg3 requires --s1".into()));
    }

    let truth_eta = match &args.truth {
        Some(path) => {
            let m = ComplexMatrix::read_cmatrix_file(path)?;
            if m.cols() != 1 || m.rows() != dims.eta_len() {
                return Err(Error::DimensionMismatch {
                    field: "truth",
                    expected: dims.eta_len(),
                    got: m.rows() * m.cols(),
                });
            }
            let data: Vec<C64> = (0..m.rows()).map(|i| m.get(i, 0)).collect();
            Some(EtaVector::from_parts(data, dims, alpha)?)
        }
        None => None,
    };

    let start = Instant::now();
    let solver_name = match args.solver {
        SolverKind::Pi => "pi",
        SolverKind::Tpi => "tpi",
        SolverKind::Ls => "ls",
        SolverKind::L1 => "l1",
        SolverKind::L21 => "l21",
    };

    // (eta estimate, lambda, X, iterations, converged)
    let (eta_hat, lambda_hat, x_hat, iterations, converged) = match args.solver {
        SolverKind::Pi | SolverKind::Tpi => {
            let eta0 = match args.init {
                InitKind::Ones => phase_informed_eta0(&vec![0.0; dims.n], dims, alpha)?,
                InitKind::Phases => {
                    let phases = read_phases(args.phases.as_ref().expect("checked"), dims.n)?;
                    phase_informed_eta0(&phases, dims, alpha)?
                }
                InitKind::Alg3 => {
                    let mode = SupportMode::PerSnapshot;
                    initialize_with_mode(&instance, args.s1.expect("checked"), alpha, mode)?.eta0
                }
            };
            let sparsity = match args.solver {
                SolverKind::Tpi => Some(match args.tpi_mode {
                    TpiModeKind::PerColumn => SparsityMode::PerColumn {
                        s: args.s1.expect("checked"),
                    },
                    TpiModeKind::Joint => SparsityMode::JointRows {
                        s: args.s1.expect("checked"),
                    },
                    TpiModeKind::Hybrid => SparsityMode::Hybrid {
                        s: args.s1.expect("checked"),
                        switch_fraction: args.switch_fraction,
                    },
                }),
                _ => None,
            };
            let cfg = SolverConfig {
                alpha_mode,
                beta_mode,
                max_iters: args.max_iters,
                tol: args.tol,
                sparsity,
                trace: false,
            };
            let result = if sparsity.is_some() {
                truncated_power_iteration(&instance, &eta0, &cfg)?
            } else {
                power_iteration(&instance, &eta0, &cfg)?
            };
            let lambda = lambda_from_eta(&result.eta);
            let (x, _) = unpack_eta(&result.eta);
            (result.eta, lambda, x, result.iterations, result.converged)
        }
        SolverKind::Ls => {
            let sol = least_squares(&instance)?;
            let eta = pack_eta(&sol.x, &sol.gamma, alpha)?.normalized()?;
            (eta, invert_gamma(&sol.gamma), sol.x, 1, !sol.rank_deficient)
        }
        SolverKind::L1 | SolverKind::L21 => {
            let gamma0: Vec<C64> = match args.init {
                InitKind::Ones => vec![C64::new(1.0, 0.0); dims.n],
                InitKind::Phases => {
                    let phases = read_phases(args.phases.as_ref().expect("checked"), dims.n)?;
                    phases.iter().map(|&p| C64::from_polar(1.0, -p)).collect()
                }
                InitKind::Alg3 => {
                    return Err(Error::Config(
                        "--init alg3 is not available for the l1/l21 solvers".into(),
                    ))
                }
            };
            let cfg = AdmmConfig {
                max_iters: args.max_iters.max(1),
                ..AdmmConfig::default()
            };
            let sol = if args.solver == SolverKind::L1 {
                l1_admm(&instance, &gamma0, &cfg)?
            } else {
                l21_admm(&instance, &gamma0, &cfg)?
            };
            let eta = pack_eta(&sol.x, &sol.gamma, alpha)?.normalized()?;
            (
                eta,
                invert_gamma(&sol.gamma),
                sol.x,
                sol.iterations,
                sol.converged,
            )
        }
    };
    let wall_time_s = start.elapsed().as_secs_f64();

    let rsnr_db = match &truth_eta {
        Some(truth) => Some(rsnr(truth.data(), eta_hat.data())?),
        None => None,
    };

    let lambda_mat = ComplexMatrix::new(dims.n, 1, lambda_hat)?;
    lambda_mat.write_cmatrix_file(&with_suffix(&args.out, "lambda.cmat"))?;
    x_hat.write_cmatrix_file(&with_suffix(&args.out, "x.cmat"))?;

    let mut report = json!({
        "schema": REPORT_SCHEMA,
        "solver": solver_name,
        "iterations": iterations,
        "converged": converged,
        "wall_time_s": wall_time_s,
        "config": {
            "alpha": args.alpha,
            "beta": args.beta,
            "tol": args.tol,
            "max_iters": args.max_iters,
            "s1": args.s1,
        },
    });
    if let Some(db) = rsnr_db {
        report["rsnr_db"] = json_db(db);
    }
    std::fs::write(
        with_suffix(&args.out, "report.json"),
        serde_json::to_string_pretty(&report).expect("report is valid json") + "\n",
    )?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    prefix.with_file_name(name)
}

fn load_spec(path: &Path, fast: bool, full: bool) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    let mut spec = ExperimentSpec::from_toml(&text)?;
    if fast {
        spec.trials_per_cell = spec.trials_per_cell.min(20);
    }
    if full {
        spec.trials_per_cell = spec.trials_per_cell.max(100);
    }
    Ok(spec)
}

fn write_tables(table: &harness::ExperimentTable, out: &Path) -> Result<()> {
    std::fs::write(out.with_extension("csv"), table.grid_csv())?;
    std::fs::write(out.with_extension("trials.csv"), table.trials_csv())?;
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let spec = load_spec(&args.config, args.fast, args.full)?;
    if args.emit_instance {
        let (instance, truth) = gen_instance(&spec.base)?;
        instance
            .a
            .write_cmatrix_file(&with_suffix(&args.out, "a.cmat"))?;
        instance
            .y
            .write_cmatrix_file(&with_suffix(&args.out, "y.cmat"))?;
        let eta = truth.eta_dot.data();
        let eta_mat = ComplexMatrix::new(eta.len(), 1, eta.to_vec())?;
        eta_mat.write_cmatrix_file(&with_suffix(&args.out, "eta.cmat"))?;
        return Ok(());
    }
    let table = harness::run_experiment(
        &spec,
        &RunOptions {
            threads: args.threads,
        },
    )?;
    write_tables(&table, &args.out)
}

fn cmd_phase_transition(args: PhaseTransitionArgs) -> Result<()> {
    let spec = load_spec(&args.config, args.fast, args.full)?;
    let table = harness::phase_transition(
        &spec,
        &RunOptions {
            threads: args.threads,
        },
    )?;
    write_tables(&table, &args.out)
}

fn cmd_init(args: InitArgs) -> Result<()> {
    let a = ComplexMatrix::read_cmatrix_file(&args.a)?;
    let y = ComplexMatrix::read_cmatrix_file(&args.y)?;
    let instance = ProblemInstance::new(a, y)?;
    let alpha = match parse_alpha(&args.alpha)? {
        AlphaMode::SqrtN => (instance.dims.n as f64).sqrt(),
        AlphaMode::Explicit { value } => value,
    };
    let mode = if args.joint {
        SupportMode::JointRows
    } else {
        SupportMode::PerSnapshot
    };
    let report = initialize_with_mode(&instance, args.s1, alpha, mode)?;
    let eta0 = report.eta0.data();
    ComplexMatrix::new(eta0.len(), 1, eta0.to_vec())?
        .write_cmatrix_file(&with_suffix(&args.out, "eta0.cmat"))?;
    let doc = json!({
        "schema": REPORT_SCHEMA,
        "s1": args.s1,
        "joint": args.joint,
        "singular_value": report.singular_value,
        "supports": report.supports,
    });
    std::fs::write(
        with_suffix(&args.out, "init.json"),
        serde_json::to_string_pretty(&doc).expect("valid json") + "\n",
    )?;
    Ok(())
}

fn cmd_sh_basis(args: ShBasisArgs) -> Result<()> {
    let normals = ComplexMatrix::read_cmatrix_file(&args.normals)?;
    let basis = crate::sh::sh_basis(&normals)?;
    basis.write_cmatrix_file(&args.out)?;
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    match args.to {
        ConvertTarget::Csv => {
            let m = ComplexMatrix::parse_cmatrix_text(&text)?;
            std::fs::write(&args.output, m.to_pair_csv())?;
        }
        ConvertTarget::Cmat => {
            let m = ComplexMatrix::parse_pair_csv(&text)?;
            std::fs::write(&args.output, m.to_cmatrix_text())?;
        }
    }
    Ok(())
}
