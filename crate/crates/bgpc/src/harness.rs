//! Monte-Carlo experiment runner: success-rate sweeps, 2-D phase-transition
//! grids, and initialization comparisons, parallel over trials with
//! per-trial deterministic seeding.
//!
//! Every `(cell, trial)` pair gets the seed `mix_seed([base.seed, cell,
//! trial])`, owns its RNG streams, and is generated and solved independently,
//! so results are identical for any worker count and aggregate in a fixed
//! order. The primary CSV (`axis..., success_rate, trials`) is byte-stable;
//! the trials sidecar additionally carries measured wall times, which are the
//! one run-dependent column.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{l1_admm, l21_admm, least_squares, AdmmConfig};
use crate::initializer::initialize;
use crate::metrics::rsnr;
use crate::model::{pack_eta, EtaVector, GroundTruth, ProblemInstance};
use crate::projections::SparsityMode;
use crate::solvers::{
    phase_informed_eta0, power_iteration, truncated_power_iteration, AlphaMode, BetaMode,
    SolverConfig,
};
use crate::synth::{gen_instance, mix_seed, stream_rng, EnsembleSpec, Signal, StreamTag};
use crate::{Error, Result, C64};

/// Current config-file schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Which scalar a sweep axis drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    /// Sensor count `n`.
    N,
    /// Signal dimension `m`.
    M,
    /// Snapshot count.
    Snapshots,
    /// Sparsity level of the signal model.
    S0,
    /// Noise scale.
    SigmaW,
}

impl AxisParam {
    pub fn name(&self) -> &'static str {
        match self {
            AxisParam::N => "n",
            AxisParam::M => "m",
            AxisParam::Snapshots => "snapshots",
            AxisParam::S0 => "s0",
            AxisParam::SigmaW => "sigma_w",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub param: AxisParam,
    pub values: Vec<f64>,
}

/// Per-cell dimension coupling applied after the axis values are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Coupling {
    #[default]
    #[serde(rename = "none")]
    None,
    /// `n = 2m`
    #[serde(rename = "n_eq_2m")]
    NEquals2M,
    /// `n = 4 s0`
    #[serde(rename = "n_eq_4s0")]
    NEquals4S0,
    /// `m = 2n`
    #[serde(rename = "m_eq_2n")]
    MEquals2N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpiProjection {
    PerColumn,
    JointRows,
    /// Per-column truncation in the first half of the iterations, joint rows after.
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum S1Rule {
    /// `s1 = min(2 s0, m)`.
    Named(S1Named),
    Explicit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum S1Named {
    TwiceS0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SolverChoice {
    Pi,
    Tpi {
        projection: TpiProjection,
        s1: S1Rule,
    },
    Ls,
    L1,
    L21,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitChoice {
    /// `eta0 = [0; 1/sqrt(n) * ones]`.
    BaselineOnes,
    /// True generator phases as side information.
    PhaseInformed,
    /// Phase-informed with `fraction` of the phases replaced by random ones.
    CorruptedPhases { fraction: f64 },
    /// Spectral initialization (support estimation + rank-1 SVD).
    Algorithm3,
}

fn default_thresholds() -> Vec<(f64, f64)> {
    vec![(0.0, 30.0), (0.1, 20.0), (0.2, 14.0), (0.5, 6.0)]
}

fn default_max_iters() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-9
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_trials() -> usize {
    100
}

/// Experiments default to the unpadded shift `beta = ||B||`.
fn default_beta() -> BetaMode {
    BetaMode::SpectralNorm
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub base: EnsembleSpec,
    /// One or two sweep axes.
    pub sweep: Vec<Axis>,
    #[serde(default)]
    pub coupling: Coupling,
    #[serde(default = "default_trials")]
    pub trials_per_cell: usize,
    pub solver: SolverChoice,
    pub init: InitChoice,
    /// `(sigma_w, success threshold in dB)` pairs.
    #[serde(default = "default_thresholds")]
    pub success_thresholds_db: Vec<(f64, f64)>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_beta")]
    pub beta: BetaMode,
    #[serde(default)]
    pub admm: Option<AdmmConfig>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema {}, expected {}",
                self.schema, SCHEMA_VERSION
            )));
        }
        if self.sweep.is_empty() || self.sweep.len() > 2 {
            return Err(Error::Config(
                "need one or two sweep axes".into(),
            ));
        }
        if self.sweep.iter().any(|a| a.values.is_empty()) {
            return Err(Error::Config("sweep axes must be nonempty".into()));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Config("trials_per_cell must be at least 1".into()));
        }
        if let InitChoice::CorruptedPhases { fraction } = self.init {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::Config(format!(
                    "corrupted-phase fraction must lie in [0,1], got {fraction}"
                )));
            }
        }
        if matches!(self.solver, SolverChoice::L1 | SolverChoice::L21)
            && matches!(self.init, InitChoice::Algorithm3)
        {
            return Err(Error::Config(
                "the l1/l21 baselines take a gamma estimate; algorithm3 init is not supported for them"
                    .into(),
            ));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("serialize: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse config: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    fn threshold_for(&self, sigma_w: f64) -> Result<f64> {
        self.success_thresholds_db
            .iter()
            .find(|(s, _)| (s - sigma_w).abs() < 1e-9)
            .map(|&(_, db)| db)
            .ok_or_else(|| {
                Error::Config(format!(
                    "no success threshold configured for sigma_w = {sigma_w}"
                ))
            })
    }

    /// The ensemble for one cell, before seeding.
    fn cell_ensemble(&self, coords: &[f64]) -> Result<EnsembleSpec> {
        let mut spec = self.base;
        for (axis, &value) in self.sweep.iter().zip(coords) {
            apply_axis(&mut spec, axis.param, value)?;
        }
        match self.coupling {
            Coupling::None => {}
            Coupling::NEquals2M => spec.dims.n = 2 * spec.dims.m,
            Coupling::NEquals4S0 => {
                let s0 = spec.signal.s0().ok_or_else(|| {
                    Error::Config("coupling n = 4 s0 needs a sparse signal model".into())
                })?;
                spec.dims.n = 4 * s0;
            }
            Coupling::MEquals2N => spec.dims.m = 2 * spec.dims.n,
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn apply_axis(spec: &mut EnsembleSpec, param: AxisParam, value: f64) -> Result<()> {
    let as_usize = |v: f64| -> Result<usize> {
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::Config(format!(
                "axis value {v} is not a positive integer"
            )));
        }
        Ok(v as usize)
    };
    match param {
        AxisParam::N => spec.dims.n = as_usize(value)?,
        AxisParam::M => spec.dims.m = as_usize(value)?,
        AxisParam::Snapshots => spec.dims.snapshots = as_usize(value)?,
        AxisParam::S0 => {
            let s0 = as_usize(value)?;
            spec.signal = match spec.signal {
                Signal::DenseSubspace => {
                    return Err(Error::Config(
                        "cannot sweep s0 for the dense subspace signal model".into(),
                    ))
                }
                Signal::Sparse { .. } => Signal::Sparse { s0 },
                Signal::JointSparse { .. } => Signal::JointSparse { s0 },
                Signal::FlatSparse { .. } => Signal::FlatSparse { s0 },
            };
        }
        AxisParam::SigmaW => spec.sigma_w = value,
    }
    Ok(())
}

/// One trial outcome.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub cell: Vec<f64>,
    pub seed: u64,
    pub rsnr_db: f64,
    pub success: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    /// Reason tag when the solver errored; such trials count as failures.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub coords: Vec<f64>,
    pub success_rate: f64,
    pub trials: usize,
    pub records: Vec<TrialRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub axis_names: Vec<&'static str>,
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker count; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

/// Run the full sweep. Deterministic for any worker count.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentTable> {
    spec.validate()?;
    let cells = expand_cells(spec);
    let trials = spec.trials_per_cell;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();

    let work = || {
        jobs.par_iter()
            .map(|&(cell_idx, trial_idx)| run_trial(spec, &cells[cell_idx], cell_idx, trial_idx))
            .collect::<Vec<TrialRecord>>()
    };
    let records = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut out = Vec::with_capacity(cells.len());
    for (cell_idx, coords) in cells.iter().enumerate() {
        let cell_records: Vec<TrialRecord> = records
            [cell_idx * trials..(cell_idx + 1) * trials]
            .to_vec();
        let successes = cell_records.iter().filter(|r| r.success).count();
        out.push(CellResult {
            coords: coords.clone(),
            success_rate: successes as f64 / trials as f64,
            trials,
            records: cell_records,
        });
    }
    Ok(ExperimentTable {
        axis_names: spec.sweep.iter().map(|a| a.param.name()).collect(),
        cells: out,
    })
}

/// 2-D grid wrapper over [`run_experiment`]; requires exactly two axes.
pub fn phase_transition(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentTable> {
    if spec.sweep.len() != 2 {
        return Err(Error::Config(
            "phase_transition needs exactly two sweep axes".into(),
        ));
    }
    run_experiment(spec, opts)
}

fn expand_cells(spec: &ExperimentSpec) -> Vec<Vec<f64>> {
    match spec.sweep.len() {
        1 => spec.sweep[0].values.iter().map(|&v| vec![v]).collect(),
        _ => {
            let mut cells = Vec::new();
            for &v1 in &spec.sweep[0].values {
                for &v2 in &spec.sweep[1].values {
                    cells.push(vec![v1, v2]);
                }
            }
            cells
        }
    }
}

fn run_trial(
    spec: &ExperimentSpec,
    coords: &[f64],
    cell_idx: usize,
    trial_idx: usize,
) -> TrialRecord {
    let seed = mix_seed(&[spec.base.seed, cell_idx as u64, trial_idx as u64]);
    let start = Instant::now();
    let outcome = solve_one(spec, coords, seed);
    let wall_time_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((rsnr_db, iterations, sigma_w)) => match spec.threshold_for(sigma_w) {
            Ok(thr) => TrialRecord {
                cell: coords.to_vec(),
                seed,
                rsnr_db,
                success: rsnr_db > thr,
                iterations,
                wall_time_s,
                failure: None,
            },
            Err(e) => TrialRecord {
                cell: coords.to_vec(),
                seed,
                rsnr_db,
                success: false,
                iterations,
                wall_time_s,
                failure: Some(e.to_string().replace(',', ";")),
            },
        },
        Err(e) => TrialRecord {
            cell: coords.to_vec(),
            seed,
            rsnr_db: f64::NEG_INFINITY,
            success: false,
            iterations: 0,
            wall_time_s,
            failure: Some(e.to_string().replace(',', ";")),
        },
    }
}

fn corrupted_phases(truth: &GroundTruth, fraction: f64, seed: u64) -> Vec<f64> {
    let mut phases = truth.phases.clone();
    let count = (fraction * phases.len() as f64).round() as usize;
    let mut rng = stream_rng(seed, StreamTag::Corrupt);
    for p in phases.iter_mut().take(count) {
        use rand::RngCore;
        *p = std::f64::consts::TAU * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64);
    }
    phases
}

fn eta0_for(
    spec: &ExperimentSpec,
    instance: &ProblemInstance,
    truth: &GroundTruth,
    alpha: f64,
    s1: Option<usize>,
    seed: u64,
) -> Result<EtaVector> {
    match spec.init {
        InitChoice::BaselineOnes => {
            phase_informed_eta0(&vec![0.0; instance.dims.n], instance.dims, alpha)
        }
        InitChoice::PhaseInformed => phase_informed_eta0(&truth.phases, instance.dims, alpha),
        InitChoice::CorruptedPhases { fraction } => phase_informed_eta0(
            &corrupted_phases(truth, fraction, seed),
            instance.dims,
            alpha,
        ),
        InitChoice::Algorithm3 => {
            let s1 = s1.or_else(|| spec.base.signal.s0().map(|s0| (2 * s0).min(instance.dims.m)));
            let s1 = s1.ok_or_else(|| {
                Error::Config("algorithm3 init needs a sparsity level".into())
            })?;
            Ok(initialize(instance, s1, alpha)?.eta0)
        }
    }
}

fn gamma0_for(spec: &ExperimentSpec, truth: &GroundTruth, seed: u64) -> Result<Vec<C64>> {
    let phases: Vec<f64> = match spec.init {
        InitChoice::BaselineOnes => vec![0.0; truth.phases.len()],
        InitChoice::PhaseInformed => truth.phases.clone(),
        InitChoice::CorruptedPhases { fraction } => corrupted_phases(truth, fraction, seed),
        InitChoice::Algorithm3 => {
            return Err(Error::Config(
                "algorithm3 init does not produce a gamma estimate".into(),
            ))
        }
    };
    Ok(phases.iter().map(|&p| C64::from_polar(1.0, -p)).collect())
}

/// Returns `(rsnr_db, iterations, sigma_w)` for one seeded trial.
fn solve_one(spec: &ExperimentSpec, coords: &[f64], seed: u64) -> Result<(f64, usize, f64)> {
    let mut ensemble = spec.cell_ensemble(coords)?;
    ensemble.seed = seed;
    let (instance, truth) = gen_instance(&ensemble)?;
    let alpha = (instance.dims.n as f64).sqrt();

    match spec.solver {
        SolverChoice::Pi => {
            let eta0 = eta0_for(spec, &instance, &truth, alpha, None, seed)?;
            let cfg = SolverConfig {
                alpha_mode: AlphaMode::SqrtN,
                beta_mode: spec.beta,
                max_iters: spec.max_iters,
                tol: spec.tol,
                sparsity: None,
                trace: false,
            };
            let result = power_iteration(&instance, &eta0, &cfg)?;
            let db = rsnr(truth.eta_dot.data(), result.eta.data())?;
            Ok((db, result.iterations, ensemble.sigma_w))
        }
        SolverChoice::Tpi { projection, s1 } => {
            let s0 = ensemble.signal.s0().ok_or_else(|| {
                Error::Config("truncated power iteration needs a sparse signal model".into())
            })?;
            let s1 = match s1 {
                S1Rule::Named(S1Named::TwiceS0) => (2 * s0).min(instance.dims.m),
                S1Rule::Explicit(v) => v,
            };
            let mode = match projection {
                TpiProjection::PerColumn => SparsityMode::PerColumn { s: s1 },
                TpiProjection::JointRows => SparsityMode::JointRows { s: s1 },
                TpiProjection::Hybrid => SparsityMode::Hybrid {
                    s: s1,
                    switch_fraction: 0.5,
                },
            };
            let eta0 = eta0_for(spec, &instance, &truth, alpha, Some(s1), seed)?;
            let cfg = SolverConfig {
                alpha_mode: AlphaMode::SqrtN,
                beta_mode: spec.beta,
                max_iters: spec.max_iters,
                tol: spec.tol,
                sparsity: Some(mode),
                trace: false,
            };
            let result = truncated_power_iteration(&instance, &eta0, &cfg)?;
            let db = rsnr(truth.eta_dot.data(), result.eta.data())?;
            Ok((db, result.iterations, ensemble.sigma_w))
        }
        SolverChoice::Ls => {
            let sol = least_squares(&instance)?;
            let eta = pack_eta(&sol.x, &sol.gamma, alpha)?.normalized()?;
            let db = rsnr(truth.eta_dot.data(), eta.data())?;
            Ok((db, 1, ensemble.sigma_w))
        }
        SolverChoice::L1 | SolverChoice::L21 => {
            let gamma0 = gamma0_for(spec, &truth, seed)?;
            let cfg = spec.admm.unwrap_or_default();
            let sol = if matches!(spec.solver, SolverChoice::L1) {
                l1_admm(&instance, &gamma0, &cfg)?
            } else {
                l21_admm(&instance, &gamma0, &cfg)?
            };
            let eta = pack_eta(&sol.x, &sol.gamma, alpha)?.normalized()?;
            let db = rsnr(truth.eta_dot.data(), eta.data())?;
            Ok((db, sol.iterations, ensemble.sigma_w))
        }
    }
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Format with 6 significant digits; non-finite values print as `inf`/`-inf`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - exp);
    let rounded = (x * scale).round() / scale;
    format!("{rounded}")
}

impl ExperimentTable {
    /// Primary CSV: `axis1[,axis2],success_rate,trials`.
    pub fn grid_csv(&self) -> String {
        let mut out = String::new();
        match self.axis_names.len() {
            1 => out.push_str("axis1,success_rate,trials\n"),
            _ => out.push_str("axis1,axis2,success_rate,trials\n"),
        }
        for cell in &self.cells {
            for v in &cell.coords {
                let _ = write!(out, "{},", format_sig6(*v));
            }
            let _ = writeln!(out, "{},{}", format_sig6(cell.success_rate), cell.trials);
        }
        out
    }

    /// Sidecar CSV with all trial records.
    pub fn trials_csv(&self) -> String {
        let mut out = String::new();
        match self.axis_names.len() {
            1 => out.push_str("axis1,seed,rsnr_db,success,iterations,wall_time_s,failure\n"),
            _ => out.push_str("axis1,axis2,seed,rsnr_db,success,iterations,wall_time_s,failure\n"),
        }
        for cell in &self.cells {
            for rec in &cell.records {
                for v in &rec.cell {
                    let _ = write!(out, "{},", format_sig6(*v));
                }
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    rec.seed,
                    format_sig6(rec.rsnr_db),
                    rec.success,
                    rec.iterations,
                    format_sig6(rec.wall_time_s),
                    rec.failure.as_deref().unwrap_or("")
                );
            }
        }
        out
    }

    /// The sidecar with the measured-time column blanked; used for
    /// byte-identity comparisons across runs.
    pub fn trials_csv_without_timing(&self) -> String {
        let csv = self.trials_csv();
        let mut out = String::new();
        for (i, line) in csv.lines().enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            let time_col = fields.len() - 2;
            for (c, f) in fields.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                if c == time_col && i > 0 {
                    out.push('-');
                } else {
                    out.push_str(f);
                }
            }
            out.push('\n');
        }
        out
    }
}
