//! Monte-Carlo success-rate curve over the signal dimension, written as CSV.
//! A small-scale version of the published subspace experiment.
//!
//! ```sh
//! cargo run --release --example success_rate_sweep
//! ```

use bgpc::harness::{
    run_experiment, Axis, AxisParam, Coupling, ExperimentSpec, InitChoice, RunOptions,
    SolverChoice,
};
use bgpc::model::Dims;
use bgpc::synth::{EnsembleSpec, Signal};

fn main() -> bgpc::Result<()> {
    let spec = ExperimentSpec {
        schema: 1,
        base: EnsembleSpec {
            dims: Dims::new(128, 8, 16)?,
            delta: 0.1,
            sigma_w: 0.0,
            signal: Signal::DenseSubspace,
            seed: 2,
        },
        sweep: vec![Axis {
            param: AxisParam::M,
            values: vec![8.0, 16.0, 24.0, 32.0, 40.0, 48.0, 56.0, 64.0],
        }],
        coupling: Coupling::None,
        trials_per_cell: 20,
        solver: SolverChoice::Pi,
        init: InitChoice::BaselineOnes,
        success_thresholds_db: vec![(0.0, 30.0), (0.1, 20.0), (0.2, 14.0), (0.5, 6.0)],
        // finite iteration budget; this is what shapes the transition
        max_iters: 100,
        tol: 1e-9,
        beta: bgpc::solvers::BetaMode::SpectralNorm,
        admm: None,
    };
    let table = run_experiment(&spec, &RunOptions::default())?;
    print!("{}", table.grid_csv());
    Ok(())
}
