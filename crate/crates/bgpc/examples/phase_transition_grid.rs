//! 2-D phase transition of truncated power iteration over (s0, n) with the
//! dictionary coupled as m = 2n, written as a plot-ready grid CSV.
//!
//! ```sh
//! cargo run --release --example phase_transition_grid
//! ```

use bgpc::harness::{
    phase_transition, Axis, AxisParam, Coupling, ExperimentSpec, InitChoice, RunOptions, S1Named,
    S1Rule, SolverChoice, TpiProjection,
};
use bgpc::model::Dims;
use bgpc::synth::{EnsembleSpec, Signal};

fn main() -> bgpc::Result<()> {
    let spec = ExperimentSpec {
        schema: 1,
        base: EnsembleSpec {
            dims: Dims::new(64, 128, 16)?,
            delta: 0.1,
            sigma_w: 0.0,
            signal: Signal::Sparse { s0: 8 },
            seed: 5,
        },
        sweep: vec![
            Axis {
                param: AxisParam::S0,
                values: vec![4.0, 8.0, 12.0, 16.0],
            },
            Axis {
                param: AxisParam::N,
                values: vec![32.0, 64.0, 96.0, 128.0],
            },
        ],
        coupling: Coupling::MEquals2N,
        trials_per_cell: 10,
        solver: SolverChoice::Tpi {
            projection: TpiProjection::PerColumn,
            s1: S1Rule::Named(S1Named::TwiceS0),
        },
        init: InitChoice::PhaseInformed,
        success_thresholds_db: vec![(0.0, 30.0)],
        max_iters: 500,
        tol: 1e-9,
        beta: bgpc::solvers::BetaMode::SpectralNorm,
        admm: None,
    };
    let table = phase_transition(&spec, &RunOptions::default())?;
    print!("{}", table.grid_csv());
    Ok(())
}
