//! Sparse signals with a fat dictionary: truncated power iteration with a
//! phase-informed start, at several sparsity levels.
//!
//! ```sh
//! cargo run --release --example sparse_truncated_power_iteration
//! ```

use bgpc::metrics::rsnr;
use bgpc::model::Dims;
use bgpc::solvers::{phase_informed_eta0, truncated_power_iteration, SolverConfig};
use bgpc::synth::{gen_instance, EnsembleSpec, Signal};
use bgpc::SparsityMode;

fn main() -> bgpc::Result<()> {
    for s0 in [8usize, 16, 32] {
        let spec = EnsembleSpec {
            dims: Dims::new(128, 256, 16)?,
            delta: 0.1,
            sigma_w: 0.0,
            signal: Signal::Sparse { s0 },
            seed: 11,
        };
        let (instance, truth) = gen_instance(&spec)?;
        let alpha = (spec.dims.n as f64).sqrt();
        // phases of the true gains serve as side information
        let eta0 = phase_informed_eta0(&truth.phases, instance.dims, alpha)?;

        let cfg = SolverConfig {
            sparsity: Some(SparsityMode::PerColumn { s: 2 * s0 }),
            ..SolverConfig::default()
        };
        let result = truncated_power_iteration(&instance, &eta0, &cfg)?;
        let db = rsnr(truth.eta_dot.data(), result.eta.data())?;
        println!(
            "s0 = {s0:>2} (s1 = {:>2}): {:>4} iterations, RSNR {db:>7.1} dB",
            2 * s0,
            result.iterations
        );
    }
    Ok(())
}
