//! Jointly sparse signals: compare the row-support projection against the
//! hybrid schedule (per-column truncation first, joint rows afterwards),
//! which avoids premature lock-in to a wrong shared support.
//!
//! ```sh
//! cargo run --release --example joint_sparsity_hybrid
//! ```

use bgpc::metrics::rsnr;
use bgpc::model::Dims;
use bgpc::solvers::{phase_informed_eta0, truncated_power_iteration, SolverConfig};
use bgpc::synth::{gen_instance, stream_rng, EnsembleSpec, Signal, StreamTag};
use bgpc::SparsityMode;
use rand::RngCore;

fn main() -> bgpc::Result<()> {
    let s0 = 12;
    let spec = EnsembleSpec {
        dims: Dims::new(96, 192, 16)?,
        delta: 0.1,
        sigma_w: 0.0,
        signal: Signal::JointSparse { s0 },
        seed: 23,
    };
    let (instance, truth) = gen_instance(&spec)?;
    let alpha = (spec.dims.n as f64).sqrt();

    // corrupt half the phase estimates to stress the initialization
    let mut phases = truth.phases.clone();
    let mut rng = stream_rng(spec.seed, StreamTag::Corrupt);
    for p in phases.iter_mut().take(spec.dims.n / 2) {
        *p = std::f64::consts::TAU * ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64);
    }
    let eta0 = phase_informed_eta0(&phases, instance.dims, alpha)?;

    for (label, mode) in [
        ("joint rows only ", SparsityMode::JointRows { s: 2 * s0 }),
        (
            "hybrid (0.5)    ",
            SparsityMode::Hybrid {
                s: 2 * s0,
                switch_fraction: 0.5,
            },
        ),
    ] {
        let cfg = SolverConfig {
            sparsity: Some(mode),
            max_iters: 400,
            ..SolverConfig::default()
        };
        let result = truncated_power_iteration(&instance, &eta0, &cfg)?;
        let db = rsnr(truth.eta_dot.data(), result.eta.data())?;
        println!(
            "{label}: {:>3} iterations, RSNR {db:>7.1} dB",
            result.iterations
        );
    }
    Ok(())
}
