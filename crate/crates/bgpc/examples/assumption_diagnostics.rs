//! Generator contracts in numbers: draw ensembles and print the measured
//! gain-flatness, conditioning, and signal-flatness diagnostics alongside
//! the measurement SNR.
//!
//! ```sh
//! cargo run --release --example assumption_diagnostics
//! ```

use bgpc::metrics::msnr;
use bgpc::model::Dims;
use bgpc::synth::{assumption_diagnostics, gen_instance, EnsembleSpec, Signal};

fn main() -> bgpc::Result<()> {
    let variants = [
        ("dense subspace", Signal::DenseSubspace),
        ("sparse columns", Signal::Sparse { s0: 8 }),
        ("joint rows    ", Signal::JointSparse { s0: 8 }),
        ("flat sparse   ", Signal::FlatSparse { s0: 8 }),
    ];
    for (label, signal) in variants {
        let spec = EnsembleSpec {
            dims: Dims::new(128, 64, 16)?,
            delta: 0.1,
            sigma_w: 0.1,
            signal,
            seed: 12,
        };
        let (instance, truth) = gen_instance(&spec)?;
        let report = assumption_diagnostics(&truth);
        let snr = msnr(&truth.lambda, &instance.a, &truth.x, &truth.w)?;
        println!(
            "{label}: delta {:.3}, theta {:.3}, theta|rows {}, omega {:.3}, MSNR {snr:.1} dB",
            report.delta_actual,
            report.theta_actual,
            report
                .theta_joint
                .map_or("-".to_string(), |t| format!("{t:.3}")),
            report.omega,
        );
    }
    Ok(())
}
