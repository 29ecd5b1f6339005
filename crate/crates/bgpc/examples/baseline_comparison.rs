//! Head-to-head with the baselines: constrained least squares in the
//! subspace case, and l1-ADMM in the sparsity case.
//!
//! ```sh
//! cargo run --release --example baseline_comparison
//! ```

use bgpc::baselines::{l1_admm, least_squares, AdmmConfig};
use bgpc::metrics::rsnr;
use bgpc::model::{pack_eta, Dims};
use bgpc::solvers::{
    default_eta0, phase_informed_eta0, power_iteration, truncated_power_iteration, SolverConfig,
};
use bgpc::synth::{gen_instance, EnsembleSpec, Signal};
use bgpc::{C64, SparsityMode};

fn main() -> bgpc::Result<()> {
    // subspace case under noise: eigenvector estimate vs least squares
    let spec = EnsembleSpec {
        dims: Dims::new(128, 16, 16)?,
        delta: 0.1,
        sigma_w: 0.1,
        signal: Signal::DenseSubspace,
        seed: 3,
    };
    let (instance, truth) = gen_instance(&spec)?;
    let alpha = (spec.dims.n as f64).sqrt();

    let pi = power_iteration(&instance, &default_eta0(&instance, alpha), &SolverConfig::default())?;
    let pi_db = rsnr(truth.eta_dot.data(), pi.eta.data())?;

    let ls = least_squares(&instance)?;
    let ls_eta = pack_eta(&ls.x, &ls.gamma, alpha)?.normalized()?;
    let ls_db = rsnr(truth.eta_dot.data(), ls_eta.data())?;
    println!("subspace, 20 dB measurement noise:");
    println!("  power iteration  RSNR {pi_db:>6.1} dB");
    println!("  least squares    RSNR {ls_db:>6.1} dB");

    // sparsity case: truncated power iteration vs l1 minimization
    let s0 = 16;
    let spec = EnsembleSpec {
        dims: Dims::new(128, 256, 16)?,
        delta: 0.1,
        sigma_w: 0.1,
        signal: Signal::Sparse { s0 },
        seed: 4,
    };
    let (instance, truth) = gen_instance(&spec)?;
    let eta0 = phase_informed_eta0(&truth.phases, instance.dims, alpha)?;
    let cfg = SolverConfig {
        sparsity: Some(SparsityMode::PerColumn { s: 2 * s0 }),
        ..SolverConfig::default()
    };
    let tpi = truncated_power_iteration(&instance, &eta0, &cfg)?;
    let tpi_db = rsnr(truth.eta_dot.data(), tpi.eta.data())?;

    let gamma0: Vec<C64> = truth
        .phases
        .iter()
        .map(|&p| C64::from_polar(1.0, -p))
        .collect();
    let l1 = l1_admm(&instance, &gamma0, &AdmmConfig::default())?;
    let l1_eta = pack_eta(&l1.x, &l1.gamma, alpha)?.normalized()?;
    let l1_db = rsnr(truth.eta_dot.data(), l1_eta.data())?;
    println!("sparse (s0 = {s0}), 20 dB measurement noise:");
    println!("  truncated power iteration  RSNR {tpi_db:>6.1} dB");
    println!(
        "  l1-ADMM ({} iterations)   RSNR {l1_db:>6.1} dB",
        l1.iterations
    );
    Ok(())
}
