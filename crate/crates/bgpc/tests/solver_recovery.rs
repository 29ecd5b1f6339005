//! Recovery behavior of the power-iteration solvers, cross-checked against
//! dense eigendecomposition oracles on small instances.

mod common;

use bgpc::metrics::{distance, rsnr};
use bgpc::model::pack_eta;
use bgpc::operators::CalibrationOperator;
use bgpc::solvers::{
    default_eta0, phase_informed_eta0, power_iteration, truncated_power_iteration, AlphaMode,
    BetaMode, SolverConfig,
};
use bgpc::SparsityMode;
use common::*;

fn pi_config() -> SolverConfig {
    SolverConfig {
        alpha_mode: AlphaMode::SqrtN,
        beta_mode: BetaMode::Estimated,
        max_iters: 1000,
        tol: 1e-9,
        sparsity: None,
        trace: false,
    }
}

#[test]
fn noiseless_subspace_recovery_matches_truth_and_dense_eigenvector() {
    let spec = subspace_spec(16, 4, 4, 0.0, 3005);
    let (instance, truth) = gen(&spec);
    let alpha = 4.0;
    let eta0 = default_eta0(&instance, alpha);
    let result = power_iteration(
        &instance,
        &eta0,
        &SolverConfig {
            max_iters: 500,
            ..pi_config()
        },
    )
    .unwrap();
    assert!(result.iterations <= 500);
    let d = distance(result.eta.data(), truth.eta_dot.data()).unwrap();
    assert!(d <= 1e-6, "distance to truth {d} after {} iters", result.iterations);

    // cross-check against the dense smallest eigenvector of B
    let b = dense_b_from_parts(&instance, alpha);
    let null_vec = smallest_eigenvector(&b);
    let d_oracle = distance(result.eta.data(), &null_vec).unwrap();
    assert!(d_oracle <= 1e-6, "distance to dense eigenvector {d_oracle}");
}

#[test]
fn noiseless_exactness_reaches_120_db() {
    // a tighter tolerance pushes past the 120 dB line even for slow-gap seeds
    let cfg = SolverConfig {
        max_iters: 5000,
        tol: 1e-10,
        ..pi_config()
    };
    for seed in [3000u64, 3005, 3008, 3012, 3013] {
        let spec = subspace_spec(16, 4, 4, 0.0, seed);
        let (instance, truth) = gen(&spec);
        let eta0 = default_eta0(&instance, 4.0);
        let result = power_iteration(&instance, &eta0, &cfg).unwrap();
        let db = rsnr(truth.eta_dot.data(), result.eta.data()).unwrap();
        assert!(db >= 120.0, "seed {seed}: RSNR {db}");
    }
}

#[test]
fn starting_at_the_truth_is_a_fixed_point() {
    let spec = subspace_spec(12, 3, 3, 0.0, 5);
    let (instance, truth) = gen(&spec);
    let alpha = (12.0f64).sqrt();
    let eta0 = pack_eta(&truth.x, &truth.gamma, alpha)
        .unwrap()
        .normalized()
        .unwrap();
    let result = power_iteration(&instance, &eta0, &pi_config()).unwrap();
    assert!(result.converged);
    assert_eq!(result.iterations, 1);
    let d = distance(result.eta.data(), eta0.data()).unwrap();
    assert!(d < 1e-9);
}

#[test]
fn subspace_success_rate_at_m32() {
    // n=128, N=16, m=32, noiseless: success (RSNR > 30 dB) in >= 95/100 trials
    let successes: usize = (0..100)
        .filter(|&seed| {
            let spec = subspace_spec(128, 32, 16, 0.0, 40_000 + seed);
            let (instance, truth) = gen(&spec);
            let eta0 = default_eta0(&instance, (128.0f64).sqrt());
            let cfg = SolverConfig {
                max_iters: 1000,
                ..pi_config()
            };
            match power_iteration(&instance, &eta0, &cfg) {
                Ok(result) => rsnr(truth.eta_dot.data(), result.eta.data()).unwrap() > 30.0,
                Err(_) => false,
            }
        })
        .count();
    assert!(successes >= 95, "only {successes}/100 succeeded");
}

#[test]
fn rayleigh_overlap_is_monotone_under_plain_power_iteration() {
    // |eta_hat^H eta_t| nondecreasing, where eta_hat is the dense principal
    // eigenvector of G; all iterates unit norm
    for seed in 0..5 {
        let spec = subspace_spec(16, 4, 4, 0.0, 7000 + seed);
        let (instance, _) = gen(&spec);
        let alpha = 4.0;
        // the default shift: with beta >= ||B|| the iteration matrix is PSD
        let beta = 1.01 * bgpc::operators::estimate_beta(&instance, alpha, 60, 1e-6).unwrap();
        let op = CalibrationOperator::new(&instance, alpha, beta).unwrap();
        let mut g_dense = dense_b_from_parts(&instance, alpha).map(|z| -z);
        for i in 0..g_dense.nrows() {
            g_dense[(i, i)] += bgpc::C64::new(beta, 0.0);
        }
        let principal = largest_eigenvector(&g_dense);

        let mut eta = default_eta0(&instance, alpha).data().to_vec();
        let mut prev_overlap = overlap(&principal, &eta);
        for _ in 0..60 {
            let mut next = op.apply_g_slice(&eta);
            let norm = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut next {
                *z /= norm;
            }
            let unit: f64 = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((unit - 1.0).abs() < 1e-12);
            let ov = overlap(&principal, &next);
            assert!(
                ov >= prev_overlap - 1e-12,
                "overlap decreased: {prev_overlap} -> {ov}"
            );
            prev_overlap = ov;
            eta = next;
        }
    }
}

#[test]
fn full_support_truncation_reproduces_power_iteration() {
    // TPI with s1 = m equals PI iterate-for-iterate
    for seed in 0..5 {
        let spec = sparse_spec(16, 6, 3, 2, 0.1, 8000 + seed);
        let (instance, _) = gen(&spec);
        let alpha = 4.0;
        let eta0 = default_eta0(&instance, alpha);
        for iters in [1, 3, 7, 20] {
            let mut cfg = pi_config();
            cfg.max_iters = iters;
            cfg.tol = 1e-300; // run all iterations
            let pi = power_iteration(&instance, &eta0, &cfg).unwrap();
            let mut cfg_t = cfg.clone();
            cfg_t.sparsity = Some(SparsityMode::PerColumn { s: 6 });
            let tpi = truncated_power_iteration(&instance, &eta0, &cfg_t).unwrap();
            assert_eq!(pi.iterations, tpi.iterations);
            let max_diff = pi
                .eta
                .data()
                .iter()
                .zip(tpi.eta.data())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(max_diff <= 1e-12, "seed {seed}, t={iters}: diff {max_diff}");
        }
    }
}

#[test]
fn solver_is_deterministic() {
    let spec = sparse_spec(32, 64, 4, 4, 0.1, 99);
    let (instance, _) = gen(&spec);
    let alpha = (32.0f64).sqrt();
    let eta0 = phase_informed_eta0(&vec![0.1; 32], instance.dims, alpha).unwrap();
    let cfg = SolverConfig {
        sparsity: Some(SparsityMode::PerColumn { s: 8 }),
        trace: true,
        ..pi_config()
    };
    let r1 = truncated_power_iteration(&instance, &eta0, &cfg).unwrap();
    let r2 = truncated_power_iteration(&instance, &eta0, &cfg).unwrap();
    assert_eq!(r1.iterations, r2.iterations);
    assert_eq!(r1.converged, r2.converged);
    assert_eq!(r1.eta.data(), r2.eta.data());
    assert_eq!(r1.trace, r2.trace);
}

#[test]
fn phase_informed_start_has_large_overlap() {
    // delta = 0.1 generator: |eta_dot^H eta0| > 0.55 across 100 trials
    for seed in 0..100 {
        let spec = subspace_spec(32, 8, 4, 0.0, 10_000 + seed);
        let (instance, truth) = gen(&spec);
        let eta0 =
            phase_informed_eta0(&truth.phases, instance.dims, (32.0f64).sqrt()).unwrap();
        let ov = overlap(truth.eta_dot.data(), eta0.data());
        assert!(ov > 0.55, "seed {seed}: overlap {ov}");
    }
}

#[test]
fn theory_beta_is_three_halves() {
    let spec = subspace_spec(8, 2, 2, 0.0, 1);
    let (instance, _) = gen(&spec);
    let cfg = SolverConfig {
        beta_mode: BetaMode::Theory,
        ..pi_config()
    };
    let beta = cfg.resolve_beta(&instance, 2.0).unwrap();
    assert_eq!(beta, 1.5);
}

#[test]
fn hybrid_mode_switches_projection_midway() {
    // joint-sparse instance: hybrid run converges to the truth as well
    let spec = bgpc::synth::EnsembleSpec {
        dims: bgpc::model::Dims::new(64, 32, 8).unwrap(),
        delta: 0.1,
        sigma_w: 0.0,
        signal: bgpc::synth::Signal::JointSparse { s0: 4 },
        seed: 777,
    };
    let (instance, truth) = gen(&spec);
    let alpha = 8.0;
    let eta0 = phase_informed_eta0(&truth.phases, instance.dims, alpha).unwrap();
    let cfg = SolverConfig {
        sparsity: Some(SparsityMode::Hybrid {
            s: 8,
            switch_fraction: 0.5,
        }),
        max_iters: 400,
        ..pi_config()
    };
    let result = truncated_power_iteration(&instance, &eta0, &cfg).unwrap();
    let db = rsnr(truth.eta_dot.data(), result.eta.data()).unwrap();
    assert!(db > 30.0, "hybrid TPI RSNR {db}");
}
