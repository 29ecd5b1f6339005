//! Dense-oracle checks for the matrix-free operator: every identity is
//! verified against explicit constructions of `D`, `E`, and `B` from their
//! definitions.

mod common;

use bgpc::model::pack_eta;
use bgpc::operators::{estimate_beta, expected_bs, CalibrationOperator};
use bgpc::synth::{gen_instance, stream_rng, StreamTag};
use bgpc::{ComplexMatrix, C64};
use common::*;
use rand::RngCore;

fn random_eta(len: usize, seed: u64) -> Vec<C64> {
    let mut rng = stream_rng(seed, StreamTag::Signal);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    (0..len).map(|_| C64::new(unit(), unit())).collect()
}

#[test]
fn apply_b_matches_dense_construction_small() {
    // n=4, m=2, N=2 seeded instance against [D, aE]^H [D, aE] built from scratch
    let spec = subspace_spec(4, 2, 2, 0.1, 21);
    let (instance, _) = gen(&spec);
    let alpha = 2.0;
    let op = CalibrationOperator::new(&instance, alpha, 1.5).unwrap();
    let b = dense_b_from_parts(&instance, alpha);
    let v = random_eta(instance.dims.eta_len(), 5);
    let fast = op.apply_b_slice(&v);
    let slow = mat_vec(&b, &v);
    for (f, s) in fast.iter().zip(&slow) {
        assert!((f - s).norm() < 1e-12);
    }
}

#[test]
fn dense_b_equals_scratch_construction() {
    let spec = subspace_spec(5, 3, 2, 0.2, 8);
    let (instance, _) = gen(&spec);
    let alpha = (5.0f64).sqrt();
    let op = CalibrationOperator::new(&instance, alpha, 1.5).unwrap();
    let lib = to_na(&op.dense_b().unwrap());
    let scratch = dense_b_from_parts(&instance, alpha);
    assert!((lib - scratch).norm() < 1e-12);
}

#[test]
fn dense_b_is_hermitian_psd_with_kronecker_top_block() {
    let spec = subspace_spec(6, 3, 2, 0.1, 3);
    let (instance, _) = gen(&spec);
    let alpha = (6.0f64).sqrt();
    let op = CalibrationOperator::new(&instance, alpha, 1.5).unwrap();
    let b = to_na(&op.dense_b().unwrap());
    // Hermitian
    assert!((b.clone() - b.adjoint()).norm() < 1e-12);
    // PSD
    let eigs = hermitian_eigenvalues(&b);
    assert!(eigs[0] >= -1e-10, "smallest eigenvalue {}", eigs[0]);
    // top-left Nm x Nm block equals I_N (x) (A^H A), by direct multiplication
    let a = to_na(&instance.a);
    let aha = a.adjoint() * &a;
    let (m, snaps) = (3usize, 2usize);
    for j1 in 0..snaps {
        for j2 in 0..snaps {
            for l1 in 0..m {
                for l2 in 0..m {
                    let want = if j1 == j2 {
                        aha[(l1, l2)]
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    let got = b[(j1 * m + l1, j2 * m + l2)];
                    assert!((got - want).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn truth_is_a_null_vector_when_noiseless() {
    let spec = subspace_spec(16, 4, 4, 0.0, 33);
    let (instance, truth) = gen(&spec);
    let alpha = 4.0;
    let op = CalibrationOperator::new(&instance, alpha, 1.5).unwrap();
    let eta = pack_eta(&truth.x, &truth.gamma, alpha)
        .unwrap()
        .normalized()
        .unwrap();
    let out = op.apply_b(&eta).unwrap();
    let b_norm = estimate_beta(&instance, alpha, 60, 1e-9).unwrap();
    let residual: f64 = out.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(
        residual <= 1e-10 * b_norm.max(1.0),
        "B eta = {residual}, ||B|| ~ {b_norm}"
    );
    // and G eta = beta * eta for beta = 3/2
    let g = CalibrationOperator::new(&instance, alpha, 1.5)
        .unwrap()
        .apply_g(&eta)
        .unwrap();
    for (ge, e) in g.data().iter().zip(eta.data()) {
        assert!((ge - 1.5 * e).norm() < 1e-9);
    }
}

#[test]
fn apply_g_is_hermitian_in_inner_products() {
    let spec = subspace_spec(5, 2, 3, 0.3, 12);
    let (instance, _) = gen(&spec);
    let op = CalibrationOperator::new(&instance, (5.0f64).sqrt(), 2.0).unwrap();
    let len = instance.dims.eta_len();
    for seed in 0..20 {
        let u = random_eta(len, 100 + seed);
        let v = random_eta(len, 200 + seed);
        let gu = op.apply_g_slice(&u);
        let gv = op.apply_g_slice(&v);
        let lhs: C64 = u.iter().zip(&gv).map(|(a, b)| a.conj() * b).sum();
        let rhs: C64 = v.iter().zip(&gu).map(|(a, b)| a.conj() * b).sum();
        let scale = lhs.norm().max(rhs.norm()).max(1e-30);
        assert!(
            (lhs - rhs.conj()).norm() <= 1e-10 * scale,
            "<u, Gv> = {lhs}, <v, Gu>* = {}",
            rhs.conj()
        );
    }
}

#[test]
fn estimate_beta_identity_like_and_bounded() {
    // A = first m columns of I_n, Y = 0: B = diag(I_{Nm}, 0), ||B|| = 1
    let n = 5;
    let m = 3;
    let snaps = 2;
    let mut entries = vec![C64::new(0.0, 0.0); n * m];
    for l in 0..m {
        entries[l * m + l] = C64::new(1.0, 0.0); // row l, col l
    }
    let a = ComplexMatrix::new(n, m, entries).unwrap();
    let y = ComplexMatrix::zeros(n, snaps);
    let instance = bgpc::model::ProblemInstance::new(a, y).unwrap();
    let est = estimate_beta(&instance, 1.0, 200, 1e-12).unwrap();
    assert!((est - 1.0).abs() < 1e-6, "estimate {est}");

    // Rayleigh quotient never exceeds the true spectral norm
    let spec = subspace_spec(4, 2, 2, 0.1, 77);
    let (instance, _) = gen(&spec);
    let alpha = 2.0;
    let est = estimate_beta(&instance, alpha, 60, 1e-6).unwrap();
    let b = dense_b_from_parts(&instance, alpha);
    let top = hermitian_eigenvalues(&b).last().copied().unwrap();
    assert!(est <= top + 1e-9, "estimate {est} > ||B|| {top}");
    assert!(est >= 0.5 * top, "estimate {est} far below ||B|| {top}");
}

#[test]
fn operator_equivalence_randomized_property() {
    // randomized equivalence on instances with Nm+n <= 200
    let cases = [
        (4usize, 2usize, 2usize),
        (8, 3, 2),
        (16, 4, 4),
        (12, 8, 3),
        (30, 10, 4),
    ];
    for (idx, &(n, m, snaps)) in cases.iter().enumerate() {
        for seed in 0..20 {
            let spec = subspace_spec(n, m, snaps, 0.1, 1000 + 20 * idx as u64 + seed);
            let (instance, _) = gen(&spec);
            let alpha = (n as f64).sqrt();
            let op = CalibrationOperator::new(&instance, alpha, 1.7).unwrap();
            let b = dense_b_from_parts(&instance, alpha);
            let v = random_eta(instance.dims.eta_len(), 999 + seed);
            let fast = op.apply_b_slice(&v);
            let slow = mat_vec(&b, &v);
            let scale: f64 = slow.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let diff: f64 = fast
                .iter()
                .zip(&slow)
                .map(|(a, c)| (a - c).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff <= 1e-11 * scale.max(1.0), "rel error {}", diff / scale);
        }
    }
}

#[test]
fn expected_bs_annihilates_the_target() {
    let spec = subspace_spec(8, 3, 2, 0.0, 50);
    let (_, truth) = gen(&spec);
    // normalize X exactly for the closed form
    let fro = truth.x.frobenius_norm();
    let x = ComplexMatrix::from_array(truth.x.as_array().map(|z| z / fro)).unwrap();
    let ebs = expected_bs(&truth.lambda, &x).unwrap();
    let eta = pack_eta(&x, &truth.gamma, (8.0f64).sqrt())
        .unwrap()
        .normalized()
        .unwrap();
    let out = mat_vec(&to_na(&ebs), eta.data());
    let res: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(res <= 1e-10, "E[Bs] eta_dot = {res}");
}

#[test]
fn expected_bs_unit_gain_spectrum() {
    // lambda = ones: eigenvalues {0, 1 (multiplicity Nm+n-2), 2}
    let spec = subspace_spec(6, 2, 2, 0.0, 51);
    let (_, truth) = gen(&spec);
    let fro = truth.x.frobenius_norm();
    let x = ComplexMatrix::from_array(truth.x.as_array().map(|z| z / fro)).unwrap();
    let ones = vec![C64::new(1.0, 0.0); 6];
    let ebs = expected_bs(&ones, &x).unwrap();
    let eigs = hermitian_eigenvalues(&to_na(&ebs));
    let len = eigs.len();
    assert!(eigs[0].abs() < 1e-10);
    assert!((eigs[len - 1] - 2.0).abs() < 1e-10);
    for &e in &eigs[1..len - 1] {
        assert!((e - 1.0).abs() < 1e-10, "middle eigenvalue {e}");
    }
}

#[test]
fn expected_bs_eigen_gap_interval() {
    // delta = 0.1 ensemble: nonzero eigenvalues within [(1-d)^2/(1+d), 2(1+d)]
    let delta = 0.1;
    let lo = (1.0 - delta) * (1.0 - delta) / (1.0 + delta);
    let hi = 2.0 * (1.0 + delta);
    for seed in 0..10 {
        let spec = subspace_spec(8, 3, 2, 0.0, 600 + seed);
        let (_, truth) = gen(&spec);
        let fro = truth.x.frobenius_norm();
        let x = ComplexMatrix::from_array(truth.x.as_array().map(|z| z / fro)).unwrap();
        let ebs = expected_bs(&truth.lambda, &x).unwrap();
        let eigs = hermitian_eigenvalues(&to_na(&ebs));
        assert!(eigs[0].abs() <= 1e-9);
        for &e in &eigs[1..] {
            assert!(e >= lo - 1e-9 && e <= hi + 1e-9, "eigenvalue {e} outside [{lo}, {hi}]");
        }
    }
}

#[test]
fn apply_cost_scales_linearly_in_each_dimension() {
    // measured arithmetic count (real multiply-adds on this thread) per apply
    fn cost_of_apply(n: usize, m: usize, snaps: usize) -> u64 {
        let spec = subspace_spec(n, m, snaps, 0.0, 42);
        let (instance, _) = gen_instance(&spec).unwrap();
        let op = CalibrationOperator::new(&instance, (n as f64).sqrt(), 1.5).unwrap();
        let v = random_eta(instance.dims.eta_len(), 1);
        let before = bgpc::real_madd_count();
        let _ = op.apply_b_slice(&v);
        bgpc::real_madd_count() - before
    }
    let base = (64usize, 48usize, 12usize);
    let c0 = cost_of_apply(base.0, base.1, base.2);
    for (label, c1) in [
        ("n", cost_of_apply(2 * base.0, base.1, base.2)),
        ("m", cost_of_apply(base.0, 2 * base.1, base.2)),
        ("N", cost_of_apply(base.0, base.1, 2 * base.2)),
    ] {
        let slope = (c1 as f64 / c0 as f64).log2();
        assert!(
            (0.8..=1.3).contains(&slope),
            "doubling {label}: slope {slope:.3} (c0={c0}, c1={c1})"
        );
    }
    // and no quadratic-size intermediate: cost itself stays O(m n N)
    let model = |n: usize, m: usize, s: usize| (6 * n * m * s + 8 * n * s) as u64;
    assert_eq!(c0, model(base.0, base.1, base.2));
}
