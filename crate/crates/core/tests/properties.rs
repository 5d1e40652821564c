use std::f64::consts::LN_2;

use proptest::prelude::*;

use spinchan::bipartite::{assemble_schmidt_state, schmidt_decompose};
use spinchan::entropy::{objective_at, output_entropy, state_coordinates, MinEntropyOptions};
use spinchan::numerics::{c, eigenvalues, expi_hermitian, kron, svd, Complex, ComplexMatrix};
use spinchan::random::{haar_unitary, stream_rng};
use spinchan::verify::pointwise_residual;
use spinchan::{
    bloch_to_state, build_isotropic, build_transpose_depolarizing, holevo_covariant,
    holevo_ensemble_value, min_output_entropy, state_to_bloch, von_neumann_entropy, Basis,
    BlochVector, CovarianceCertificate, DensityMatrix, Ensemble, KrausChannel, PureState, Spin,
};

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

fn pure_state(n: usize) -> impl Strategy<Value = PureState> {
    complex_vec(n)
        .prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| PureState::normalize(&v).unwrap())
}

fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_vec(n * n).prop_map(move |v| ComplexMatrix::new(n, n, v).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_matrix(n).prop_map(|m| m.hermitian_part())
}

/// Mixed state `sum_i w_i |psi_i><psi_i|` from random vectors.
fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec(pure_state(n), 1..=3).prop_flat_map(move |states| {
        let k = states.len();
        prop::collection::vec(0.05..1.0f64, k).prop_map(move |w| {
            let total: f64 = w.iter().sum();
            let mut m = ComplexMatrix::zeros(n, n);
            for (psi, wi) in states.iter().zip(&w) {
                m += &psi.density().matrix().scale_real(wi / total);
            }
            DensityMatrix::new(m).unwrap()
        })
    })
}

/// Random channel from a Haar isometry `C^d -> C^d (x) C^k`.
fn random_channel(d: usize, k: usize, seed: u64) -> KrausChannel {
    let u = haar_unitary(&mut stream_rng(seed, 0), d * k);
    let kraus = (0..k)
        .map(|i| ComplexMatrix::from_fn(d, d, |a, b| u[(i * d + a, b)]))
        .collect();
    KrausChannel::new(format!("random-{d}-{k}-{seed}"), d, kraus).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_unitarily_invariant(rho in density(3), seed in 0u64..1000) {
        let u = haar_unitary(&mut stream_rng(seed, 1), 3);
        let rotated = rho.conjugate_by(&u);
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&rotated).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        prop_assert!(a >= 0.0 && a <= 3f64.ln() + 1e-12);
    }

    #[test]
    fn entropy_is_additive_on_products(rho in density(2), tau in density(3)) {
        let joint = rho.tensor(&tau).unwrap();
        let lhs = von_neumann_entropy(&joint).unwrap();
        let rhs = von_neumann_entropy(&rho).unwrap() + von_neumann_entropy(&tau).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn spin_half_output_spectrum_is_constant(psi in pure_state(2)) {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let eig = eigenvalues(ch.apply_to_pure(&psi).unwrap().matrix()).unwrap();
        prop_assert!((eig[0] - 1.0 / 3.0).abs() < 1e-10);
        prop_assert!((eig[1] - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn spin_half_contracts_bloch_vectors(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let n = (x * x + y * y + z * z).sqrt();
        let scale = if n > 1.0 { 1.0 / n } else { 1.0 };
        let b = BlochVector::new(x * scale, y * scale, z * scale).unwrap();
        let rho = bloch_to_state(&b).unwrap();
        let back = state_to_bloch(&rho).unwrap();
        for (p, q) in back.components().iter().zip(b.components()) {
            prop_assert!((p - q).abs() < 1e-12);
        }
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let out = state_to_bloch(&ch.apply(&rho).unwrap()).unwrap();
        prop_assert!((out.norm() - b.norm() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_depolarizing_matches_formula(m in complex_matrix(4)) {
        let ch = build_transpose_depolarizing(4).unwrap();
        let expected = &ComplexMatrix::identity(4).scale(m.trace()) - &m.transpose();
        let got = ch.apply_to_operator(&m).unwrap();
        prop_assert!(got.max_abs_diff(&expected.scale_real(1.0 / 3.0)) < 1e-12);
    }

    #[test]
    fn tensor_channel_acts_on_products(rho in density(2), tau in density(3)) {
        let a = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let b = build_isotropic(Spin::One, Basis::Cartesian).unwrap();
        let ab = a.tensor(&b).unwrap();
        let lhs = ab.apply(&rho.tensor(&tau).unwrap()).unwrap();
        let rhs = a.apply(&rho).unwrap().tensor(&b.apply(&tau).unwrap()).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in complex_matrix(2), b in complex_matrix(3), c2 in complex_matrix(2), d in complex_matrix(3)) {
        let lhs = &kron(&a, &b).unwrap() * &kron(&c2, &d).unwrap();
        let rhs = kron(&(&a * &c2), &(&b * &d)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn expi_group_law(h in hermitian(3), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let lhs = &expi_hermitian(&h, s).unwrap() * &expi_hermitian(&h, t).unwrap();
        let rhs = expi_hermitian(&h, s + t).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        prop_assert!(rhs.is_unitary(1e-10));
    }

    #[test]
    fn svd_reconstructs(m in complex_matrix(4)) {
        let (u, s, v) = svd(&m).unwrap();
        let sig = ComplexMatrix::diag(&s);
        let back = &(&u * &sig) * &v.adjoint();
        prop_assert!(back.max_abs_diff(&m) < 1e-10);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn schmidt_round_trip(psi in pure_state(9)) {
        let form = schmidt_decompose(&psi).unwrap();
        let total: f64 = form.lambdas.values().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let back = assemble_schmidt_state(&form);
        prop_assert!((back.fidelity(&psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pointwise_residual_is_symmetric(seed in 0u64..500) {
        let a = random_channel(3, 2, seed);
        let b = build_transpose_depolarizing(3).unwrap();
        let ab = pointwise_residual(&a, &b).unwrap();
        let ba = pointwise_residual(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-15);
    }

    #[test]
    fn ensemble_value_is_bounded_by_capacity(p in 0.0..1.0f64, a in pure_state(2), b in pure_state(2)) {
        let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
        let ens = Ensemble::new(vec![p, 1.0 - p], vec![a.density(), b.density()]).unwrap();
        let value = holevo_ensemble_value(&ch, &ens).unwrap();
        let chi = 5.0 / 3.0 * LN_2 - 3f64.ln();
        prop_assert!(value >= -1e-10);
        prop_assert!(value <= chi + 1e-9);
    }
}

#[test]
fn spin_half_objective_is_constant() {
    let ch = build_isotropic(Spin::Half, Basis::Magnetic).unwrap();
    let values: Vec<f64> = (0..1000)
        .map(|s| output_entropy(&ch, &PureState::haar(&mut stream_rng(5, s), 2)).unwrap())
        .collect();
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi - lo < 1e-9);
}

#[test]
fn optimizer_beats_random_probes_on_generic_channels() {
    for (d, k, seed) in [(2, 2, 1), (2, 3, 2), (3, 2, 3), (3, 3, 4)] {
        let ch = random_channel(d, k, seed);
        let report = min_output_entropy(&ch, 32, 1e-10, 42).unwrap();
        let best_probe = (0..1000)
            .map(|s| output_entropy(&ch, &PureState::haar(&mut stream_rng(99, s), d)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(report.min_entropy <= best_probe + 1e-12, "{d} {k}: {} vs {best_probe}", report.min_entropy);
        assert!(report.min_entropy >= 0.0 && report.min_entropy <= (d as f64).ln());
        let again = objective_at(&ch, &state_coordinates(&report.argmin));
        assert!((again - report.min_entropy).abs() < 1e-9);
    }
}

#[test]
fn gradient_vanishes_at_the_minimizer() {
    for (d, k, seed) in [(2, 2, 1), (3, 2, 3)] {
        let ch = random_channel(d, k, seed);
        let report = min_output_entropy(&ch, 32, 1e-10, 42).unwrap();
        let x = state_coordinates(&report.argmin);
        let h = 1e-6;
        let grad: f64 = (0..x.len())
            .map(|i| {
                let mut p = x.clone();
                let mut m = x.clone();
                p[i] += h;
                m[i] -= h;
                ((objective_at(&ch, &p) - objective_at(&ch, &m)) / (2.0 * h)).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        assert!(grad < 1e-5, "d = {d}, k = {k}: gradient norm {grad}");
    }
}

#[test]
fn min_entropy_is_deterministic_and_schedule_independent() {
    let ch = random_channel(3, 2, 11);
    let a = min_output_entropy(&ch, 16, 1e-10, 5).unwrap();
    let b = min_output_entropy(&ch, 16, 1e-10, 5).unwrap();
    assert_eq!(a.min_entropy.to_bits(), b.min_entropy.to_bits());
    assert_eq!(a.best_restart_index, b.best_restart_index);
    assert_eq!(a.restart_minima, b.restart_minima);
}

#[test]
fn identity_channel_has_zero_min_entropy_and_full_capacity() {
    let ch = KrausChannel::identity(3);
    let report = min_output_entropy(&ch, 8, 1e-10, 42).unwrap();
    assert!(report.min_entropy.abs() < 1e-9);
    let cert = CovarianceCertificate::verify(&ch, 20, 1).unwrap();
    let chi = holevo_covariant(&ch, &report, &cert).unwrap();
    assert!((chi - 3f64.ln()).abs() < 1e-9);
}

#[test]
fn magnetic_and_cartesian_spin_one_share_min_entropy() {
    let a = min_output_entropy(&build_isotropic(Spin::One, Basis::Magnetic).unwrap(), 16, 1e-10, 3).unwrap();
    let b = min_output_entropy(&build_isotropic(Spin::One, Basis::Cartesian).unwrap(), 16, 1e-10, 3).unwrap();
    assert!((a.min_entropy - b.min_entropy).abs() < 1e-7);
}

#[test]
fn option_defaults() {
    let o = MinEntropyOptions::default();
    assert_eq!((o.restarts, o.seed), (64, 42));
    assert_eq!(o.tol, 1e-10);
}
